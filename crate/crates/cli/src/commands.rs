use std::path::Path;

use serde::Serialize;
use shuttle_core::circuit::{flux_sweep, linspace};
use shuttle_core::protocol::{run_swap_protocol, validate_rwa, ProtocolSettings, RwaValidation, ValidationSettings};

use crate::config::{Format, Resolved};
use crate::output::{Row, Writer};
use crate::CliError;

const COEFFICIENT_COLUMNS: [&str; 6] = ["phi_b", "g1", "g2", "omega_q", "omega_m", "omega_p0"];
const PHASE_COLUMNS: [&str; 6] = ["t_ns", "sz", "n_mech", "trace", "purity", "fidelity"];

/// Parse `start:stop:points` or a comma-separated list of values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Config(format!("invalid grid `{spec}`: {what}"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:points"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start"))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad("stop"))?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad("points"))?;
        return Ok(linspace(start, stop, points));
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(s)))
        .collect()
}

#[derive(Serialize)]
struct CoefficientRow {
    phi_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<[f64; 5]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn coefficients(resolved: &Resolved, grid: &[f64], out: &Path, format: Format) -> Result<String, CliError> {
    let rows = flux_sweep(&resolved.params, grid);
    let mut failures = Vec::new();
    let mut table = Vec::with_capacity(rows.len());
    let mut records = Vec::with_capacity(rows.len());
    for (phi, row) in grid.iter().zip(rows) {
        match row {
            Ok(r) => {
                table.push(Row::Values(vec![r.phi_b, r.g1, r.g2, r.omega_q, r.omega_m, r.omega_p0]));
                records.push(CoefficientRow {
                    phi_b: *phi,
                    values: Some([r.g1, r.g2, r.omega_q, r.omega_m, r.omega_p0]),
                    error: None,
                });
            }
            Err(e) => {
                table.push(Row::Error(e.to_string()));
                records.push(CoefficientRow {
                    phi_b: *phi,
                    values: None,
                    error: Some(e.to_string()),
                });
                failures.push(e.to_string());
            }
        }
    }
    let writer = Writer::new(out, "coefficients", resolved)?;
    let path = match format {
        Format::Csv => writer.csv("coefficients.csv", &COEFFICIENT_COLUMNS, &table, &[])?,
        Format::Json => writer.json(
            "coefficients.json",
            serde_json::json!({ "columns": COEFFICIENT_COLUMNS, "rows": records }),
        )?,
    };
    if let Some(first) = failures.first() {
        return Err(CliError::Domain(format!(
            "{} of {} rows failed (first: {first}); table written to {}",
            failures.len(),
            grid.len(),
            path.display()
        )));
    }
    Ok(format!("{} rows written to {}", grid.len(), path.display()))
}

#[derive(Serialize)]
struct SwapSummary {
    g_sw: f64,
    omega_bar: f64,
    t_swap: f64,
    hold: f64,
    total_time: f64,
    fidelity: f64,
    baseline_fidelity: f64,
    convergence_change: Option<f64>,
}

pub fn swap(resolved: &Resolved, out: &Path, format: Format) -> Result<String, CliError> {
    let schedule = resolved.schedule()?;
    let numeric = &resolved.config.numeric;
    let settings = ProtocolSettings {
        fock_dim: numeric.fock_dim,
        evolve: numeric.evolve_options(),
        check_convergence: numeric.check_convergence,
    };
    let result = run_swap_protocol(&resolved.params, &schedule, None, &settings)?;
    let summary = SwapSummary {
        g_sw: result.g_sw,
        omega_bar: result.omega_bar,
        t_swap: result.t_swap,
        hold: schedule.hold,
        total_time: result.total_time,
        fidelity: result.fidelity,
        baseline_fidelity: result.baseline_fidelity,
        convergence_change: result.convergence_change,
    };

    let writer = Writer::new(out, "swap", resolved)?;
    match format {
        Format::Csv => {
            for phase in &result.phases {
                let s = &phase.series;
                let rows: Vec<Row> = (0..s.len())
                    .map(|i| {
                        let (t, values) = s.row(i);
                        let mut row = vec![t];
                        row.extend(values);
                        Row::Values(row)
                    })
                    .collect();
                writer.csv(&format!("{}.csv", phase.name), &PHASE_COLUMNS, &rows, &[])?;
            }
            let fields = [
                "g_sw",
                "omega_bar",
                "t_swap",
                "hold",
                "total_time",
                "fidelity",
                "baseline_fidelity",
                "convergence_change",
            ];
            let values = vec![
                summary.g_sw,
                summary.omega_bar,
                summary.t_swap,
                summary.hold,
                summary.total_time,
                summary.fidelity,
                summary.baseline_fidelity,
                summary.convergence_change.unwrap_or(f64::NAN),
            ];
            writer.csv("summary.csv", &fields, &[Row::Values(values)], &[])?;
        }
        Format::Json => {
            let phases: Vec<_> = result
                .phases
                .iter()
                .map(|p| serde_json::json!({ "name": p.name, "series": p.series }))
                .collect();
            writer.json("swap.json", serde_json::json!({ "summary": summary, "phases": phases }))?;
        }
    }
    Ok(format!(
        "g_sw = {:.6e} Grad/s, t_swap = {:.3} ns, fidelity = {:.6}, baseline = {:.6} at {:.1} ns",
        summary.g_sw, summary.t_swap, summary.fidelity, summary.baseline_fidelity, summary.total_time
    ))
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    tolerance: f64,
    within_tolerance: bool,
    validation: &'a RwaValidation,
}

pub struct ValidationOutcome {
    pub message: String,
    pub within: bool,
}

pub fn validate(resolved: &Resolved, out: &Path, format: Format) -> Result<ValidationOutcome, CliError> {
    let cfg = &resolved.config;
    if cfg.drive.phi_b_static_rad != 0.0 {
        return Err(CliError::Config("validation needs phi_b_static_rad = 0".into()));
    }
    let settings = ValidationSettings {
        fock_dim: cfg.validation.fock_dim,
        window: cfg.validation.window,
        samples: cfg.validation.samples,
        evolve: cfg.numeric.evolve_options(),
    };
    let tolerance = cfg.validation.tolerance;
    let v = validate_rwa(&resolved.params, cfg.drive.phi_b0_rad, cfg.drive.omega_bar_grad_per_s, &settings)?;
    let within = v.within(tolerance);

    let writer = Writer::new(out, "validate", resolved)?;
    match format {
        Format::Csv => {
            let columns = [
                "phi_b0",
                "omega_bar",
                "g_sw",
                "t_swap",
                "rwa_max_population",
                "rwa_transfer_time",
                "lab_max_population",
                "lab_transfer_time",
                "population_deviation",
                "time_deviation",
                "lab_implied_coupling",
                "tolerance",
            ];
            let row = vec![
                v.phi_b0,
                v.omega_bar,
                v.g_sw,
                v.t_swap,
                v.rwa.max_population,
                v.rwa.transfer_time,
                v.lab.max_population,
                v.lab.transfer_time,
                v.population_deviation,
                v.time_deviation,
                v.lab_implied_coupling,
                tolerance,
            ];
            let verdict = format!("within_tolerance = {within}");
            writer.csv("validate.csv", &columns, &[Row::Values(row)], &[verdict])?;
        }
        Format::Json => {
            writer.json(
                "validate.json",
                ValidationReport {
                    tolerance,
                    within_tolerance: within,
                    validation: &v,
                },
            )?;
        }
    }
    let message = format!(
        "peak population rwa {:.5} lab {:.5} (deviation {:.4}); transfer time rwa {:.2} ns lab {:.2} ns (deviation {:.4}); tolerance {tolerance}; lab run {:.1} s",
        v.rwa.max_population,
        v.lab.max_population,
        v.population_deviation,
        v.rwa.transfer_time,
        v.lab.transfer_time,
        v.time_deviation,
        v.lab_runtime
    );
    Ok(ValidationOutcome { message, within })
}
