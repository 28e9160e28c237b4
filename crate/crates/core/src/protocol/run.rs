use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::models::{
    build_hold_model, build_lab_frame_model, build_rwa_model, effective_swap_params, ModelKind,
};
use crate::circuit::{coupling_set, CircuitParams, FluxDrive};
use crate::dynamics::{
    evolve, thermal_collapses, thermal_occupation, EvolveOptions, Hamiltonian, LindbladModel,
    Method, Observable, TimeSeries,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    basis_ket, make_operators, make_state, pauli, CMatrix, CVector, DensityMatrix, OperatorSet,
    Qubit, StateSpec,
};

/// A swap phase: drive and duration in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub drive: FluxDrive,
    pub duration: f64,
}

/// Swap in, hold at zero flux, swap out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub swap_in: PhaseSpec,
    pub hold: f64,
    pub swap_out: PhaseSpec,
    pub model: ModelKind,
    /// Keep the dispersive g2 term during the hold.
    pub retain_g2_in_hold: bool,
}

impl ProtocolSchedule {
    /// Resonant drive at amplitude `phi_b0` with π/(2|g_sw|) swaps.
    pub fn resonant(params: &CircuitParams, phi_b0: f64, hold: f64, model: ModelKind) -> Result<Self> {
        let swap = effective_swap_params(params, phi_b0)?;
        let phase = PhaseSpec {
            drive: FluxDrive::modulated(phi_b0, swap.omega_bar),
            duration: swap.swap_time(),
        };
        Ok(ProtocolSchedule {
            swap_in: phase,
            hold,
            swap_out: phase,
            model,
            retain_g2_in_hold: true,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, phase) in [("swap_in", &self.swap_in), ("swap_out", &self.swap_out)] {
            phase.drive.validate()?;
            if !(phase.duration.is_finite() && phase.duration > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} duration must be positive, got {}",
                    phase.duration
                )));
            }
        }
        if !(self.hold.is_finite() && self.hold >= 0.0) {
            return Err(Error::invalid(format!("hold duration must be non-negative, got {}", self.hold)));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.swap_in.duration + self.hold + self.swap_out.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSettings {
    pub fock_dim: usize,
    pub evolve: EvolveOptions,
    /// Repeat at `fock_dim + 5` levels and require agreement to 10⁻⁶.
    pub check_convergence: bool,
}

impl Default for ProtocolSettings {
    fn default() -> Self {
        ProtocolSettings {
            fock_dim: 10,
            evolve: EvolveOptions::default(),
            check_convergence: false,
        }
    }
}

/// Largest observable change accepted when raising the Fock truncation.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub name: String,
    /// Columns sz, n_mech, trace, purity, fidelity; time restarts at zero.
    pub series: TimeSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub phases: Vec<PhaseResult>,
    /// Exchange rate of the swap-in drive, Grad/s.
    pub g_sw: f64,
    pub omega_bar: f64,
    pub t_swap: f64,
    /// Excited-state population of the final qubit reduced state.
    pub fidelity: f64,
    /// Free-decay fidelity of an idle qubit at the same total time.
    pub baseline_fidelity: f64,
    pub total_time: f64,
    /// Largest observable change at `fock_dim + 5`, when checked.
    pub convergence_change: Option<f64>,
}

impl ProtocolResult {
    pub fn phase(&self, name: &str) -> Option<&PhaseResult> {
        self.phases.iter().find(|p| p.name == name)
    }
}

/// Population ⟨ψ|ρ|ψ⟩ clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, target: &CVector) -> Result<f64> {
    if target.len() != rho.dim() {
        return Err(Error::invalid(format!(
            "target of dimension {} for state of dimension {}",
            target.len(),
            rho.dim()
        )));
    }
    let value = (target.adjoint() * rho.matrix() * target)[(0, 0)].re;
    Ok(value.clamp(0.0, 1.0))
}

fn phase_observables(ops: &OperatorSet, target: CVector) -> Vec<Observable> {
    vec![
        Observable::expectation("sz", ops.sz.clone()),
        Observable::expectation("n_mech", ops.num.clone()),
        Observable::trace(),
        Observable::purity(),
        Observable::population("fidelity", target),
    ]
}

fn clamp_fidelity(series: &mut TimeSeries) {
    if let Some(i) = series.names.iter().position(|n| n == "fidelity") {
        for v in &mut series.columns[i] {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

fn run_once(
    params: &CircuitParams,
    schedule: &ProtocolSchedule,
    rho0: Option<&DensityMatrix>,
    settings: &ProtocolSettings,
    fock_dim: usize,
) -> Result<(Vec<PhaseResult>, f64)> {
    let ops = make_operators(fock_dim)?;
    let excited_vacuum = basis_ket(Qubit::Excited, 0, fock_dim)?;
    let ground_one = basis_ket(Qubit::Ground, 1, fock_dim)?;
    let mut rho = match rho0 {
        Some(r) => r.clone(),
        None => make_state(&StateSpec::ExcitedFock(0), fock_dim)?,
    };
    if rho.dim() != ops.dim {
        return Err(Error::invalid(format!(
            "initial state of dimension {} for {fock_dim} Fock levels",
            rho.dim()
        )));
    }

    let swap_model = |phase: &PhaseSpec| -> Result<LindbladModel> {
        match schedule.model {
            ModelKind::LabFrame => build_lab_frame_model(params, &phase.drive, &ops),
            ModelKind::RwaEffective => build_rwa_model(params, &phase.drive, &ops),
        }
    };
    let hold_model = build_hold_model(
        params,
        schedule.model,
        schedule.swap_in.drive.phi_b0,
        schedule.retain_g2_in_hold,
        &ops,
    )?;
    let hold_options = EvolveOptions {
        method: match settings.evolve.method {
            Method::Auto => Method::Lawson,
            m => m,
        },
        ..settings.evolve
    };

    let plan: [(&str, LindbladModel, f64, CVector, EvolveOptions); 3] = [
        ("swap_in", swap_model(&schedule.swap_in)?, schedule.swap_in.duration, ground_one.clone(), settings.evolve),
        ("hold", hold_model, schedule.hold, ground_one, hold_options),
        ("swap_out", swap_model(&schedule.swap_out)?, schedule.swap_out.duration, excited_vacuum, settings.evolve),
    ];

    let mut phases = Vec::with_capacity(3);
    for (name, model, duration, target, options) in plan {
        let observables = phase_observables(&ops, target);
        let mut out = evolve(&model, &rho, (0.0, duration), &options, &observables)
            .map_err(|e| e.in_phase(name))?;
        clamp_fidelity(&mut out.series);
        rho = out.final_state;
        phases.push(PhaseResult {
            name: name.to_string(),
            series: out.series,
        });
    }
    let projector = qubit_excited_projector(&ops);
    let end_to_end = crate::hilbert::expectation(&rho, &projector)?.re.clamp(0.0, 1.0);
    Ok((phases, end_to_end))
}

fn qubit_excited_projector(ops: &OperatorSet) -> CMatrix {
    (&ops.identity + &ops.sz) * Complex64::new(0.5, 0.0)
}

/// Run swap-in, hold and swap-out from `rho0` (default |e,0⟩).
pub fn run_swap_protocol(
    params: &CircuitParams,
    schedule: &ProtocolSchedule,
    rho0: Option<&DensityMatrix>,
    settings: &ProtocolSettings,
) -> Result<ProtocolResult> {
    params.validate()?;
    schedule.validate()?;
    let (phases, fidelity) = run_once(params, schedule, rho0, settings, settings.fock_dim)?;

    let convergence_change = if settings.check_convergence {
        if rho0.is_some() {
            return Err(Error::Unsupported(
                "convergence check needs the default initial state".to_string(),
            ));
        }
        let larger = settings.fock_dim + 5;
        let (phases_big, fidelity_big) = run_once(params, schedule, None, settings, larger)?;
        let mut change = (fidelity - fidelity_big).abs();
        for (a, b) in phases.iter().zip(&phases_big) {
            for name in ["sz", "n_mech", "fidelity"] {
                let (x, y) = (a.series.last(name), b.series.last(name));
                if let (Some(x), Some(y)) = (x, y) {
                    change = change.max((x - y).abs());
                }
            }
        }
        if change > CONVERGENCE_THRESHOLD {
            return Err(Error::NotConverged {
                from: settings.fock_dim,
                to: larger,
                change,
            });
        }
        Some(change)
    } else {
        None
    };

    let total_time = schedule.total_time();
    let baseline = free_decay_baseline(params, total_time, 1)?;
    let swap = effective_swap_params(params, schedule.swap_in.drive.phi_b0).ok();
    Ok(ProtocolResult {
        phases,
        g_sw: swap.map_or(f64::NAN, |s| s.g_sw),
        omega_bar: schedule.swap_in.drive.omega_bar,
        t_swap: schedule.swap_in.duration,
        fidelity,
        baseline_fidelity: baseline.last("fidelity").unwrap_or(f64::NAN),
        total_time,
        convergence_change,
    })
}

/// Idle qubit decaying from |σ_z = +1⟩ under γ_σ and its thermal occupation.
/// Columns sz and fidelity.
pub fn free_decay_baseline(params: &CircuitParams, total_time: f64, samples: usize) -> Result<TimeSeries> {
    if !(total_time.is_finite() && total_time >= 0.0) {
        return Err(Error::invalid(format!("total time must be non-negative, got {total_time}")));
    }
    let omega_q = coupling_set(params, 0.0)?.omega_q;
    let n_q = thermal_occupation(omega_q, params.temperature)?;
    let collapses = thermal_collapses(&pauli::lowering(), &pauli::raising(), params.gamma_q, n_q)?;
    let model = LindbladModel::new(Hamiltonian::Static(CMatrix::zeros(2, 2)), collapses)?;
    let excited = CVector::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let rho0 = DensityMatrix::pure(&excited)?;
    let observables = [
        Observable::expectation("sz", pauli::z()),
        Observable::population("fidelity", excited),
    ];
    let options = EvolveOptions {
        samples: samples.max(1),
        method: Method::Lawson,
        ..EvolveOptions::default()
    };
    let mut out = evolve(&model, &rho0, (0.0, total_time), &options, &observables)?;
    clamp_fidelity(&mut out.series);
    Ok(out.series)
}

/// Protocol and baseline fidelity at one hold time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryPoint {
    pub hold: f64,
    pub protocol: f64,
    pub baseline: f64,
}

/// Compare the round-trip fidelity with free decay over a set of hold times.
pub fn memory_advantage_scan(
    params: &CircuitParams,
    phi_b0: f64,
    holds: &[f64],
    model: ModelKind,
    settings: &ProtocolSettings,
) -> Result<Vec<MemoryPoint>> {
    holds
        .iter()
        .map(|&hold| {
            let schedule = ProtocolSchedule::resonant(params, phi_b0, hold, model)?;
            let r = run_swap_protocol(params, &schedule, None, settings)?;
            Ok(MemoryPoint {
                hold,
                protocol: r.fidelity,
                baseline: r.baseline_fidelity,
            })
        })
        .collect()
}

/// Hold time where the protocol first beats free decay, linearly
/// interpolated between scan points.
pub fn memory_crossover(points: &[MemoryPoint]) -> Option<f64> {
    let margin = |p: &MemoryPoint| p.protocol - p.baseline;
    if let Some(first) = points.first() {
        if margin(first) > 0.0 {
            return Some(first.hold);
        }
    }
    points.windows(2).find_map(|w| {
        let (a, b) = (margin(&w[0]), margin(&w[1]));
        (a <= 0.0 && b > 0.0).then(|| w[0].hold + (w[1].hold - w[0].hold) * (-a) / (b - a))
    })
}
