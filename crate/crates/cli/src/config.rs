//! Run configuration. Every key carries its unit; unknown keys are rejected.
//!
//! Frequencies, energies and rates written `_grad_per_s` are angular, in
//! 10⁹ rad/s. Keys ending in `_khz` mean 10³ rad/s.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shuttle_core::circuit::{xi_from_tunneling, Capacitances, CircuitParams, FluxDrive};
use shuttle_core::dynamics::{EvolveOptions, Method};
use shuttle_core::protocol::{effective_swap_params, ModelKind, PhaseSpec, ProtocolSchedule};
use shuttle_core::units::khz_to_grad;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub e_j1_grad_per_s: f64,
    pub e_j2_grad_per_s: f64,
    /// Ignored when `capacitances` is present.
    pub e_c_grad_per_s: Option<f64>,
    pub capacitances: Option<CapacitanceConfig>,
    pub x0_m: f64,
    pub xi_m: Option<f64>,
    pub tunneling: Option<TunnelingConfig>,
    pub x_zpf_m: Option<f64>,
    pub mass_kg: Option<f64>,
    pub omega_m0_grad_per_s: f64,
    #[serde(default)]
    pub n_g: f64,
    pub gamma_m_grad_per_s: Option<f64>,
    pub gamma_m_khz: Option<f64>,
    pub gamma_q_grad_per_s: Option<f64>,
    pub gamma_q_khz: Option<f64>,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitanceConfig {
    pub c_j_f: f64,
    pub c_b_f: f64,
    pub c_g_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunnelingConfig {
    pub gap_grad_per_s: f64,
    pub r_n0_ohm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default)]
    pub phi_b_static_rad: f64,
    pub phi_b0_rad: f64,
    /// Absent means ω̄ = ω̄_q − ω_m.
    pub omega_bar_grad_per_s: Option<f64>,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            phi_b_static_rad: 0.0,
            phi_b0_rad: 0.5,
            omega_bar_grad_per_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    /// Absent means π/(2|g_sw|).
    pub swap_in_ns: Option<f64>,
    pub hold_ns: f64,
    pub swap_out_ns: Option<f64>,
    pub model_kind: ModelKind,
    pub retain_g2_in_hold: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            swap_in_ns: None,
            hold_ns: 0.0,
            swap_out_ns: None,
            model_kind: ModelKind::LabFrame,
            retain_g2_in_hold: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Auto,
    Rk4,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub fock_dim: usize,
    pub integrator: Integrator,
    /// Step ceiling for the fixed-step integrators.
    pub dt_ns: Option<f64>,
    /// Absolute tolerance of the adaptive integrator.
    pub atol: f64,
    pub samples: usize,
    pub check_convergence: bool,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            fock_dim: 10,
            integrator: Integrator::Auto,
            dt_ns: None,
            atol: 1e-9,
            samples: 500,
            check_convergence: false,
        }
    }
}

impl NumericConfig {
    pub fn evolve_options(&self) -> EvolveOptions {
        let method = match self.integrator {
            Integrator::Auto => Method::Auto,
            Integrator::Rk4 => Method::Rk4,
            Integrator::Adaptive => Method::DormandPrince {
                atol: self.atol,
                rtol: 0.0,
            },
        };
        EvolveOptions {
            dt: self.dt_ns,
            method,
            samples: self.samples,
            ..EvolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub phi_start_rad: f64,
    pub phi_stop_rad: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            phi_start_rad: -3.0,
            phi_stop_rad: 3.0,
            points: 121,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationConfig {
    /// Largest accepted relative deviation.
    pub tolerance: f64,
    pub fock_dim: usize,
    /// Simulated span in predicted swap times.
    pub window: f64,
    pub samples: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            tolerance: 0.05,
            fock_dim: 6,
            window: 2.5,
            samples: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
}

fn one_of(a: Option<f64>, b: Option<f64>, names: [&str; 2]) -> Result<Option<f64>, CliError> {
    match (a, b) {
        (Some(_), Some(_)) => Err(CliError::Config(format!(
            "give only one of `{}` and `{}`",
            names[0], names[1]
        ))),
        (x, y) => Ok(x.or(y)),
    }
}

impl CircuitConfig {
    pub fn to_params(&self) -> Result<CircuitParams, CliError> {
        let xi = match (self.xi_m, self.tunneling) {
            (Some(xi), _) => xi,
            (None, Some(t)) => xi_from_tunneling(self.x0_m, t.gap_grad_per_s, self.e_j1_grad_per_s, t.r_n0_ohm)?,
            (None, None) => {
                return Err(CliError::Config("missing field `xi_m` (or a `tunneling` table)".into()))
            }
        };
        let gamma_m = one_of(
            self.gamma_m_grad_per_s,
            self.gamma_m_khz.map(khz_to_grad),
            ["gamma_m_grad_per_s", "gamma_m_khz"],
        )?
        .ok_or_else(|| CliError::Config("missing field `gamma_m_grad_per_s` or `gamma_m_khz`".into()))?;
        let gamma_q = one_of(
            self.gamma_q_grad_per_s,
            self.gamma_q_khz.map(khz_to_grad),
            ["gamma_q_grad_per_s", "gamma_q_khz"],
        )?
        .ok_or_else(|| CliError::Config("missing field `gamma_q_grad_per_s` or `gamma_q_khz`".into()))?;

        let e_c = match (self.e_c_grad_per_s, self.capacitances) {
            (Some(e_c), _) => e_c,
            (None, Some(_)) => f64::NAN,
            (None, None) => {
                return Err(CliError::Config(
                    "missing field `e_c_grad_per_s` (or a `capacitances` table)".into(),
                ))
            }
        };
        let mut params = CircuitParams {
            e_j1: self.e_j1_grad_per_s,
            e_j2: self.e_j2_grad_per_s,
            e_c,
            capacitances: None,
            x0: self.x0_m,
            xi,
            mass: f64::NAN,
            omega_m0: self.omega_m0_grad_per_s,
            x_zpf: f64::NAN,
            n_g: self.n_g,
            gamma_m,
            gamma_q,
            temperature: self.temperature_k,
        };
        if let Some(c) = self.capacitances {
            params = params.with_capacitances(Capacitances {
                c_j: c.c_j_f,
                c_b: c.c_b_f,
                c_g: c.c_g_f,
            });
        }
        params = match (self.x_zpf_m, self.mass_kg) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give only one of `x_zpf_m` and `mass_kg`".into()))
            }
            (Some(x_zpf), None) => CircuitParams {
                x_zpf,
                mass: shuttle_core::circuit::mass_for_zpf(x_zpf, self.omega_m0_grad_per_s),
                ..params
            },
            (None, Some(mass)) => params.with_mass(mass),
            (None, None) => return Err(CliError::Config("missing field `x_zpf_m` or `mass_kg`".into())),
        };
        Ok(params)
    }
}

/// Everything a run needs, with automatic values filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub config: RunConfig,
    pub params: CircuitParams,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        Ok(Resolved {
            config: self.clone(),
            params: self.circuit.to_params()?,
        })
    }
}

impl Resolved {
    pub fn omega_bar(&self) -> Result<f64, CliError> {
        match self.config.drive.omega_bar_grad_per_s {
            Some(w) => Ok(w),
            None => Ok(effective_swap_params(&self.params, self.config.drive.phi_b0_rad)?.omega_bar),
        }
    }

    pub fn drive(&self) -> Result<FluxDrive, CliError> {
        let d = &self.config.drive;
        Ok(FluxDrive {
            phi_b_static: d.phi_b_static_rad,
            phi_b0: d.phi_b0_rad,
            omega_bar: self.omega_bar()?,
        })
    }

    pub fn schedule(&self) -> Result<ProtocolSchedule, CliError> {
        let s = &self.config.schedule;
        let drive = self.drive()?;
        let default_swap = effective_swap_params(&self.params, drive.phi_b0)?.swap_time();
        Ok(ProtocolSchedule {
            swap_in: PhaseSpec {
                drive,
                duration: s.swap_in_ns.unwrap_or(default_swap),
            },
            hold: s.hold_ns,
            swap_out: PhaseSpec {
                drive,
                duration: s.swap_out_ns.unwrap_or(default_swap),
            },
            model: s.model_kind,
            retain_g2_in_hold: s.retain_g2_in_hold,
        })
    }
}
