use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::models::{build_lab_frame_model, build_rwa_model, effective_swap_params};
use crate::circuit::{modulated_coefficients, CircuitParams, FluxDrive};
use crate::dynamics::{evolve, EvolveOptions, LindbladModel, Observable};
use crate::error::{Error, Result};
use crate::hilbert::{basis_ket, make_operators, make_state, Qubit, StateSpec};

/// Peak of the |e,0⟩ → |g,1⟩ transfer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transfer {
    pub max_population: f64,
    pub transfer_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub fock_dim: usize,
    /// Simulated span in units of the predicted swap time.
    pub window: f64,
    pub samples: usize,
    pub evolve: EvolveOptions,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        ValidationSettings {
            fock_dim: 6,
            window: 2.5,
            samples: 2000,
            evolve: EvolveOptions::default(),
        }
    }
}

/// Lab-frame versus rotating-wave comparison of a single swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaValidation {
    pub phi_b0: f64,
    pub omega_bar: f64,
    pub g_sw: f64,
    /// π/(2|g_sw|).
    pub t_swap: f64,
    pub rwa: Transfer,
    pub lab: Transfer,
    /// |P_lab − P_rwa| / P_rwa.
    pub population_deviation: f64,
    /// |t_lab − t_rwa| / t_rwa.
    pub time_deviation: f64,
    /// Exchange rate π/(2·t_lab) implied by the lab-frame transfer time.
    pub lab_implied_coupling: f64,
    /// Wall-clock seconds spent in the lab-frame integration.
    #[serde(skip)]
    pub lab_runtime: f64,
    pub lab_steps: usize,
}

impl RwaValidation {
    pub fn within(&self, tolerance: f64) -> bool {
        self.population_deviation <= tolerance && self.time_deviation <= tolerance
    }
}

/// Simulate one swap from |e,0⟩ in both models and compare their peaks.
/// `omega_bar` defaults to the resonant ω̄_q − ω_m.
pub fn validate_rwa(
    params: &CircuitParams,
    phi_b0: f64,
    omega_bar: Option<f64>,
    settings: &ValidationSettings,
) -> Result<RwaValidation> {
    params.validate()?;
    if !(settings.window > 0.0) {
        return Err(Error::invalid("validation window must be positive"));
    }
    let swap = effective_swap_params(params, phi_b0)?;
    let drive = FluxDrive::modulated(phi_b0, omega_bar.unwrap_or(swap.omega_bar));
    let ops = make_operators(settings.fock_dim)?;
    let span = settings.window * swap.swap_time();

    let rwa_model = build_rwa_model(params, &drive, &ops)?;
    let lab_model = build_lab_frame_model(params, &drive, &ops)?;
    let (rwa, _) = peak_transfer(&rwa_model, settings, span)?;
    let started = Instant::now();
    let (lab, lab_steps) = peak_transfer(&lab_model, settings, span)?;
    let lab_runtime = started.elapsed().as_secs_f64();

    Ok(RwaValidation {
        phi_b0,
        omega_bar: drive.omega_bar,
        g_sw: swap.g_sw,
        t_swap: swap.swap_time(),
        rwa,
        lab,
        population_deviation: (lab.max_population - rwa.max_population).abs() / rwa.max_population,
        time_deviation: (lab.transfer_time - rwa.transfer_time).abs() / rwa.transfer_time,
        lab_implied_coupling: std::f64::consts::FRAC_PI_2 / lab.transfer_time,
        lab_runtime,
        lab_steps,
    })
}

fn peak_transfer(
    model: &LindbladModel,
    settings: &ValidationSettings,
    span: f64,
) -> Result<(Transfer, usize)> {
    let n = settings.fock_dim;
    let rho0 = make_state(&StateSpec::ExcitedFock(0), n)?;
    let target = basis_ket(Qubit::Ground, 1, n)?;
    let options = EvolveOptions {
        samples: settings.samples.max(3),
        ..settings.evolve
    };
    let out = evolve(model, &rho0, (0.0, span), &options, &[Observable::population("p", target)])?;
    let p = out.series.column("p").expect("recorded above");
    let times = &out.series.times;
    let (i, _) = p
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let transfer = if i > 0 && i + 1 < p.len() {
        parabolic_peak(times[i] - times[i - 1], times[i], p[i - 1], p[i], p[i + 1])
    } else {
        Transfer {
            max_population: p[i],
            transfer_time: times[i],
        }
    };
    Ok((transfer, out.steps))
}

/// Vertex of the parabola through three equally spaced samples.
fn parabolic_peak(h: f64, t_mid: f64, left: f64, mid: f64, right: f64) -> Transfer {
    let curvature = left - 2.0 * mid + right;
    if curvature >= 0.0 {
        return Transfer {
            max_population: mid,
            transfer_time: t_mid,
        };
    }
    let offset = 0.5 * (left - right) / curvature;
    Transfer {
        max_population: mid - 0.25 * (left - right) * offset,
        transfer_time: t_mid + offset * h,
    }
}

/// Fourier content of the ⟨e,0|H_I(t)|g,1⟩ matrix element in the frame
/// rotating with the instantaneous qubit and mechanical frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSpectrum {
    pub omega_bar: f64,
    /// (k, amplitude of the component at k·ω̄).
    pub harmonics: Vec<(i32, Complex64)>,
}

impl SidebandSpectrum {
    pub fn amplitude(&self, k: i32) -> Option<Complex64> {
        self.harmonics.iter().find(|(j, _)| *j == k).map(|(_, a)| *a)
    }

    /// Magnitude of the resonant (k = 0) exchange term.
    pub fn resonant_coupling(&self) -> f64 {
        self.amplitude(0).map_or(0.0, |a| a.norm())
    }
}

/// Sample the interaction-picture exchange element over `periods` drive
/// periods and project it onto harmonics −K..=K of ω̄.
pub fn sideband_spectrum(
    params: &CircuitParams,
    drive: &FluxDrive,
    periods: usize,
    points_per_period: usize,
    max_harmonic: i32,
) -> Result<SidebandSpectrum> {
    drive.validate()?;
    if drive.omega_bar <= 0.0 || periods == 0 || points_per_period < 4 {
        return Err(Error::invalid("spectrum needs a positive drive frequency and sampling"));
    }
    let m = periods * points_per_period;
    let h = TAU / drive.omega_bar / points_per_period as f64;
    let mut element = Vec::with_capacity(m);
    let mut phase = 0.0;
    let mut previous = modulated_coefficients(params, drive, 0.0)?;
    element.push(Complex64::new(previous.g1, 0.0));
    for j in 1..m {
        let now = modulated_coefficients(params, drive, h * j as f64)?;
        let detuning = |s: &crate::circuit::CouplingSet| s.omega_q - s.omega_m;
        phase += 0.5 * h * (detuning(&previous) + detuning(&now));
        element.push(Complex64::from_polar(now.g1, phase));
        previous = now;
    }
    let harmonics = (-max_harmonic..=max_harmonic)
        .map(|k| {
            let sum: Complex64 = element
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -(k as f64) * drive.omega_bar * h * j as f64))
                .sum();
            (k, sum / m as f64)
        })
        .collect();
    Ok(SidebandSpectrum {
        omega_bar: drive.omega_bar,
        harmonics,
    })
}
