use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    approx_drive_params, coupling_set, modulated_coefficients, CircuitParams, CouplingSet,
    FluxDrive,
};
use crate::dynamics::{thermal_collapses, thermal_occupation, Collapse, Hamiltonian, LindbladModel};
use crate::error::{Error, Result};
use crate::hilbert::{axpy, CMatrix, OperatorSet};
use crate::special::bessel_j0;

/// Which Hamiltonian drives the swap phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Exact time-dependent coefficients in the laboratory frame.
    LabFrame,
    /// Time-independent sideband exchange after the rotating-wave approximation.
    RwaEffective,
}

/// Drive frequency and exchange rate of the flux-modulated sideband.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapParams {
    pub phi_b0: f64,
    /// ω̄ = ω̄_q − ω_m.
    pub omega_bar: f64,
    /// g_sw = ḡ1·J0(δ_q/(2ω̄)).
    pub g_sw: f64,
    pub g1_bar: f64,
    pub delta_q: f64,
    pub omega_q_bar: f64,
    pub omega_m: f64,
    /// δ_q/(2ω̄).
    pub bessel_argument: f64,
}

impl SwapParams {
    /// Duration π/(2|g_sw|) of a complete |e,0⟩ → |g,1⟩ transfer.
    pub fn swap_time(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.g_sw.abs()
    }
}

pub fn effective_swap_params(params: &CircuitParams, phi_b0: f64) -> Result<SwapParams> {
    if !(phi_b0 > 0.0 && phi_b0 < std::f64::consts::PI) {
        return Err(Error::domain(format!("drive amplitude {phi_b0} outside (0, pi)")));
    }
    let expansion = approx_drive_params(params, phi_b0)?;
    let omega_m = coupling_set(params, 0.0)?.omega_m;
    let omega_bar = expansion.omega_q_bar - omega_m;
    if !(omega_bar > 0.0) {
        return Err(Error::Configuration(format!(
            "drive frequency non-positive (omega_bar = {omega_bar})"
        )));
    }
    let bessel_argument = expansion.delta_q / (2.0 * omega_bar);
    Ok(SwapParams {
        phi_b0,
        omega_bar,
        g_sw: expansion.g1_bar * bessel_j0(bessel_argument),
        g1_bar: expansion.g1_bar,
        delta_q: expansion.delta_q,
        omega_q_bar: expansion.omega_q_bar,
        omega_m,
        bessel_argument,
    })
}

/// Thermal qubit and mechanical dissipators at the idle operating point.
pub fn environment(params: &CircuitParams, ops: &OperatorSet) -> Result<Vec<Collapse>> {
    let idle = coupling_set(params, 0.0)?;
    let n_q = thermal_occupation(idle.omega_q, params.temperature)?;
    let n_m = thermal_occupation(idle.omega_m, params.temperature)?;
    let mut collapses = thermal_collapses(&ops.sm, &ops.sp, params.gamma_q, n_q)?;
    collapses.extend(thermal_collapses(&ops.b, &ops.b_dag, params.gamma_m, n_m)?);
    Ok(collapses)
}

/// Operators multiplying, in order, ω_q, ω_m, g1, g2, g01, g21,
/// g10 + 3·g30 and g12 + 3·g32.
pub fn lab_frame_terms(ops: &OperatorSet) -> Vec<CMatrix> {
    let x = &ops.position;
    let x2 = x * x;
    vec![
        &ops.sz * Complex64::new(0.5, 0.0),
        ops.num.clone(),
        x * &ops.sx,
        &x2 * &ops.sz,
        x.clone(),
        x * &ops.sz,
        ops.sx.clone(),
        &x2 * &ops.sx,
    ]
}

/// Coefficients matching [`lab_frame_terms`].
pub fn lab_frame_coefficients(set: &CouplingSet) -> Vec<f64> {
    vec![
        set.omega_q,
        set.omega_m,
        set.g1,
        set.g2,
        set.force_const,
        set.drive_sz_linear,
        set.sx_offset,
        set.sx_quadratic,
    ]
}

fn combine(terms: &[CMatrix], coefficients: &[f64]) -> CMatrix {
    let d = terms[0].nrows();
    let mut h = CMatrix::zeros(d, d);
    for (c, op) in coefficients.iter().zip(terms) {
        axpy(&mut h, Complex64::new(*c, 0.0), op, Complex64::new(1.0, 0.0));
    }
    h
}

/// Samples per drive period used to bound the lab-frame spectrum.
const SPECTRUM_SAMPLES: usize = 32;

/// Lab-frame model with exact modulated coefficients.
pub fn build_lab_frame_model(
    params: &CircuitParams,
    drive: &FluxDrive,
    ops: &OperatorSet,
) -> Result<LindbladModel> {
    drive.validate()?;
    let terms = lab_frame_terms(ops);
    let collapses = environment(params, ops)?;
    if drive.is_idle() {
        let set = coupling_set(params, drive.phi_b_static)?;
        let h = combine(&terms, &lab_frame_coefficients(&set));
        return LindbladModel::new(Hamiltonian::Static(h), collapses);
    }

    let period = TAU / drive.omega_bar.max(f64::MIN_POSITIVE);
    let mut bound = 2.0 * drive.omega_bar;
    for k in 0..SPECTRUM_SAMPLES {
        let t = period * k as f64 / SPECTRUM_SAMPLES as f64;
        let set = modulated_coefficients(params, drive, t)?;
        let h = combine(&terms, &lab_frame_coefficients(&set));
        bound = bound.max(crate::dynamics::spectral_width(&h));
    }
    let params = params.clone();
    let drive = *drive;
    let coefficients = Box::new(move |t: f64| {
        modulated_coefficients(&params, &drive, t).map(|s| lab_frame_coefficients(&s))
    });
    Ok(
        LindbladModel::new(Hamiltonian::Driven { terms, coefficients }, collapses)?
            .with_frequency_bound(bound),
    )
}

/// Rotating-frame exchange model g_sw(b†σ_− + bσ_+) + (Δ/2)σ_z, where Δ is
/// the drive's detuning from ω̄_q − ω_m (zero for the automatic ω̄).
pub fn build_rwa_model(
    params: &CircuitParams,
    drive: &FluxDrive,
    ops: &OperatorSet,
) -> Result<LindbladModel> {
    drive.validate()?;
    if drive.phi_b_static != 0.0 {
        return Err(Error::Unsupported(
            "the rotating-wave model is expanded around zero static flux".to_string(),
        ));
    }
    let swap = effective_swap_params(params, drive.phi_b0)?;
    let detuning = swap.omega_bar - drive.omega_bar;
    let exchange = (&ops.b_dag * &ops.sm + &ops.b * &ops.sp) * Complex64::new(swap.g_sw, 0.0);
    let h = exchange + &ops.sz * Complex64::new(0.5 * detuning, 0.0);
    LindbladModel::new(Hamiltonian::Static(h), environment(params, ops)?)
}

/// Idle-flux model between swaps.
///
/// In the rotating frame of a swap driven at amplitude `phi_b0`, the qubit is
/// detuned by δ_q and the dispersive term averages to g2·(2b†b + 1)σ_z. The
/// lab-frame variant keeps (b† + b)²σ_z unaveraged.
pub fn build_hold_model(
    params: &CircuitParams,
    kind: ModelKind,
    phi_b0: f64,
    retain_g2: bool,
    ops: &OperatorSet,
) -> Result<LindbladModel> {
    let idle = coupling_set(params, 0.0)?;
    let g2 = if retain_g2 { idle.g2 } else { 0.0 };
    let h = match kind {
        ModelKind::LabFrame => {
            let mut c = lab_frame_coefficients(&idle);
            c[3] = g2;
            combine(&lab_frame_terms(ops), &c)
        }
        ModelKind::RwaEffective => {
            let delta_q = if phi_b0 > 0.0 {
                effective_swap_params(params, phi_b0)?.delta_q
            } else {
                0.0
            };
            let dispersive = (&ops.num * Complex64::new(2.0, 0.0) + &ops.identity) * &ops.sz;
            &ops.sz * Complex64::new(0.5 * delta_q, 0.0) + dispersive * Complex64::new(g2, 0.0)
        }
    };
    LindbladModel::new(Hamiltonian::Static(h), environment(params, ops)?)
}
