use std::f64::consts::TAU;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{Hamiltonian, LindbladModel, RhsKernel};
use crate::error::{Error, Result};
use crate::hilbert::{axpy, max_abs, trace_of_product, CMatrix, CVector, DensityMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Trace drift that aborts integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Most negative eigenvalue tolerated at sample points.
pub const NEGATIVITY_LIMIT: f64 = -1e-6;
/// Steps per period of the fastest frequency in the model.
pub const STEPS_PER_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    /// Lawson for static Hamiltonians that commute with every L†L,
    /// classical RK4 otherwise.
    Auto,
    Rk4,
    /// Integrating-factor RK4: the unitary part is propagated exactly.
    /// Requires a static Hamiltonian.
    Lawson,
    /// Adaptive Dormand–Prince 5(4).
    DormandPrince { atol: f64, rtol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Upper bound on the step; the integrator never exceeds
    /// 2π/(50·ω_max) either.
    pub dt: Option<f64>,
    pub method: Method,
    /// Number of sample intervals; observables are recorded at both ends.
    pub samples: usize,
    /// Lawson steps may be this many times the base step.
    pub static_step_factor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: None,
            method: Method::Auto,
            samples: 500,
            static_step_factor: 1.0e3,
        }
    }
}

impl EvolveOptions {
    pub fn adaptive() -> Self {
        EvolveOptions {
            method: Method::DormandPrince {
                atol: 1e-9,
                rtol: 0.0,
            },
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservableKind {
    /// Re tr(ρ·O).
    Expectation(CMatrix),
    /// ⟨ψ|ρ|ψ⟩.
    Population(CVector),
    Trace,
    Purity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub name: String,
    pub kind: ObservableKind,
}

impl Observable {
    pub fn expectation(name: &str, op: CMatrix) -> Self {
        Observable {
            name: name.to_string(),
            kind: ObservableKind::Expectation(op),
        }
    }

    pub fn population(name: &str, ket: CVector) -> Self {
        Observable {
            name: name.to_string(),
            kind: ObservableKind::Population(ket),
        }
    }

    pub fn trace() -> Self {
        Observable {
            name: "trace".to_string(),
            kind: ObservableKind::Trace,
        }
    }

    pub fn purity() -> Self {
        Observable {
            name: "purity".to_string(),
            kind: ObservableKind::Purity,
        }
    }

    pub fn evaluate(&self, rho: &CMatrix) -> f64 {
        match &self.kind {
            ObservableKind::Expectation(op) => trace_of_product(rho, op).re,
            ObservableKind::Population(psi) => (psi.adjoint() * rho * psi)[(0, 0)].re,
            ObservableKind::Trace => rho.trace().re,
            ObservableKind::Purity => rho.iter().map(|z| z.norm_sqr()).sum(),
        }
    }
}

/// Sampled observables, one column per name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(names: Vec<String>) -> Self {
        let columns = vec![Vec::new(); names.len()];
        TimeSeries {
            times: Vec::new(),
            names,
            columns,
        }
    }

    pub fn push(&mut self, t: f64, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.times.push(t);
        for (col, v) in self.columns.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.last().copied())
    }

    /// Row `i` as (time, values).
    pub fn row(&self, i: usize) -> (f64, Vec<f64>) {
        (self.times[i], self.columns.iter().map(|c| c[i]).collect())
    }

    /// Append `other` with its times shifted by `offset`, skipping its first
    /// row when it coincides with this series' last time.
    pub fn extend_shifted(&mut self, other: &TimeSeries, offset: f64) {
        for i in 0..other.len() {
            let (t, row) = other.row(i);
            let t = t + offset;
            if self.times.last().is_some_and(|&last| t <= last) {
                continue;
            }
            self.push(t, &row);
        }
    }
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: TimeSeries,
    pub final_state: DensityMatrix,
    pub steps: usize,
    pub method: Method,
}

/// Integrate the master equation over `t_span`, recording `observables` at
/// `options.samples + 1` evenly spaced times.
pub fn evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_span: (f64, f64),
    options: &EvolveOptions,
    observables: &[Observable],
) -> Result<Evolution> {
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::invalid(format!("time span ({t0}, {t1}) must be increasing")));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::invalid(format!(
            "state dimension {} does not match model dimension {}",
            rho0.dim(),
            model.dim()
        )));
    }
    if let Some(dt) = options.dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
    }
    for obs in observables {
        let ok = match &obs.kind {
            ObservableKind::Expectation(op) => op.shape() == (model.dim(), model.dim()),
            ObservableKind::Population(psi) => psi.len() == model.dim(),
            _ => true,
        };
        if !ok {
            return Err(Error::invalid(format!("observable '{}' has the wrong dimension", obs.name)));
        }
    }

    let method = match options.method {
        Method::Auto if model.commutes_with_dissipators() => Method::Lawson,
        Method::Auto => Method::Rk4,
        Method::Lawson if !model.hamiltonian().is_static() => {
            return Err(Error::invalid("Lawson stepping needs a static Hamiltonian"))
        }
        m => m,
    };

    let base = base_step(model, options.dt);
    let samples = options.samples.max(1);
    let interval = (t1 - t0) / samples as f64;

    let mut stepper: Box<dyn Stepper + '_> = match method {
        Method::Rk4 => Box::new(Rk4::new(model, base)?),
        Method::Lawson => {
            let dissipative = model.dissipative_rate();
            let limit = if dissipative > 0.0 {
                TAU / (STEPS_PER_PERIOD * dissipative)
            } else {
                f64::INFINITY
            };
            Box::new(Lawson::new(model, (base * options.static_step_factor).min(limit))?)
        }
        Method::DormandPrince { atol, rtol } => {
            if !(atol > 0.0 && rtol >= 0.0) {
                return Err(Error::invalid("adaptive tolerances must be positive"));
            }
            Box::new(DormandPrince::new(model, base, atol, rtol)?)
        }
        Method::Auto => unreachable!("resolved above"),
    };

    let names = observables.iter().map(|o| o.name.clone()).collect();
    let mut series = TimeSeries::new(names);
    let mut rho = rho0.matrix().clone();
    let record = |series: &mut TimeSeries, t: f64, rho: &CMatrix| {
        let row: Vec<f64> = observables.iter().map(|o| o.evaluate(rho)).collect();
        series.push(t, &row);
    };
    record(&mut series, t0, &rho);

    let mut steps = 0;
    if t1 > t0 {
        for k in 0..samples {
            let start = t0 + interval * k as f64;
            let end = if k + 1 == samples {
                t1
            } else {
                t0 + interval * (k + 1) as f64
            };
            steps += stepper.advance(&mut rho, start, end)?;
            let min = DensityMatrix::from_matrix_unchecked(rho.clone()).min_eigenvalue();
            if min < NEGATIVITY_LIMIT {
                return Err(Error::Integration {
                    time: end,
                    reason: format!("state lost positivity (eigenvalue {min:e})"),
                    phase: None,
                });
            }
            record(&mut series, end, &rho);
        }
    }

    Ok(Evolution {
        series,
        final_state: DensityMatrix::from_matrix_unchecked(rho),
        steps,
        method,
    })
}

/// min(user step, 2π/(50·ω_max)).
fn base_step(model: &LindbladModel, dt: Option<f64>) -> f64 {
    let omega = model.frequency_bound();
    let resolved = if omega > 0.0 {
        TAU / (STEPS_PER_PERIOD * omega)
    } else {
        f64::INFINITY
    };
    dt.map_or(resolved, |dt| dt.min(resolved))
}

fn hermitize(m: &mut CMatrix) {
    let d = m.nrows();
    for i in 0..d {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..d {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn check_trace(rho: &CMatrix, t: f64) -> Result<()> {
    let drift = (rho.trace().re - 1.0).abs();
    if !(drift <= TRACE_DRIFT_LIMIT) {
        return Err(Error::Integration {
            time: t,
            reason: format!("trace drifted by {drift:e}"),
            phase: None,
        });
    }
    Ok(())
}

/// Number of equal steps of at most `h` covering `span`.
fn step_count(span: f64, h: f64) -> usize {
    if !h.is_finite() {
        return 1;
    }
    ((span / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

trait Stepper {
    /// Advance `rho` from `start` to `end`, returning the number of steps.
    fn advance(&mut self, rho: &mut CMatrix, start: f64, end: f64) -> Result<usize>;
}

struct Rk4<'a> {
    kernel: RhsKernel<'a>,
    h_max: f64,
    k: [CMatrix; 4],
    stage: CMatrix,
}

impl<'a> Rk4<'a> {
    fn new(model: &'a LindbladModel, h_max: f64) -> Result<Self> {
        let d = model.dim();
        Ok(Rk4 {
            kernel: RhsKernel::new(model)?,
            h_max,
            k: std::array::from_fn(|_| CMatrix::zeros(d, d)),
            stage: CMatrix::zeros(d, d),
        })
    }
}

impl Stepper for Rk4<'_> {
    fn advance(&mut self, rho: &mut CMatrix, start: f64, end: f64) -> Result<usize> {
        let n = step_count(end - start, self.h_max);
        let h = (end - start) / n as f64;
        let half = Complex64::new(0.5 * h, 0.0);
        for s in 0..n {
            let t = start + h * s as f64;
            let [k1, k2, k3, k4] = &mut self.k;
            self.kernel.apply(t, rho, k1)?;
            self.stage.copy_from(rho);
            axpy(&mut self.stage, half, k1, ONE);
            self.kernel.apply(t + 0.5 * h, &self.stage, k2)?;
            self.stage.copy_from(rho);
            axpy(&mut self.stage, half, k2, ONE);
            self.kernel.apply(t + 0.5 * h, &self.stage, k3)?;
            self.stage.copy_from(rho);
            axpy(&mut self.stage, Complex64::new(h, 0.0), k3, ONE);
            self.kernel.apply(t + h, &self.stage, k4)?;
            let sixth = Complex64::new(h / 6.0, 0.0);
            let third = Complex64::new(h / 3.0, 0.0);
            axpy(rho, sixth, k1, ONE);
            axpy(rho, third, k2, ONE);
            axpy(rho, third, k3, ONE);
            axpy(rho, sixth, k4, ONE);
            hermitize(rho);
            check_trace(rho, t + h)?;
        }
        Ok(n)
    }
}

/// Exact propagator e^{−iHτ} of a static Hamiltonian via its eigenbasis.
struct UnitaryFactory {
    vectors: CMatrix,
    vectors_adj: CMatrix,
    energies: Vec<f64>,
}

impl UnitaryFactory {
    fn new(h: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(crate::hilbert::hermitian_part(h));
        UnitaryFactory {
            vectors_adj: eig.eigenvectors.adjoint(),
            vectors: eig.eigenvectors,
            energies: eig.eigenvalues.iter().copied().collect(),
        }
    }

    fn propagator(&self, tau: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, e) in self.energies.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * tau);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= phase;
            }
        }
        &scaled * &self.vectors_adj
    }
}

/// Integrating-factor RK4 with the coherent part propagated exactly.
struct Lawson<'a> {
    dissipator: RhsKernel<'a>,
    unitaries: UnitaryFactory,
    h_max: f64,
    cached: Option<(f64, CMatrix, CMatrix, CMatrix, CMatrix)>,
    k: [CMatrix; 4],
    stage: CMatrix,
    tmp: CMatrix,
    acc: CMatrix,
}

impl<'a> Lawson<'a> {
    fn new(model: &'a LindbladModel, h_max: f64) -> Result<Self> {
        let Hamiltonian::Static(h) = model.hamiltonian() else {
            return Err(Error::invalid("Lawson stepping needs a static Hamiltonian"));
        };
        let d = model.dim();
        Ok(Lawson {
            dissipator: RhsKernel::dissipator(model)?,
            unitaries: UnitaryFactory::new(h),
            h_max,
            cached: None,
            k: std::array::from_fn(|_| CMatrix::zeros(d, d)),
            stage: CMatrix::zeros(d, d),
            tmp: CMatrix::zeros(d, d),
            acc: CMatrix::zeros(d, d),
        })
    }

    fn propagators(&mut self, h: f64) {
        if self.cached.as_ref().is_some_and(|c| c.0 == h) {
            return;
        }
        let full = self.unitaries.propagator(h);
        let half = self.unitaries.propagator(0.5 * h);
        self.cached = Some((h, full.adjoint(), half.adjoint(), full, half));
    }
}

/// out = U·x·U†.
fn conjugate(u: &CMatrix, u_adj: &CMatrix, x: &CMatrix, tmp: &mut CMatrix, out: &mut CMatrix) {
    tmp.gemm(ONE, u, x, ZERO);
    out.gemm(ONE, tmp, u_adj, ZERO);
}

impl Stepper for Lawson<'_> {
    fn advance(&mut self, rho: &mut CMatrix, start: f64, end: f64) -> Result<usize> {
        let n = step_count(end - start, self.h_max);
        let h = (end - start) / n as f64;
        self.propagators(h);
        let (_, full_adj, half_adj, full, half) = self.cached.as_ref().expect("cached above");
        let ch = |x: f64| Complex64::new(x, 0.0);
        let d = rho.nrows();
        let mut e_y = CMatrix::zeros(d, d);
        for s in 0..n {
            let t = start + h * s as f64;
            let [k1, k2, k3, k4] = &mut self.k;
            self.dissipator.apply(t, rho, k1)?;

            self.acc.copy_from(rho);
            axpy(&mut self.acc, ch(0.5 * h), k1, ONE);
            conjugate(half, half_adj, &self.acc, &mut self.tmp, &mut self.stage);
            self.dissipator.apply(t, &self.stage, k2)?;

            conjugate(half, half_adj, rho, &mut self.tmp, &mut self.stage);
            axpy(&mut self.stage, ch(0.5 * h), k2, ONE);
            self.dissipator.apply(t, &self.stage, k3)?;

            conjugate(full, full_adj, rho, &mut self.tmp, &mut e_y);
            conjugate(half, half_adj, k3, &mut self.tmp, &mut self.stage);
            axpy(&mut self.stage, ONE, &e_y, ch(h));
            self.dissipator.apply(t, &self.stage, k4)?;

            self.acc.copy_from(rho);
            axpy(&mut self.acc, ch(h / 6.0), k1, ONE);
            conjugate(full, full_adj, &self.acc, &mut self.tmp, rho);
            self.acc.copy_from(k2);
            axpy(&mut self.acc, ONE, k3, ONE);
            conjugate(half, half_adj, &self.acc, &mut self.tmp, &mut self.stage);
            axpy(rho, ch(h / 3.0), &self.stage, ONE);
            axpy(rho, ch(h / 6.0), k4, ONE);
            hermitize(rho);
            check_trace(rho, t + h)?;
        }
        Ok(n)
    }
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) with a max-norm error controller.
struct DormandPrince<'a> {
    kernel: RhsKernel<'a>,
    h_max: f64,
    h: f64,
    atol: f64,
    rtol: f64,
    k: [CMatrix; 7],
    stage: CMatrix,
    err: CMatrix,
}

impl<'a> DormandPrince<'a> {
    const MAX_STEPS: usize = 10_000_000;

    fn new(model: &'a LindbladModel, h_max: f64, atol: f64, rtol: f64) -> Result<Self> {
        let d = model.dim();
        Ok(DormandPrince {
            kernel: RhsKernel::new(model)?,
            h_max,
            h: if h_max.is_finite() { h_max } else { 1.0 },
            atol,
            rtol,
            k: std::array::from_fn(|_| CMatrix::zeros(d, d)),
            stage: CMatrix::zeros(d, d),
            err: CMatrix::zeros(d, d),
        })
    }
}

impl Stepper for DormandPrince<'_> {
    fn advance(&mut self, rho: &mut CMatrix, start: f64, end: f64) -> Result<usize> {
        let mut t = start;
        let mut steps = 0;
        while t < end {
            if steps >= Self::MAX_STEPS {
                return Err(Error::Integration {
                    time: t,
                    reason: "adaptive step count exceeded".to_string(),
                    phase: None,
                });
            }
            let remaining = end - t;
            let h = self.h.min(self.h_max).min(remaining);
            let last = h >= remaining;
            for s in 0..7 {
                self.stage.copy_from(rho);
                for (j, a) in DP_A[s].iter().enumerate().take(s) {
                    if *a != 0.0 {
                        axpy(&mut self.stage, Complex64::new(h * a, 0.0), &self.k[j], ONE);
                    }
                }
                self.kernel.apply(t + DP_C[s] * h, &self.stage, &mut self.k[s])?;
            }
            self.err.fill(ZERO);
            for (j, kj) in self.k.iter().enumerate() {
                let e = DP_B5[j] - DP_B4[j];
                if e != 0.0 {
                    axpy(&mut self.err, Complex64::new(h * e, 0.0), kj, ONE);
                }
            }
            // The 5th-order solution equals the last stage (FSAL).
            let scale = self.atol + self.rtol * max_abs(&self.stage);
            let ratio = max_abs(&self.err) / scale;
            if ratio <= 1.0 {
                rho.copy_from(&self.stage);
                hermitize(rho);
                t = if last { end } else { t + h };
                check_trace(rho, t)?;
                steps += 1;
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last || ratio > 1.0 {
                self.h = h * factor;
            }
            if self.h < 1e-14 * end.abs().max(1.0) {
                return Err(Error::Integration {
                    time: t,
                    reason: "adaptive step underflow".to_string(),
                    phase: None,
                });
            }
        }
        Ok(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{thermal_collapses, Collapse};
    use crate::hilbert::{basis_index, basis_ket, make_operators, make_state, Qubit, StateSpec};

    fn jc_model(fock_dim: usize, g: f64) -> (LindbladModel, CVector) {
        let ops = make_operators(fock_dim).unwrap();
        let h = (&ops.b_dag * &ops.sm + &ops.b * &ops.sp) * Complex64::new(g, 0.0);
        let model = LindbladModel::new(Hamiltonian::Static(h), vec![]).unwrap();
        (model, basis_ket(Qubit::Excited, 0, fock_dim).unwrap())
    }

    #[test]
    fn frozen_state_without_dynamics() {
        let d = 6;
        let model = LindbladModel::new(Hamiltonian::Static(CMatrix::zeros(d, d)), vec![]).unwrap();
        let rho = make_state(&StateSpec::ThermalGround { n_th: 0.4 }, 3).unwrap();
        let out = evolve(&model, &rho, (0.0, 1e3), &EvolveOptions::default(), &[]).unwrap();
        assert!(max_abs(&(out.final_state.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn qubit_decay_is_exponential() {
        let ops = make_operators(2).unwrap();
        let gamma = 1e-4;
        let model = LindbladModel::new(
            Hamiltonian::Static(CMatrix::zeros(4, 4)),
            thermal_collapses(&ops.sm, &ops.sp, gamma, 0.0).unwrap(),
        )
        .unwrap();
        let rho = make_state(&StateSpec::ExcitedFock(0), 2).unwrap();
        for method in [Method::Rk4, Method::Lawson, Method::DormandPrince { atol: 1e-9, rtol: 0.0 }] {
            let options = EvolveOptions {
                method,
                samples: 40,
                ..EvolveOptions::default()
            };
            let obs = [Observable::expectation("pe", &ops.sp * &ops.sm)];
            let out = evolve(&model, &rho, (0.0, 2.0e4), &options, &obs).unwrap();
            for (t, p) in out.series.times.iter().zip(out.series.column("pe").unwrap()) {
                let exact = (-gamma * t).exp();
                assert!((p - exact).abs() < 1e-4 * exact, "{method:?} t = {t}: {p} vs {exact}");
            }
        }
    }

    #[test]
    fn vacuum_rabi_transfer() {
        let g = 0.011;
        let (model, excited) = jc_model(4, g);
        let rho = DensityMatrix::pure(&excited).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / g;
        let options = EvolveOptions {
            method: Method::Rk4,
            samples: 50,
            ..EvolveOptions::default()
        };
        let obs = [Observable::population("pe0", excited.clone())];
        let out = evolve(&model, &rho, (0.0, t), &options, &obs).unwrap();
        for (time, p) in out.series.times.iter().zip(out.series.column("pe0").unwrap()) {
            assert!((p - (g * time).cos().powi(2)).abs() < 1e-4);
        }
        let moved = basis_ket(Qubit::Ground, 1, 4).unwrap();
        assert!(Observable::population("", moved).evaluate(out.final_state.matrix()) > 1.0 - 1e-4);
    }

    #[test]
    fn fourth_order_convergence() {
        let g = 0.5;
        let (model, excited) = jc_model(3, g);
        let rho = DensityMatrix::pure(&excited).unwrap();
        let t = 3.0;
        let run = |dt: f64| {
            let options = EvolveOptions {
                dt: Some(dt),
                method: Method::Rk4,
                samples: 1,
                ..EvolveOptions::default()
            };
            let out = evolve(&model, &rho, (0.0, t), &options, &[]).unwrap();
            Observable::population("", excited.clone()).evaluate(out.final_state.matrix())
        };
        let exact = (g * t).cos().powi(2);
        let e1 = (run(0.04) - exact).abs();
        let e2 = (run(0.02) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.8, "order {order}");
    }

    #[test]
    fn driven_hamiltonian_uses_rk4() {
        let ops = make_operators(2).unwrap();
        let model = LindbladModel::new(
            Hamiltonian::Driven {
                terms: vec![ops.sx.clone()],
                coefficients: Box::new(|_| Ok(vec![0.2])),
            },
            vec![],
        )
        .unwrap();
        let rho = make_state(&StateSpec::ExcitedFock(0), 2).unwrap();
        let out = evolve(&model, &rho, (0.0, 5.0), &EvolveOptions::default(), &[]).unwrap();
        assert_eq!(out.method, Method::Rk4);
        let pe = Observable::expectation("", &ops.sp * &ops.sm).evaluate(out.final_state.matrix());
        assert!((pe - (0.2f64 * 5.0).cos().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn static_shortcut_matches_analytic_relaxation() {
        let ops = make_operators(2).unwrap();
        let (omega, gamma, n_th) = (16.0, 1e-2, 0.3);
        let h = &ops.sz * Complex64::new(0.5 * omega, 0.0) + &ops.num * Complex64::new(0.5, 0.0);
        let model = LindbladModel::new(
            Hamiltonian::Static(h),
            thermal_collapses(&ops.sm, &ops.sp, gamma, n_th).unwrap(),
        )
        .unwrap();
        let plus = crate::hilbert::pauli::x() * Complex64::new(0.5, 0.0)
            + CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        let boson = make_state(&StateSpec::Fock(0), 2).unwrap().boson_reduced(2).unwrap();
        let rho = make_state(&StateSpec::Product { qubit: plus, boson }, 2).unwrap();
        let t = 200.0;
        let options = EvolveOptions {
            samples: 4,
            ..EvolveOptions::default()
        };
        let fast = evolve(&model, &rho, (0.0, t), &options, &[]).unwrap();
        assert_eq!(fast.method, Method::Lawson);
        assert!(fast.steps < 100);

        let rate = gamma * (2.0 * n_th + 1.0);
        let p_inf = n_th / (2.0 * n_th + 1.0);
        let p_e = p_inf + (0.5 - p_inf) * (-rate * t).exp();
        let coherence = Complex64::from_polar(0.5 * (-0.5 * rate * t).exp(), -omega * t);
        let m = fast.final_state.matrix();
        let (e, g) = (basis_index(Qubit::Excited, 0, 2), basis_index(Qubit::Ground, 0, 2));
        assert!((m[(e, e)].re - p_e).abs() < 1e-5);
        assert!((m[(e, g)] - coherence).norm() < 1e-5, "{} vs {coherence}", m[(e, g)]);
    }

    #[test]
    fn thermal_steady_state_occupation() {
        let n = 10;
        let ops = make_operators(n).unwrap();
        let n_th = 0.87;
        let model = LindbladModel::new(
            Hamiltonian::Static(ops.num.clone()),
            thermal_collapses(&ops.b, &ops.b_dag, 0.05, n_th).unwrap(),
        )
        .unwrap();
        let rho = make_state(&StateSpec::Fock(0), n).unwrap();
        let options = EvolveOptions {
            samples: 10,
            ..EvolveOptions::default()
        };
        let obs = [Observable::expectation("n", ops.num.clone())];
        let out = evolve(&model, &rho, (0.0, 400.0), &options, &obs).unwrap();
        let mean = out.series.last("n").unwrap();
        // Detailed balance holds level by level, so the truncated steady state
        // is the truncated geometric distribution.
        let truncated: f64 = crate::hilbert::thermal_populations(n_th, n)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum();
        assert!((mean - truncated).abs() < 1e-6, "{mean} vs {truncated}");
        assert!((mean - n_th).abs() < 1e-2);
    }

    #[test]
    fn trace_drift_is_reported_with_time() {
        let ops = make_operators(2).unwrap();
        let model = LindbladModel::new(
            Hamiltonian::Static(CMatrix::zeros(4, 4)),
            vec![Collapse::new(ops.sm.clone(), 1.0)],
        )
        .unwrap();
        let mut bad = make_state(&StateSpec::ExcitedFock(0), 2).unwrap().into_matrix();
        bad[(0, 0)] = Complex64::new(1.01, 0.0);
        let rho = DensityMatrix::from_matrix_unchecked(bad);
        let err = evolve(&model, &rho, (0.0, 1.0), &EvolveOptions::default(), &[]).unwrap_err();
        assert!(matches!(err, Error::Integration { time, .. } if time > 0.0));
    }

    #[test]
    fn series_bookkeeping() {
        let mut a = TimeSeries::new(vec!["x".into()]);
        a.push(0.0, &[1.0]);
        a.push(1.0, &[2.0]);
        let mut b = TimeSeries::new(vec!["x".into()]);
        b.push(0.0, &[2.0]);
        b.push(0.5, &[3.0]);
        a.extend_shifted(&b, 1.0);
        assert_eq!(a.times, vec![0.0, 1.0, 1.5]);
        assert_eq!(a.column("x").unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(a.last("x"), Some(3.0));
        assert!(a.column("y").is_none());
    }
}
