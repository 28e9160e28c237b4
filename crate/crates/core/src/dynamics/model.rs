use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{axpy, max_abs, CMatrix, DensityMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Real coefficient functions c_k(t) of a driven Hamiltonian Σ c_k(t)·O_k.
pub type CoefficientFn = Box<dyn Fn(f64) -> Result<Vec<f64>> + Send + Sync>;

pub enum Hamiltonian {
    Static(CMatrix),
    /// H(t) = Σ_k c_k(t)·O_k with Hermitian O_k and real c_k.
    Driven {
        terms: Vec<CMatrix>,
        coefficients: CoefficientFn,
    },
}

impl std::fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hamiltonian::Static(h) => f.debug_tuple("Static").field(&h.shape()).finish(),
            Hamiltonian::Driven { terms, .. } => {
                f.debug_struct("Driven").field("terms", &terms.len()).finish()
            }
        }
    }
}

impl Hamiltonian {
    pub fn is_static(&self) -> bool {
        matches!(self, Hamiltonian::Static(_))
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Hamiltonian::Static(h) => Some(h.nrows()),
            Hamiltonian::Driven { terms, .. } => terms.first().map(|m| m.nrows()),
        }
    }

    /// Write H(t) into `out`.
    pub fn write_at(&self, t: f64, out: &mut CMatrix) -> Result<()> {
        match self {
            Hamiltonian::Static(h) => out.copy_from(h),
            Hamiltonian::Driven {
                terms,
                coefficients,
            } => {
                let c = coefficients(t)?;
                if c.len() != terms.len() {
                    return Err(Error::invalid(format!(
                        "{} coefficients for {} Hamiltonian terms",
                        c.len(),
                        terms.len()
                    )));
                }
                out.fill(ZERO);
                for (ck, op) in c.iter().zip(terms) {
                    if *ck != 0.0 {
                        axpy(out, Complex64::new(*ck, 0.0), op, ONE);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Result<CMatrix> {
        let d = self.dim().unwrap_or(0);
        let mut out = CMatrix::zeros(d, d);
        self.write_at(t, &mut out)?;
        Ok(out)
    }
}

/// A jump operator with its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Collapse {
    pub operator: CMatrix,
    pub rate: f64,
}

impl Collapse {
    pub fn new(operator: CMatrix, rate: f64) -> Self {
        Collapse { operator, rate }
    }
}

/// Hamiltonian plus dissipators of a Markovian master equation.
#[derive(Debug)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: Hamiltonian,
    collapses: Vec<Collapse>,
    frequency_bound: f64,
}

impl LindbladModel {
    /// Validate and assemble a model. The frequency bound defaults to the
    /// spectral width of H(0) plus the largest dissipative rate; driven models
    /// should override it with [`LindbladModel::with_frequency_bound`].
    pub fn new(hamiltonian: Hamiltonian, collapses: Vec<Collapse>) -> Result<Self> {
        let dim = hamiltonian
            .dim()
            .ok_or_else(|| Error::invalid("Hamiltonian has no terms"))?;
        let check_square = |m: &CMatrix, what: &str| -> Result<()> {
            if m.shape() != (dim, dim) {
                return Err(Error::invalid(format!(
                    "{what} has shape {:?}, expected {dim}x{dim}",
                    m.shape()
                )));
            }
            Ok(())
        };
        match &hamiltonian {
            Hamiltonian::Static(h) => check_hermitian(h, "Hamiltonian")?,
            Hamiltonian::Driven { terms, .. } => {
                for op in terms {
                    check_square(op, "Hamiltonian term")?;
                    check_hermitian(op, "Hamiltonian term")?;
                }
            }
        }
        for c in &collapses {
            check_square(&c.operator, "collapse operator")?;
            if !(c.rate.is_finite() && c.rate >= 0.0) {
                return Err(Error::invalid(format!("collapse rate must be non-negative, got {}", c.rate)));
            }
        }
        let h0 = hamiltonian.at(0.0)?;
        check_hermitian(&h0, "H(0)")?;
        let frequency_bound = spectral_width(&h0) + dissipative_rate(&collapses);
        Ok(LindbladModel {
            dim,
            hamiltonian,
            collapses,
            frequency_bound,
        })
    }

    pub fn with_frequency_bound(mut self, omega_max: f64) -> Self {
        self.frequency_bound = omega_max;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn collapses(&self) -> &[Collapse] {
        &self.collapses
    }

    /// Largest angular frequency the integrator must resolve.
    pub fn frequency_bound(&self) -> f64 {
        self.frequency_bound
    }

    /// Σ_k r_k·‖L_k†L_k‖, the fastest dissipative time scale.
    pub fn dissipative_rate(&self) -> f64 {
        dissipative_rate(&self.collapses)
    }

    /// Whether H is static and commutes with every L_k†L_k.
    pub fn commutes_with_dissipators(&self) -> bool {
        let Hamiltonian::Static(h) = &self.hamiltonian else {
            return false;
        };
        let scale = max_abs(h).max(1.0);
        self.collapses.iter().filter(|c| c.rate > 0.0).all(|c| {
            let n = c.operator.adjoint() * &c.operator;
            max_abs(&(h * &n - &n * h)) < 1e-12 * scale * max_abs(&n).max(1.0)
        })
    }
}

fn check_hermitian(m: &CMatrix, what: &str) -> Result<()> {
    let residual = max_abs(&(m - m.adjoint()));
    if residual >= 1e-9 {
        return Err(Error::invalid(format!("{what} not Hermitian (residual {residual:e})")));
    }
    Ok(())
}

/// Largest minus smallest eigenvalue.
pub(crate) fn spectral_width(h: &CMatrix) -> f64 {
    let eig = crate::hilbert::hermitian_part(h).symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min).max(0.0)
}

fn dissipative_rate(collapses: &[Collapse]) -> f64 {
    collapses
        .iter()
        .filter(|c| c.rate > 0.0)
        .map(|c| {
            let n = c.operator.adjoint() * &c.operator;
            let largest = n.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
            c.rate * largest
        })
        .sum()
}

/// Preallocated evaluator of the Lindblad right-hand side
/// Gρ + (Gρ)† + Σ r·LρL† with G = −iH − ½Σ r·L†L.
///
/// Uses ρG† = (Gρ)†, valid for Hermitian ρ.
pub(crate) struct RhsKernel<'a> {
    hamiltonian: Option<&'a Hamiltonian>,
    damping: CMatrix,
    jumps: Vec<(CMatrix, CMatrix, Complex64)>,
    generator: CMatrix,
    h_buf: CMatrix,
    tmp: CMatrix,
    tmp2: CMatrix,
}

impl<'a> RhsKernel<'a> {
    pub(crate) fn new(model: &'a LindbladModel) -> Result<Self> {
        Self::build(model, true)
    }

    /// Kernel for the dissipator alone, H omitted.
    pub(crate) fn dissipator(model: &'a LindbladModel) -> Result<Self> {
        Self::build(model, false)
    }

    fn build(model: &'a LindbladModel, with_hamiltonian: bool) -> Result<Self> {
        let d = model.dim();
        let mut damping = CMatrix::zeros(d, d);
        let mut jumps = Vec::new();
        for c in model.collapses().iter().filter(|c| c.rate > 0.0) {
            let adj = c.operator.adjoint();
            damping.gemm(Complex64::new(0.5 * c.rate, 0.0), &adj, &c.operator, ONE);
            jumps.push((c.operator.clone(), adj, Complex64::new(c.rate, 0.0)));
        }
        let mut kernel = RhsKernel {
            hamiltonian: with_hamiltonian.then_some(model.hamiltonian()),
            generator: -&damping,
            damping,
            jumps,
            h_buf: CMatrix::zeros(d, d),
            tmp: CMatrix::zeros(d, d),
            tmp2: CMatrix::zeros(d, d),
        };
        if let Some(Hamiltonian::Static(h)) = kernel.hamiltonian {
            kernel.generator = -(h * Complex64::new(0.0, 1.0)) - &kernel.damping;
        }
        Ok(kernel)
    }

    pub(crate) fn apply(&mut self, t: f64, rho: &CMatrix, out: &mut CMatrix) -> Result<()> {
        if let Some(h @ Hamiltonian::Driven { .. }) = self.hamiltonian {
            h.write_at(t, &mut self.h_buf)?;
            let d = self.h_buf.nrows();
            for j in 0..d {
                for i in 0..d {
                    let hij = self.h_buf[(i, j)];
                    self.generator[(i, j)] =
                        Complex64::new(hij.im, -hij.re) - self.damping[(i, j)];
                }
            }
        }
        self.tmp.gemm(ONE, &self.generator, rho, ZERO);
        let d = rho.nrows();
        for j in 0..d {
            for i in 0..d {
                out[(i, j)] = self.tmp[(i, j)] + self.tmp[(j, i)].conj();
            }
        }
        for (l, l_adj, rate) in &self.jumps {
            self.tmp2.gemm(*rate, l, rho, ZERO);
            out.gemm(ONE, &self.tmp2, l_adj, ONE);
        }
        Ok(())
    }
}

/// dρ/dt of the master equation at time `t`.
pub fn lindblad_rhs(rho: &DensityMatrix, model: &LindbladModel, t: f64) -> Result<CMatrix> {
    if rho.dim() != model.dim() {
        return Err(Error::invalid(format!(
            "state dimension {} does not match model dimension {}",
            rho.dim(),
            model.dim()
        )));
    }
    let mut kernel = RhsKernel::new(model)?;
    let mut out = CMatrix::zeros(model.dim(), model.dim());
    kernel.apply(t, rho.matrix(), &mut out)?;
    Ok(out)
}
