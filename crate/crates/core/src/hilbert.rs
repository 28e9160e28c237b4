//! Operators and states on the qubit ⊗ truncated-Fock space.
//!
//! Basis ordering is qubit ⊗ boson: the basis state |q, n⟩ sits at index
//! `q·N + n`, with q = 0 the excited state (σ_z = +1) and q = 1 the ground
//! state (σ_z = −1). Everything else in the crate builds indices through
//! [`basis_index`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Qubit basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    Excited,
    Ground,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Excited => 0,
            Qubit::Ground => 1,
        }
    }
}

pub fn basis_index(qubit: Qubit, n: usize, fock_dim: usize) -> usize {
    qubit.index() * fock_dim + n
}

/// Pure basis vector |q, n⟩.
pub fn basis_ket(qubit: Qubit, n: usize, fock_dim: usize) -> Result<CVector> {
    if n >= fock_dim {
        return Err(Error::invalid(format!("Fock level {n} outside truncation {fock_dim}")));
    }
    let mut v = CVector::zeros(2 * fock_dim);
    v[basis_index(qubit, n, fock_dim)] = ONE;
    Ok(v)
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Qubit-factor Pauli matrices in the excited-first basis.
pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// σ_+ = |e⟩⟨g|.
    pub fn raising() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    /// σ_− = |g⟩⟨e|.
    pub fn lowering() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    }
}

/// Truncated boson annihilation operator on N levels.
pub fn annihilation(fock_dim: usize) -> CMatrix {
    let mut b = CMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        b[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    b
}

/// Operators embedded in the full 2N-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    pub fock_dim: usize,
    pub dim: usize,
    pub b: CMatrix,
    pub b_dag: CMatrix,
    pub num: CMatrix,
    /// b + b†, the displacement quadrature.
    pub position: CMatrix,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    pub sp: CMatrix,
    pub sm: CMatrix,
    pub identity: CMatrix,
}

pub fn make_operators(fock_dim: usize) -> Result<OperatorSet> {
    if fock_dim < 2 {
        return Err(Error::invalid(format!("Fock truncation must be at least 2, got {fock_dim}")));
    }
    let q_id = CMatrix::identity(2, 2);
    let m_id = CMatrix::identity(fock_dim, fock_dim);
    let a = annihilation(fock_dim);
    let a_dag = a.adjoint();
    let number = CMatrix::from_diagonal(&CVector::from_iterator(
        fock_dim,
        (0..fock_dim).map(|n| Complex64::new(n as f64, 0.0)),
    ));
    let boson = |m: &CMatrix| kron(&q_id, m);
    let qubit = |m: &CMatrix| kron(m, &m_id);
    Ok(OperatorSet {
        fock_dim,
        dim: 2 * fock_dim,
        position: boson(&(&a + &a_dag)),
        num: boson(&number),
        b: boson(&a),
        b_dag: boson(&a_dag),
        sx: qubit(&pauli::x()),
        sy: qubit(&pauli::y()),
        sz: qubit(&pauli::z()),
        sp: qubit(&pauli::raising()),
        sm: qubit(&pauli::lowering()),
        identity: CMatrix::identity(2 * fock_dim, 2 * fock_dim),
    })
}

impl OperatorSet {
    /// Total excitation number σ_+σ_− + b†b.
    pub fn excitation_number(&self) -> CMatrix {
        &self.sp * &self.sm + &self.num
    }
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
    pub const TRACE_TOLERANCE: f64 = 1e-9;
    pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

    /// Wrap `matrix` after checking Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = DensityMatrix { matrix };
        let residual = rho.hermiticity_residual();
        if residual >= Self::HERMITICITY_TOLERANCE {
            return Err(Error::invalid(format!("density matrix not Hermitian (residual {residual:e})")));
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() >= Self::TRACE_TOLERANCE {
            return Err(Error::invalid(format!("density matrix trace {trace} differs from 1")));
        }
        let min = rho.min_eigenvalue();
        if min < -Self::POSITIVITY_TOLERANCE {
            return Err(Error::invalid(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("state vector has norm {norm}")));
        }
        Ok(DensityMatrix {
            matrix: psi * psi.adjoint(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_part(&self.matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Qubit reduced state tr_boson(ρ), in the excited-first basis.
    pub fn qubit_reduced(&self, fock_dim: usize) -> Result<CMatrix> {
        self.check_split(fock_dim)?;
        let mut out = CMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                out[(a, b)] = (0..fock_dim)
                    .map(|n| self.matrix[(a * fock_dim + n, b * fock_dim + n)])
                    .sum();
            }
        }
        Ok(out)
    }

    /// Boson reduced state tr_qubit(ρ).
    pub fn boson_reduced(&self, fock_dim: usize) -> Result<CMatrix> {
        self.check_split(fock_dim)?;
        let top = self.matrix.view((0, 0), (fock_dim, fock_dim));
        let bottom = self.matrix.view((fock_dim, fock_dim), (fock_dim, fock_dim));
        Ok(top + bottom)
    }

    fn check_split(&self, fock_dim: usize) -> Result<()> {
        if self.dim() != 2 * fock_dim {
            return Err(Error::invalid(format!(
                "state of dimension {} does not split as 2 x {fock_dim}",
                self.dim()
            )));
        }
        Ok(())
    }
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Initial-state recipes.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Qubit ground state with the boson in |n⟩.
    Fock(usize),
    /// Qubit excited state with the boson in |n⟩.
    ExcitedFock(usize),
    /// Qubit ground state with a thermal boson of mean occupation `n_th`.
    ThermalGround { n_th: f64 },
    /// Explicit qubit (2×2) and boson (N×N) density-matrix factors.
    Product { qubit: CMatrix, boson: CMatrix },
}

/// Populations of a thermal state truncated to `fock_dim` levels.
pub fn thermal_populations(n_th: f64, fock_dim: usize) -> Result<Vec<f64>> {
    if !(n_th.is_finite() && n_th >= 0.0) {
        return Err(Error::invalid(format!("thermal occupation must be non-negative, got {n_th}")));
    }
    if n_th == 0.0 {
        let mut p = vec![0.0; fock_dim];
        if let Some(first) = p.first_mut() {
            *first = 1.0;
        }
        return Ok(p);
    }
    let ratio = n_th / (1.0 + n_th);
    let raw: Vec<f64> = (0..fock_dim).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / total).collect())
}

pub fn make_state(spec: &StateSpec, fock_dim: usize) -> Result<DensityMatrix> {
    if fock_dim < 2 {
        return Err(Error::invalid(format!("Fock truncation must be at least 2, got {fock_dim}")));
    }
    match spec {
        StateSpec::Fock(n) => DensityMatrix::pure(&basis_ket(Qubit::Ground, *n, fock_dim)?),
        StateSpec::ExcitedFock(n) => DensityMatrix::pure(&basis_ket(Qubit::Excited, *n, fock_dim)?),
        StateSpec::ThermalGround { n_th } => {
            let pops = thermal_populations(*n_th, fock_dim)?;
            let mut m = CMatrix::zeros(2 * fock_dim, 2 * fock_dim);
            for (n, p) in pops.into_iter().enumerate() {
                let i = basis_index(Qubit::Ground, n, fock_dim);
                m[(i, i)] = Complex64::new(p, 0.0);
            }
            Ok(DensityMatrix::from_matrix_unchecked(m))
        }
        StateSpec::Product { qubit, boson } => {
            if qubit.shape() != (2, 2) || boson.shape() != (fock_dim, fock_dim) {
                return Err(Error::invalid(format!(
                    "product factors must be 2x2 and {fock_dim}x{fock_dim}, got {:?} and {:?}",
                    qubit.shape(),
                    boson.shape()
                )));
            }
            DensityMatrix::new(kron(qubit, boson))
        }
    }
}

/// tr(ρ·O).
pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> Result<Complex64> {
    let m = rho.matrix();
    if op.shape() != m.shape() {
        return Err(Error::invalid(format!(
            "operator shape {:?} does not match state shape {:?}",
            op.shape(),
            m.shape()
        )));
    }
    Ok(trace_of_product(m, op))
}

/// tr(A·B) without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// y ← a·x + b·y.
pub fn axpy(y: &mut CMatrix, a: Complex64, x: &CMatrix, b: Complex64) {
    y.zip_apply(x, |yi, xi| *yi = a * xi + b * *yi);
}

/// Max-norm of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn two_level_lowering() {
        let b = annihilation(2);
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(b, expected);
    }

    #[test]
    fn number_operator_diagonal() {
        let ops = make_operators(7).unwrap();
        for q in [Qubit::Excited, Qubit::Ground] {
            for n in 0..7 {
                let i = basis_index(q, n, 7);
                assert_eq!(ops.num[(i, i)], Complex64::new(n as f64, 0.0));
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
        assert_eq!(&x * &y, &z * I);
        let id = CMatrix::identity(2, 2);
        assert_eq!(&x * &x, id);
        assert_eq!(&y * &y, id);
        assert_eq!(&z * &z, id);
        assert_eq!(pauli::raising() + pauli::lowering(), x);
        let ops = make_operators(4).unwrap();
        assert_eq!(&ops.sx * &ops.sy, &ops.sz * I);
    }

    #[test]
    fn truncated_commutator_is_explicit() {
        let n = 6;
        let b = annihilation(n);
        let c = commutator(&b, &b.adjoint());
        for i in 0..n {
            let expected = if i == n - 1 { 1.0 - n as f64 } else { 1.0 };
            assert!((c[(i, i)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|ij| c[ij].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-12);
    }

    #[test]
    fn qubit_and_boson_operators_commute() {
        let ops = make_operators(5).unwrap();
        for q in [&ops.sx, &ops.sy, &ops.sz, &ops.sp, &ops.sm] {
            for m in [&ops.b, &ops.b_dag, &ops.num] {
                assert!(max_abs(&commutator(q, m)) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert!(make_operators(1).is_err());
    }

    #[test]
    fn zero_temperature_thermal_state() {
        let rho = make_state(&StateSpec::ThermalGround { n_th: 0.0 }, 8).unwrap();
        let ground = DensityMatrix::pure(&basis_ket(Qubit::Ground, 0, 8).unwrap()).unwrap();
        assert_eq!(rho, ground);
    }

    #[test]
    fn thermal_mean_occupation() {
        let n = 30;
        let ops = make_operators(n).unwrap();
        let rho = make_state(&StateSpec::ThermalGround { n_th: 0.87 }, n).unwrap();
        let mean = expectation(&rho, &ops.num).unwrap();
        assert!((mean.re - 0.87).abs() < 1e-3, "{mean}");
        assert!((rho.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn excited_vacuum_expectations() {
        let ops = make_operators(5).unwrap();
        let rho = make_state(&StateSpec::ExcitedFock(0), 5).unwrap();
        assert_eq!(expectation(&rho, &ops.sz).unwrap(), ONE);
        assert_eq!(expectation(&rho, &ops.num).unwrap(), ZERO);
        assert_eq!(expectation(&rho, &ops.identity).unwrap(), ONE);
    }

    #[test]
    fn fock_level_out_of_range() {
        assert!(matches!(make_state(&StateSpec::Fock(5), 5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn expectation_checks_dimensions() {
        let rho = make_state(&StateSpec::Fock(0), 3).unwrap();
        let op = CMatrix::identity(4, 4);
        assert!(expectation(&rho, &op).is_err());
    }

    #[test]
    fn partial_traces_of_product_state() {
        let mut boson = CMatrix::zeros(3, 3);
        boson[(0, 0)] = Complex64::new(0.25, 0.0);
        boson[(2, 2)] = Complex64::new(0.75, 0.0);
        let mut qubit = CMatrix::zeros(2, 2);
        qubit[(0, 0)] = Complex64::new(0.5, 0.0);
        qubit[(1, 1)] = Complex64::new(0.5, 0.0);
        qubit[(0, 1)] = Complex64::new(0.0, 0.5);
        qubit[(1, 0)] = Complex64::new(0.0, -0.5);
        let rho = make_state(
            &StateSpec::Product {
                qubit: qubit.clone(),
                boson: boson.clone(),
            },
            3,
        )
        .unwrap();
        assert!(max_abs(&(rho.qubit_reduced(3).unwrap() - qubit)) < 1e-15);
        assert!(max_abs(&(rho.boson_reduced(3).unwrap() - boson)) < 1e-15);
        assert!((rho.purity() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_physical_matrices() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let mut m = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }
}
