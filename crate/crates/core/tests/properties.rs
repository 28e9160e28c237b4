use num_complex::Complex64;
use proptest::prelude::*;
use shuttle_core::circuit::{coupling_set, qubit_zpf, CircuitParams};
use shuttle_core::dynamics::{
    lindblad_rhs, thermal_collapses, thermal_occupation, Collapse, Hamiltonian, LindbladModel,
};
use shuttle_core::hilbert::{
    kron, make_operators, max_abs, thermal_populations, CMatrix, CVector, DensityMatrix,
};
use shuttle_core::protocol::fidelity;
use shuttle_core::special::bessel_j;

fn symmetric(e_j: f64) -> CircuitParams {
    CircuitParams {
        e_j1: e_j,
        e_j2: e_j,
        ..CircuitParams::reference()
    }
}

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
        .prop_map(move |v| CMatrix::from_iterator(rows, cols, v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

fn hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(dim, dim).prop_map(|m| (&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// A random mixed state A·A†/tr(A·A†).
fn density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    complex_matrix(dim, dim).prop_map(|a| {
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(m / tr).expect("positive by construction")
    })
}

proptest! {
    #[test]
    fn symmetric_pair_kills_six_couplings(e_j in 5.0f64..80.0, phi in -3.1f64..3.1) {
        let s = coupling_set(&symmetric(e_j), phi).unwrap();
        for v in [s.g01, s.g10, s.g12, s.g21, s.g30, s.g32] {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn transverse_odd_dispersive_even(e_j in 5.0f64..80.0, phi in 0.0f64..3.1) {
        let p = symmetric(e_j);
        let (plus, minus) = (coupling_set(&p, phi).unwrap(), coupling_set(&p, -phi).unwrap());
        prop_assert!((plus.g1 + minus.g1).abs() <= 1e-15 * plus.g1.abs().max(1e-300));
        prop_assert!((plus.g2 - minus.g2).abs() <= 1e-15 * plus.g2.abs());
    }

    #[test]
    fn qubit_frequency_even_and_falling(phi in 0.0f64..3.0, step in 0.0f64..0.1) {
        let p = CircuitParams::reference();
        let at = |x: f64| coupling_set(&p, x).unwrap().omega_q;
        prop_assert_eq!(at(phi), at(-phi));
        prop_assert!(at(phi + step) <= at(phi));
    }

    #[test]
    fn zero_point_product_is_one_half(e_c in 0.1f64..5.0, e_j in 1.0f64..100.0, phi in -3.0f64..3.0) {
        let (n, ph) = qubit_zpf(e_c, e_j, phi).unwrap();
        prop_assert!((n * ph - 0.5).abs() < 1e-14);
    }

    #[test]
    fn kronecker_mixed_product(
        a in complex_matrix(2, 2), b in complex_matrix(3, 3),
        c in complex_matrix(2, 2), d in complex_matrix(3, 3),
    ) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn master_equation_rhs_traceless_and_hermitian(
        rho in density(6), h in hermitian(6), l in complex_matrix(6, 6), rate in 0.0f64..2.0,
    ) {
        let model = LindbladModel::new(Hamiltonian::Static(h), vec![Collapse::new(l, rate)]).unwrap();
        let d = lindblad_rhs(&rho, &model, 0.0).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
        prop_assert!(max_abs(&(&d - d.adjoint())) < 1e-12);
    }

    #[test]
    fn thermal_steady_state_is_fixed_point(n_th in 0.0f64..3.0, gamma in 1e-3f64..1.0) {
        let n = 8;
        let ops = make_operators(n).unwrap();
        let collapses = thermal_collapses(&ops.b, &ops.b_dag, gamma, n_th).unwrap();
        let model = LindbladModel::new(Hamiltonian::Static(ops.num.clone()), collapses).unwrap();
        let pops = thermal_populations(n_th, n).unwrap();
        let boson = CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            pops.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        let mut qubit = CMatrix::zeros(2, 2);
        qubit[(1, 1)] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::new(kron(&qubit, &boson)).unwrap();
        // Detailed balance holds level by level, including the truncation edge.
        prop_assert!(max_abs(&lindblad_rhs(&rho, &model, 0.0).unwrap()) < 1e-12);
    }

    #[test]
    fn occupation_grows_with_temperature(omega in 0.1f64..30.0, t in 1e-3f64..1.0, dt in 1e-4f64..0.5) {
        let low = thermal_occupation(omega, t).unwrap();
        let high = thermal_occupation(omega, t + dt).unwrap();
        prop_assert!(high >= low && low >= 0.0);
    }

    #[test]
    fn population_fidelity_is_bounded(rho in density(4), v in complex_matrix(4, 1)) {
        prop_assume!(v.norm() > 1e-3);
        let ket = CVector::from_iterator(4, v.iter().copied()) / Complex64::new(v.norm(), 0.0);
        let f = fidelity(&rho, &ket).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn bessel_recurrence(n in 1i32..6, x in 0.0f64..3.0) {
        prop_assume!(x > 1e-3);
        let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
        let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }
}
