use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use shuttle_core::circuit::{coupling_set, modulated_coefficients, CircuitParams, FluxDrive};
use shuttle_core::dynamics::{evolve, EvolveOptions, Observable};
use shuttle_core::hilbert::{basis_ket, make_operators, make_state, CVector, DensityMatrix, Qubit, StateSpec};
use shuttle_core::protocol::{
    build_rwa_model, effective_swap_params, fidelity, run_swap_protocol, sideband_spectrum,
    ModelKind, ProtocolSchedule, ProtocolSettings,
};
use shuttle_core::special::bessel_j;
use shuttle_core::Error;

fn lossless() -> CircuitParams {
    CircuitParams {
        gamma_m: 0.0,
        gamma_q: 0.0,
        ..CircuitParams::reference()
    }
}

#[test]
fn lossless_rwa_round_trip_restores_excitation() {
    let p = lossless();
    let schedule = ProtocolSchedule::resonant(&p, 0.5, 500.0, ModelKind::RwaEffective).unwrap();
    let r = run_swap_protocol(&p, &schedule, None, &ProtocolSettings::default()).unwrap();
    assert!((r.fidelity - 1.0).abs() < 1e-3, "{}", r.fidelity);
    let stored = r.phase("swap_in").unwrap().series.last("fidelity").unwrap();
    assert!(stored > 1.0 - 1e-3, "{stored}");
    for phase in &r.phases {
        assert_eq!(phase.series.times[0], 0.0);
    }
}

#[test]
fn long_hold_beats_free_decay() {
    let p = CircuitParams::reference();
    let hold = 10.0 / p.gamma_q;
    let schedule = ProtocolSchedule::resonant(&p, 0.5, hold, ModelKind::RwaEffective).unwrap();
    let r = run_swap_protocol(&p, &schedule, None, &ProtocolSettings::default()).unwrap();
    assert!(r.fidelity > r.baseline_fidelity, "{} vs {}", r.fidelity, r.baseline_fidelity);
    assert!((r.baseline_fidelity - baseline_oracle(&p, r.total_time)).abs() < 1e-6);
}

/// Two-level relaxation towards the thermal excited population n/(2n+1).
fn baseline_oracle(p: &CircuitParams, t: f64) -> f64 {
    let omega_q = coupling_set(p, 0.0).unwrap().omega_q;
    let n = shuttle_core::dynamics::thermal_occupation(omega_q, p.temperature).unwrap();
    let rate = p.gamma_q * (2.0 * n + 1.0);
    let stationary = n / (2.0 * n + 1.0);
    stationary + (1.0 - stationary) * (-rate * t).exp()
}

#[test]
fn truncation_converged_for_rwa_protocol() {
    let p = CircuitParams::reference();
    let schedule = ProtocolSchedule::resonant(&p, 0.5, 1000.0, ModelKind::RwaEffective).unwrap();
    let settings = ProtocolSettings {
        check_convergence: true,
        ..ProtocolSettings::default()
    };
    let r = run_swap_protocol(&p, &schedule, None, &settings).unwrap();
    assert!(r.convergence_change.unwrap() < 1e-6);
}

#[test]
fn rwa_model_conserves_excitations() {
    let n = 8;
    let ops = make_operators(n).unwrap();
    let p = lossless();
    let swap = effective_swap_params(&p, 0.5).unwrap();
    let model = build_rwa_model(&p, &FluxDrive::modulated(0.5, swap.omega_bar), &ops).unwrap();
    let mut psi = basis_ket(Qubit::Excited, 2, n).unwrap() * Complex64::new(0.6, 0.0);
    psi += basis_ket(Qubit::Ground, 0, n).unwrap() * Complex64::new(0.0, 0.8);
    let rho0 = DensityMatrix::pure(&psi).unwrap();
    let out = evolve(
        &model,
        &rho0,
        (0.0, 400.0),
        &EvolveOptions::default(),
        &[Observable::expectation("n_exc", ops.excitation_number())],
    )
    .unwrap();
    let column = out.series.column("n_exc").unwrap();
    for v in column {
        assert!((v - column[0]).abs() < 1e-8);
    }
    assert!((column[0] - 0.36 * 3.0).abs() < 1e-12);
}

#[test]
fn thermal_ground_population() {
    let n = 40;
    let rho = make_state(&StateSpec::ThermalGround { n_th: 0.87 }, n).unwrap();
    let f = fidelity(&rho, &basis_ket(Qubit::Ground, 0, n).unwrap()).unwrap();
    assert!((f - 1.0 / 1.87).abs() < 1e-10, "{f}");
}

#[test]
fn orthogonal_and_identical_states() {
    let n = 3;
    let e0 = basis_ket(Qubit::Excited, 0, n).unwrap();
    let rho = DensityMatrix::pure(&e0).unwrap();
    assert_eq!(fidelity(&rho, &e0).unwrap(), 1.0);
    assert_eq!(fidelity(&rho, &basis_ket(Qubit::Ground, 1, n).unwrap()).unwrap(), 0.0);
}

#[test]
fn schedule_rejects_bad_inputs() {
    let p = CircuitParams::reference();
    assert!(matches!(
        ProtocolSchedule::resonant(&p, 3.2, 10.0, ModelKind::LabFrame),
        Err(Error::Domain(_))
    ));
    let mut s = ProtocolSchedule::resonant(&p, 0.5, 10.0, ModelKind::RwaEffective).unwrap();
    s.swap_in.duration = -1.0;
    assert!(run_swap_protocol(&p, &s, None, &ProtocolSettings::default()).is_err());
    s.swap_in.duration = 10.0;
    s.hold = f64::NAN;
    assert!(run_swap_protocol(&p, &s, None, &ProtocolSettings::default()).is_err());
}

/// Cosine coefficients of a 2π-periodic function by the trapezoid rule.
fn cosine_coefficient(f: &dyn Fn(f64) -> f64, m: i32, points: usize) -> f64 {
    let h = TAU / points as f64;
    2.0 / points as f64 * (0..points).map(|j| f(h * j as f64) * (m as f64 * h * j as f64).cos()).sum::<f64>()
}

/// Even harmonic k of g1(θ)·e^{iΦ(θ)}, Φ = θ − a·sin 2θ, from the Jacobi–Anger expansion.
fn bessel_harmonic(g: &[(i32, f64)], a: f64, k: i32) -> f64 {
    g.iter()
        .map(|&(m, gm)| {
            let first = (m + 1 - k) / 2;
            let second = (1 - m - k) / 2;
            0.5 * gm * (bessel_j(first, a) + bessel_j(second, a))
        })
        .sum()
}

#[test]
fn exchange_spectrum_matches_jacobi_anger_expansion() {
    let p = CircuitParams::reference();
    let phi0 = 0.5;
    let probe = FluxDrive::modulated(phi0, 1.0);
    let omega_q = |theta: f64| modulated_coefficients(&p, &probe, theta).unwrap().omega_q;
    let g1 = |theta: f64| modulated_coefficients(&p, &probe, theta).unwrap().g1;
    let points = 1024;
    let mean = 0.5 * cosine_coefficient(&omega_q, 0, points);
    let b2 = -cosine_coefficient(&omega_q, 2, points);
    let omega_m = coupling_set(&p, 0.0).unwrap().omega_m;
    let omega_bar = mean - omega_m;
    let a = b2 / (2.0 * omega_bar);
    let g: Vec<(i32, f64)> = [1, 3, 5, 7].iter().map(|&m| (m, cosine_coefficient(&g1, m, points))).collect();

    let drive = FluxDrive::modulated(phi0, omega_bar);
    let s = sideband_spectrum(&p, &drive, 40, 512, 3).unwrap();
    let dc = s.amplitude(0).unwrap();
    let expected_dc = bessel_harmonic(&g, a, 0);
    assert!((dc - Complex64::new(expected_dc, 0.0)).norm() < 1e-4 * expected_dc.abs(), "{dc} vs {expected_dc}");
    let k2 = s.amplitude(2).unwrap();
    let expected_k2 = bessel_harmonic(&g, a, 2);
    assert!((k2.norm() - expected_k2.abs()).abs() < 1e-4 * expected_dc.abs(), "{k2} vs {expected_k2}");
    for k in [-1, 1] {
        assert!(s.amplitude(k).unwrap().norm() < 1e-3 * dc.norm());
    }
    // The resonant element carries half of the fundamental Fourier amplitude.
    assert!((dc.norm() - 0.5 * g[0].1.abs()).abs() < 0.01 * dc.norm());
    let swap = effective_swap_params(&p, phi0).unwrap();
    let ratio = dc.norm() / swap.g_sw.abs();
    assert!(ratio > 0.5 && ratio < 0.6, "{ratio}");
}

#[test]
fn pure_state_stays_pure_without_loss_under_resolved_drive() {
    use shuttle_core::protocol::build_lab_frame_model;
    let p = lossless();
    let n = 4;
    let ops = make_operators(n).unwrap();
    let swap = effective_swap_params(&p, 0.5).unwrap();
    let model = build_lab_frame_model(&p, &FluxDrive::modulated(0.5, swap.omega_bar), &ops).unwrap();
    let mut psi = CVector::zeros(2 * n);
    psi[0] = Complex64::new(PI.sqrt().recip(), 0.0);
    psi[n + 1] = Complex64::new((1.0 - 1.0 / PI).sqrt(), 0.0);
    let rho0 = DensityMatrix::pure(&psi).unwrap();
    let out = evolve(
        &model,
        &rho0,
        (0.0, 20.0),
        &EvolveOptions {
            dt: Some(1e-3),
            samples: 20,
            ..EvolveOptions::default()
        },
        &[Observable::purity()],
    )
    .unwrap();
    for v in out.series.column("purity").unwrap() {
        assert!((v - 1.0).abs() < 1e-8 && *v <= 1.0 + 1e-9);
    }
    assert!(out.final_state.hermiticity_residual() < 1e-10);
}
