use crate::error::{Error, Result};
use crate::hilbert::CMatrix;
use crate::units;

use super::model::Collapse;

/// Bose–Einstein occupation 1/(e^{ħω/k_BT} − 1) for ω in Grad/s, T in kelvin.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!("frequency must be positive, got {omega}")));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::invalid(format!("temperature must be non-negative, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = omega / units::thermal_frequency(temperature);
    Ok(1.0 / x.exp_m1())
}

/// Emission at γ(n_th + 1) and absorption at γ·n_th.
pub fn thermal_collapses(
    op_down: &CMatrix,
    op_up: &CMatrix,
    gamma: f64,
    n_th: f64,
) -> Result<Vec<Collapse>> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid(format!("damping rate must be non-negative, got {gamma}")));
    }
    if !(n_th.is_finite() && n_th >= 0.0) {
        return Err(Error::invalid(format!("thermal occupation must be non-negative, got {n_th}")));
    }
    Ok(vec![
        Collapse::new(op_down.clone(), gamma * (n_th + 1.0)),
        Collapse::new(op_up.clone(), gamma * n_th),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::make_operators;

    #[test]
    fn mechanical_occupation_at_ten_millikelvin() {
        let n = thermal_occupation(1.0, 10.0e-3).unwrap();
        assert!((n - 0.872).abs() < 0.005, "{n}");
    }

    #[test]
    fn qubit_occupation_at_ten_millikelvin() {
        let n = thermal_occupation(16.9, 10.0e-3).unwrap();
        let x: f64 = 16.9 / (crate::units::BOLTZMANN * 1e-2 / crate::units::HBAR / 1e9);
        assert!((n * x.exp_m1() - 1.0).abs() < 1e-12);
        assert!((n - (-x).exp()).abs() < 1e-5 * n);
        assert!(n > 2.0e-6 && n < 3.0e-6, "{n}");
    }

    #[test]
    fn zero_temperature() {
        assert_eq!(thermal_occupation(0.3, 0.0).unwrap(), 0.0);
        assert!(thermal_occupation(0.0, 0.01).is_err());
        assert!(thermal_occupation(-1.0, 0.01).is_err());
    }

    #[test]
    fn collapse_rates() {
        let ops = make_operators(3).unwrap();
        let c = thermal_collapses(&ops.b, &ops.b_dag, 2.0, 0.0).unwrap();
        assert_eq!(c[0].rate, 2.0);
        assert_eq!(c[1].rate, 0.0);
        let c = thermal_collapses(&ops.b, &ops.b_dag, 0.0, 3.0).unwrap();
        assert!(c.iter().all(|c| c.rate == 0.0));
        let c = thermal_collapses(&ops.b, &ops.b_dag, 1.5, 0.5).unwrap();
        assert_eq!((c[0].rate, c[1].rate), (2.25, 0.75));
        assert!(thermal_collapses(&ops.b, &ops.b_dag, -1.0, 0.0).is_err());
        assert!(thermal_collapses(&ops.b, &ops.b_dag, 1.0, -0.1).is_err());
    }
}
