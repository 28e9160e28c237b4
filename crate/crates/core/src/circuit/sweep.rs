use serde::{Deserialize, Serialize};

use super::coupling::coupling_set;
use super::params::CircuitParams;
use crate::error::{Error, Result};

/// One flux-bias point of a coupling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi_b: f64,
    pub g1: f64,
    pub g2: f64,
    pub omega_q: f64,
    pub omega_m: f64,
    pub omega_p0: f64,
}

/// Evaluate the two-level couplings at each grid point. Points outside the
/// flux domain yield an error entry carrying the offending bias.
pub fn flux_sweep(params: &CircuitParams, phi_grid: &[f64]) -> Vec<Result<SweepRow>> {
    phi_grid
        .iter()
        .map(|&phi_b| {
            coupling_set(params, phi_b)
                .map(|s| SweepRow {
                    phi_b,
                    g1: s.g1,
                    g2: s.g2,
                    omega_q: s.omega_q,
                    omega_m: s.omega_m,
                    omega_p0: s.omega_p0,
                })
                .map_err(|e| match e {
                    Error::Domain(msg) => Error::Domain(format!("phi_b = {phi_b}: {msg}")),
                    other => other,
                })
        })
        .collect()
}

/// Flux bias where the transverse coupling first overtakes the dispersive one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub phi_b: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
}

/// Locate the first positive φ_b on `phi_grid` where |g1| − |g2| changes sign
/// from negative to non-negative, then bisect to width `tolerance`.
pub fn find_crossover(
    params: &CircuitParams,
    phi_grid: &[f64],
    tolerance: f64,
) -> Result<Option<Crossover>> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tolerance}")));
    }
    let excess = |phi: f64| -> Result<f64> {
        let s = coupling_set(params, phi)?;
        Ok(s.g1.abs() - s.g2.abs())
    };
    let mut grid: Vec<f64> = phi_grid.iter().copied().filter(|&p| p >= 0.0).collect();
    grid.sort_by(f64::total_cmp);

    for pair in grid.windows(2) {
        let (mut lo, mut hi) = (pair[0], pair[1]);
        if !(excess(lo)? < 0.0 && excess(hi)? >= 0.0) {
            continue;
        }
        while hi - lo > tolerance {
            let mid = 0.5 * (lo + hi);
            if excess(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(Some(Crossover {
            phi_b: 0.5 * (lo + hi),
            bracket: (lo, hi),
        }));
    }
    Ok(None)
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}
