//! Bessel functions of the first kind for the small arguments met in
//! sideband drive expansions.

/// J_n(x) by its ascending power series.
///
/// Accurate to a few ulps for |x| ≲ 10; the alternating series loses digits
/// to cancellation beyond that.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let order = n.unsigned_abs();
    let value = bessel_j_series(order, x);
    if n < 0 && order % 2 == 1 {
        -value
    } else {
        value
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j_series(0, x)
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..500u32 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
