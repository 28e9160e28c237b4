//! Physical constants and unit conversions.
//!
//! Energies, frequencies and rates are angular frequencies in Grad/s
//! (10⁹ rad/s, ħ = 1), times are in ns, so `ω·t` is a phase in radians.
//! Lengths, masses and capacitances stay in SI units.

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// One Grad/s in rad/s.
pub const GRAD_PER_S: f64 = 1.0e9;
/// Resistance quantum R_K = 2πħ/e², Ω.
pub const RESISTANCE_QUANTUM: f64 =
    2.0 * std::f64::consts::PI * HBAR / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);

/// Energy in joules to angular frequency in Grad/s.
pub fn joules_to_grad(energy: f64) -> f64 {
    energy / HBAR / GRAD_PER_S
}

/// Angular frequency in Grad/s to energy in joules.
pub fn grad_to_joules(omega: f64) -> f64 {
    omega * GRAD_PER_S * HBAR
}

/// Rates quoted in "kHz" are 10³ rad/s.
pub fn khz_to_grad(rate: f64) -> f64 {
    rate * 1.0e-6
}

pub fn grad_to_khz(rate: f64) -> f64 {
    rate * 1.0e6
}

/// k_B·T/ħ in Grad/s for a temperature in kelvin.
pub fn thermal_frequency(temperature: f64) -> f64 {
    BOLTZMANN * temperature / HBAR / GRAD_PER_S
}

/// Charging energy e²/2C in Grad/s for a total capacitance in farads.
pub fn charging_energy_of(capacitance: f64) -> f64 {
    joules_to_grad(ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * capacitance))
}

/// Inverse of [`charging_energy_of`].
pub fn capacitance_of(e_c: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * grad_to_joules(e_c))
}
