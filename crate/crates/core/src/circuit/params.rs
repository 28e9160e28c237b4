use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, HBAR, RESISTANCE_QUANTUM};

/// Geometric capacitances of the lumped circuit, in farads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capacitances {
    /// Equilibrium capacitance of either junction; zero neglects the junction
    /// geometry entirely.
    pub c_j: f64,
    /// Shunt capacitance.
    pub c_b: f64,
    /// Gate capacitance.
    pub c_g: f64,
}

impl Capacitances {
    /// C_Σ at rest: 2C_J + C_b + C_g.
    pub fn total_at_rest(&self) -> f64 {
        2.0 * self.c_j + self.c_b + self.c_g
    }
}

/// Physical parameters of the shuttle transmon and its environment.
///
/// Energies, frequencies and rates are in Grad/s, lengths in meters, mass in
/// kilograms, temperature in kelvin. When `capacitances` is present the
/// charging energy is derived from it and `e_c` is only informative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub e_j1: f64,
    pub e_j2: f64,
    pub e_c: f64,
    pub capacitances: Option<Capacitances>,
    /// Equilibrium electrode gap.
    pub x0: f64,
    /// Tunneling length of the junction barrier.
    pub xi: f64,
    pub mass: f64,
    /// Bare mechanical frequency.
    pub omega_m0: f64,
    /// Mechanical zero-point amplitude.
    pub x_zpf: f64,
    /// Gate charge; carried for completeness, the two-level model ignores it.
    pub n_g: f64,
    /// Mechanical damping rate γ.
    pub gamma_m: f64,
    /// Qubit damping rate γ_σ.
    pub gamma_q: f64,
    /// Bath temperature shared by qubit and mechanics.
    pub temperature: f64,
}

impl CircuitParams {
    /// The symmetric reference device: E_J = 20, E_C = 1, ω_m0 = 1 Grad/s,
    /// x_ZPF/ξ = 3·10⁻³, γ = 1 kHz, γ_σ = 100 kHz, T = 10 mK.
    pub fn reference() -> Self {
        let omega_m0 = 1.0;
        let xi = 1.0e-10;
        let x_zpf = 3.0e-3 * xi;
        CircuitParams {
            e_j1: 20.0,
            e_j2: 20.0,
            e_c: 1.0,
            capacitances: None,
            x0: 1.0e-9,
            xi,
            mass: mass_for_zpf(x_zpf, omega_m0),
            omega_m0,
            x_zpf,
            n_g: 0.0,
            gamma_m: units::khz_to_grad(1.0),
            gamma_q: units::khz_to_grad(100.0),
            temperature: 10.0e-3,
        }
    }

    /// Replace the charging energy by the one implied by `caps`.
    pub fn with_capacitances(mut self, caps: Capacitances) -> Self {
        self.e_c = units::charging_energy_of(caps.total_at_rest());
        self.capacitances = Some(caps);
        self
    }

    /// Set the shuttle mass and derive x_ZPF from it and ω_m0.
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self.x_zpf = x_zpf_from_mass(mass, self.omega_m0);
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.e_j1 == self.e_j2
    }

    /// x_ZPF/ξ, the small parameter of the displacement expansion.
    pub fn zpf_ratio(&self) -> f64 {
        self.x_zpf / self.xi
    }

    pub fn c_j(&self) -> f64 {
        self.capacitances.map_or(0.0, |c| c.c_j)
    }

    /// Charging energy at rest, E_C(0).
    pub fn e_c0(&self) -> f64 {
        match self.capacitances {
            Some(caps) => units::charging_energy_of(caps.total_at_rest()),
            None => self.e_c,
        }
    }

    /// Check the parameter invariants. Returns soft warnings for regimes
    /// outside the expansion's intended validity.
    pub fn validate(&self) -> Result<Vec<String>> {
        let positive = [
            ("e_j1", self.e_j1),
            ("e_j2", self.e_j2),
            ("e_c", self.e_c0()),
            ("x0", self.x0),
            ("xi", self.xi),
            ("mass", self.mass),
            ("omega_m0", self.omega_m0),
            ("x_zpf", self.x_zpf),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        let non_negative = [
            ("gamma_m", self.gamma_m),
            ("gamma_q", self.gamma_q),
            ("temperature", self.temperature),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(format!("{name} must be non-negative, got {value}")));
            }
        }
        if !self.n_g.is_finite() {
            return Err(Error::invalid("n_g must be finite"));
        }
        if let Some(caps) = self.capacitances {
            if !(caps.c_j >= 0.0 && caps.c_b >= 0.0 && caps.c_g >= 0.0)
                || caps.total_at_rest() <= 0.0
            {
                return Err(Error::invalid(format!(
                    "capacitances must be non-negative with a positive total, got {caps:?}"
                )));
            }
        }

        let mut warnings = Vec::new();
        if !(self.x_zpf < self.xi && self.xi < self.x0) {
            warnings.push(format!(
                "expected x_zpf < xi < x0, got x_zpf = {:e} m, xi = {:e} m, x0 = {:e} m",
                self.x_zpf, self.xi, self.x0
            ));
        }
        if self.capacitances.is_some() && (self.e_c - self.e_c0()).abs() > 1e-9 * self.e_c0() {
            warnings.push(format!(
                "e_c = {} ignored; capacitances give E_C(0) = {}",
                self.e_c,
                self.e_c0()
            ));
        }
        Ok(warnings)
    }
}

/// Static flux bias plus cosine modulation φ_b(t) = φ_static + φ_b0·cos(ω̄t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxDrive {
    pub phi_b_static: f64,
    pub phi_b0: f64,
    pub omega_bar: f64,
}

impl FluxDrive {
    pub fn idle() -> Self {
        FluxDrive::fixed(0.0)
    }

    pub fn fixed(phi_b: f64) -> Self {
        FluxDrive {
            phi_b_static: phi_b,
            phi_b0: 0.0,
            omega_bar: 0.0,
        }
    }

    pub fn modulated(phi_b0: f64, omega_bar: f64) -> Self {
        FluxDrive {
            phi_b_static: 0.0,
            phi_b0,
            omega_bar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi_b_static.is_finite() && self.phi_b0.is_finite() && self.omega_bar.is_finite())
        {
            return Err(Error::invalid(format!("non-finite flux drive {self:?}")));
        }
        if self.omega_bar < 0.0 {
            return Err(Error::invalid(format!(
                "drive frequency must be non-negative, got {}",
                self.omega_bar
            )));
        }
        let excursion = self.phi_b_static.abs() + self.phi_b0.abs();
        if excursion >= std::f64::consts::PI {
            return Err(Error::domain(format!(
                "flux excursion |phi_static| + |phi_b0| = {excursion} reaches pi"
            )));
        }
        Ok(())
    }

    /// Instantaneous flux phase at `t` (ns).
    pub fn phase_at(&self, t: f64) -> f64 {
        self.phi_b_static + self.phi_b0 * (self.omega_bar * t).cos()
    }

    pub fn is_idle(&self) -> bool {
        self.phi_b0 == 0.0
    }
}

/// Tunneling length from the junction's gap and normal-state resistance:
/// ξ = x0 / ln[Δ·R_K / (8·E_J·R_N0)].
///
/// `gap` and `e_j` are in Grad/s, `r_n0` in ohms; the result has the units of
/// `x0`.
pub fn xi_from_tunneling(x0: f64, gap: f64, e_j: f64, r_n0: f64) -> Result<f64> {
    for (name, value) in [("x0", x0), ("gap", gap), ("e_j", e_j), ("r_n0", r_n0)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {value}")));
        }
    }
    let ratio = gap * RESISTANCE_QUANTUM / (8.0 * e_j * r_n0);
    if ratio <= 1.0 {
        return Err(Error::domain(format!(
            "junction transparency too high (gap·R_K/(8·E_J·R_N0) = {ratio} <= 1)"
        )));
    }
    Ok(x0 / ratio.ln())
}

/// Harmonic-oscillator zero-point amplitude sqrt(ħ/(2mω)) in meters, for a
/// mass in kg and ω in Grad/s.
pub fn x_zpf_from_mass(mass: f64, omega_m: f64) -> f64 {
    (HBAR / (2.0 * mass * omega_m * units::GRAD_PER_S)).sqrt()
}

/// Mass whose zero-point amplitude at `omega_m` equals `x_zpf`.
pub fn mass_for_zpf(x_zpf: f64, omega_m: f64) -> f64 {
    HBAR / (2.0 * omega_m * units::GRAD_PER_S * x_zpf * x_zpf)
}

/// Josephson energies of both junctions for a shuttle displaced by `delta`
/// meters towards junction 2: (E_J1·e^{−δ/ξ}, E_J2·e^{+δ/ξ}).
pub fn josephson_energy_pair(params: &CircuitParams, delta: f64) -> (f64, f64) {
    let u = delta / params.xi;
    (params.e_j1 * (-u).exp(), params.e_j2 * u.exp())
}

/// Charging energy with parallel-plate junction capacitances
/// C_J/(1 ± δ/x0). Without capacitances the configured E_C is returned.
pub fn charging_energy(params: &CircuitParams, delta: f64) -> Result<f64> {
    if !(delta.abs() < params.x0) {
        return Err(Error::domain(format!(
            "shuttle contacts electrode (|delta| = {:e} m >= x0 = {:e} m)",
            delta.abs(),
            params.x0
        )));
    }
    match params.capacitances {
        Some(caps) => {
            let u = delta / params.x0;
            let total = caps.c_j / (1.0 + u) + caps.c_j / (1.0 - u) + caps.c_b + caps.c_g;
            Ok(units::charging_energy_of(total))
        }
        None => Ok(params.e_c),
    }
}

/// Qubit zero-point fluctuations of charge and phase, (n_ZPF, φ_ZPF).
pub fn qubit_zpf(e_c: f64, e_j_sum: f64, phi_b: f64) -> Result<(f64, f64)> {
    if !(e_c > 0.0 && e_j_sum > 0.0) {
        return Err(Error::invalid(format!(
            "energies must be positive, got e_c = {e_c}, e_j_sum = {e_j_sum}"
        )));
    }
    let cos_half = flux_cosine(phi_b)?;
    let effective = e_j_sum * cos_half;
    let n_zpf = (effective / (32.0 * e_c)).powf(0.25);
    let phi_zpf = (2.0 * e_c / effective).powf(0.25);
    Ok((n_zpf, phi_zpf))
}

/// cos(φ_b/2), rejecting biases at or beyond ±π where the effective
/// Josephson energy vanishes.
pub(crate) fn flux_cosine(phi_b: f64) -> Result<f64> {
    let c = (0.5 * phi_b).cos();
    if !(phi_b.abs() < std::f64::consts::PI) || c <= 0.0 {
        return Err(Error::domain(format!("flux bias at or beyond pi (phi_b = {phi_b})")));
    }
    Ok(c)
}
