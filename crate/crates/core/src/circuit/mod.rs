//! Device parameters and the closed-form qubit–mechanics coefficients.

mod coupling;
mod params;
mod sweep;

pub use coupling::{
    approx_drive_params, coupling_set, modulated_coefficients, symmetric_g1_closed_form,
    CouplingSet, DriveExpansion,
};
pub use params::{
    charging_energy, josephson_energy_pair, mass_for_zpf, qubit_zpf, x_zpf_from_mass,
    xi_from_tunneling, Capacitances, CircuitParams, FluxDrive,
};
pub use sweep::{find_crossover, flux_sweep, linspace, Crossover, SweepRow};
