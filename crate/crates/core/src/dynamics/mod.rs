//! Lindblad master-equation integration.

mod integrate;
mod model;
mod thermal;

pub use integrate::{
    evolve, EvolveOptions, Evolution, Method, Observable, ObservableKind, TimeSeries,
    NEGATIVITY_LIMIT, STEPS_PER_PERIOD, TRACE_DRIFT_LIMIT,
};
pub use model::{lindblad_rhs, CoefficientFn, Collapse, Hamiltonian, LindbladModel};
pub use thermal::{thermal_collapses, thermal_occupation};
pub(crate) use model::spectral_width;
