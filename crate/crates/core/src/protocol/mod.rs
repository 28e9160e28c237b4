//! The flux-driven swap–hold–swap protocol in the exact and rotating-wave
//! models.

mod models;
mod run;
mod validate;

pub use models::{
    build_hold_model, build_lab_frame_model, build_rwa_model, effective_swap_params, environment,
    lab_frame_coefficients, lab_frame_terms, ModelKind, SwapParams,
};
pub use run::{
    fidelity, free_decay_baseline, memory_advantage_scan, memory_crossover, run_swap_protocol,
    MemoryPoint, PhaseResult, PhaseSpec, ProtocolResult, ProtocolSchedule, ProtocolSettings,
    CONVERGENCE_THRESHOLD,
};
pub use validate::{
    sideband_spectrum, validate_rwa, RwaValidation, SidebandSpectrum, Transfer, ValidationSettings,
};
