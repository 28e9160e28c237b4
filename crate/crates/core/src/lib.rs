//! Simulation of a shuttle transmon: a superconducting island oscillating
//! between two electrodes, each contact a displacement-dependent Josephson
//! junction.
//!
//! [`circuit`] turns device parameters into qubit–mechanics couplings,
//! [`hilbert`] and [`dynamics`] integrate the open-system evolution, and
//! [`protocol`] runs the flux-driven state swap between qubit and mechanics.
//! Units are summarized in [`units`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod protocol;
pub mod special;
pub mod units;

pub use circuit::{CircuitParams, CouplingSet, FluxDrive};
pub use dynamics::{LindbladModel, TimeSeries};
pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, OperatorSet};
pub use protocol::{ModelKind, ProtocolResult, ProtocolSchedule};
