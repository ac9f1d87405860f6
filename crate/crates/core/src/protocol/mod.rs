//! The repeated parity-probe protocol as a seeded state machine.
//!
//! Each atom: the field damps for `Δt`, the atom picks up the dispersive
//! phase `e^{iφN}` conditioned on its internal state, and detection (or a
//! missed detection) updates the field. Cascade and lambda atoms reduce to
//! the same pair of measurement operators `Π±`.

mod config;
mod engine;
mod probe;
mod rng;

pub use config::{ProtocolConfig, ProtocolSettings, RngAlgorithm, Scheme};
pub use engine::{
    run_ensemble, run_trajectory, run_two_cavity_trajectory, AtomStepRecord, EnsembleStats, Protocol,
    TrajectoryResult,
};
pub use probe::{
    dispersive_step, measure_atom, prepare_atom, AtomState, Branches, FieldLayout, Outcome, ProbeOperators,
};
pub use rng::{derive_seed, TrajectoryRng};
