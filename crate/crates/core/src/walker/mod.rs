//! Seeded random walks on subgroups of SL_n(Z).
//!
//! A walk multiplies, at every step, the current exact state by a generator
//! chosen uniformly among the slots of a [`GenSet`]. Each walk can carry
//! modular shadows that are updated by modular multiplication alongside the
//! exact state. Sample `i` of an experiment with seed `s` draws from the
//! ChaCha8 stream `i` of the generator seeded with `s`, so results do not
//! depend on how samples are scheduled across threads.

mod decay;
mod estimate;
mod genset;
mod walk;

use thiserror::Error;

use crate::exactmat::ExactMatError;
use crate::modgroup::ModGroupError;

pub use decay::{decay_fit, DecayFit, FitDiagnostics};
pub use estimate::{
    estimate_event, estimate_series, evaluate_event, wilson_interval, wilson_upper, DecayEstimate,
    Event, WILSON_Z95,
};
pub use genset::{admissibility_check, Admissibility, GenSet};
pub use walk::{run_walk, sample_rng, WalkState, Walker};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("generating multiset is not admissible: {0:?}")]
    NotAdmissible(Admissibility),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("unknown event `{0}`; expected proper_power, m_power:<m>, virtually_unipotent or trace_equals:<t>")]
    UnknownEvent(String),
    #[error("decay fit needs at least 4 distinct step counts with samples, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    ExactMat(#[from] ExactMatError),
    #[error(transparent)]
    ModGroup(#[from] ModGroupError),
}
