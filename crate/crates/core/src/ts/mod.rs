//! Finite labelled transition systems and the abstraction relation between them.

mod abstraction;
mod bisim;
mod construct;
mod io;
mod iso;
mod partition;
mod system;

pub use abstraction::{
    compose, find_abstraction, is_abstraction, AbstractionViolation, AbstractionWitness, Condition, SearchOutcome,
    DEFAULT_SEARCH_NODES,
};
pub use bisim::{bisim_classes, BisimPartition};
pub use construct::{common_refinement, path_isolating_refinement, Lasso};
pub(crate) use io::dot_escape;
pub use io::{ts_from_json, ts_to_dot, ts_to_json, TsFile};
pub use iso::{canonical_form, iso_check, CanonicalForm};
pub use partition::{quotient, Partition};
pub use system::{Diagnostic, LabelSet, TransitionSystem, TsBuilder};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TsError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateIndex(usize),
    #[error("no label entry for state `{0}`")]
    MissingLabel(String),
    #[error("duplicate atomic proposition `{0}`")]
    DuplicateProp(String),
    #[error("invalid transition system: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("partition does not cover the states exactly: {0}")]
    BadPartition(String),
    #[error("block {{{}}} is not label-uniform", .0.join(", "))]
    NotLabelUniform(Vec<String>),
    #[error("atomic proposition sets differ")]
    ApMismatch,
    #[error("witness map has length {got}, expected {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("witnesses do not share the fine system")]
    WitnessMismatch,
    #[error("lasso for `{initial}` is invalid at step {step}: {reason}")]
    BadLasso { initial: String, step: usize, reason: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
