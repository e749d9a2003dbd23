//! General frames whose worlds are finite systems ordered by refinement and
//! whose admissible valuations are the CTL-definable world sets.

mod bundle;
mod enumerate;
mod eval;
mod frame;

pub use bundle::{BundleFile, BundleWorld};
pub use enumerate::{
    enumerate_abstractions, enumerate_within, partition_id, restricted_growth_strings, worlds_from_partitions, Caps,
    Enumeration,
    RelationMode, World, WorldMode,
};
pub use eval::{eval_general, valid_on_general, verify_witness, AdmissibleValuation, GeneralValidity, GeneralWitness};
pub use frame::{build_general_frame, Candidate, GeneralFrame};

use thiserror::Error;

use crate::ctl::CtlError;
use crate::modal::ModalError;
use crate::ts::TsError;

#[derive(Debug, Error)]
pub enum GeneralError {
    #[error(transparent)]
    Ts(#[from] TsError),
    #[error(transparent)]
    Ctl(#[from] CtlError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error("seed has {states} states, cap is {cap}")]
    TooManyStates { states: usize, cap: usize },
    #[error("world `{0}` has no seed partition; coarsen mode needs one")]
    NoProvenance(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world index {0} out of range")]
    WorldIndex(usize),
    #[error("unknown block {0}")]
    UnknownBlock(usize),
    #[error("no valuation for proposition `{0}`")]
    MissingProp(String),
    #[error("stated blocks differ from the computed CTL-equivalence blocks")]
    BlockMismatch,
    #[error("formula `{formula}` does not define block {block}")]
    BadBlockFormula { block: usize, formula: String },
    #[error("witness failed re-verification: {0}")]
    WitnessFailed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}
