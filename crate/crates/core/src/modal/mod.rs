//! Modal formulas, Kripke frames and exhaustive frame validity.

mod families;
mod formula;
mod frame;
mod iso;
mod properties;
mod semantics;

pub use families::{gen_fpf, gen_lollipop, gen_preboolean};
pub use formula::{axioms, parse_modal, Modal};
pub(crate) use frame::hasse_edges;
pub use frame::{valuation_from_names, valuation_to_names, FrameFile, KripkeFrame, Valuation};
pub use iso::order_iso;
pub use properties::{frame_properties, FrameReport, PropertyCheck};
pub(crate) use semantics::valuation_count;
pub use semantics::{eval_modal, extension, valid_on_frame, Validity, DEFAULT_VALUATION_BUDGET};

use thiserror::Error;

use crate::syntax::ParseError;

#[derive(Debug, Error)]
pub enum ModalError {
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("world index {0} out of range")]
    WorldIndex(usize),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("no valuation for proposition `{0}`")]
    MissingProp(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
