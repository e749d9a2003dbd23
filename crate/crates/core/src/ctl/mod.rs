//! Computation tree logic: syntax, parser, model checker and separators.

mod check;
mod distinguish;
mod formula;
mod parser;

pub use check::{check_ctl, holds, sat_vector, SatSet};
pub use distinguish::distinguishing_formula;
pub use formula::{Ctl, PathFormula};
pub use parser::parse_ctl;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtlError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("states {s} and {t} are bisimilar; no formula separates them")]
    Bisimilar { s: usize, t: usize },
    #[error(transparent)]
    Parse(#[from] crate::syntax::ParseError),
}
