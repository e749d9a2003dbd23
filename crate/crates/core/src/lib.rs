//! Finite transition systems, CTL, and the modal logic of abstraction refinement.
//!
//! The crate is organised bottom-up:
//!
//! - [`ts`]: transition systems, quotients, abstraction functions, bisimulation, isomorphism.
//! - [`ctl`]: CTL syntax, parser, explicit-state model checker, distinguishing formulas.
//! - [`modal`]: modal formulas, Kripke frames, exhaustive validity, frame families.
//! - [`general`]: general frames whose worlds are abstractions and whose admissible
//!   valuations are CTL-definable.
//! - [`control`]: buttons, switches, decisions and independence checks.
//! - [`labeling`]: F-labelings and countermodel transfer.
//! - [`corpus`]: the example systems and gadget families.
//! - [`cli`]: the command-line front end.

pub mod bitset;
pub mod cli;
pub mod control;
pub mod corpus;
pub mod ctl;
pub mod general;
pub mod labeling;
pub mod modal;
pub mod syntax;
pub mod ts;

pub use ctl::{check_ctl, parse_ctl, Ctl};
pub use modal::{parse_modal, KripkeFrame, Modal};
pub use ts::{TransitionSystem, TsBuilder};
