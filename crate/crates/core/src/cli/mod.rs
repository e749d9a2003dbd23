//! Command-line front end. [`run`] parses arguments, writes the report and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | a verdict was computed (including "invalid" or "no") |
//! | 1 | usage error: bad flags, unreadable or malformed input |
//! | 2 | inconclusive: a budget or cap stopped the computation |
//! | 3 | internal failure, e.g. a witness that does not re-verify |

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::general::{Caps, RelationMode, WorldMode};
use crate::modal::DEFAULT_VALUATION_BUDGET;
use crate::ts::DEFAULT_SEARCH_NODES;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "refmodal", version, about = "CTL model checking and the modal logic of abstraction refinement")]
pub struct Cli {
    /// Emit a JSON object instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(flatten)]
    pub budgets: Budgets,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Budgets {
    /// Largest seed system accepted for lattice enumeration.
    #[arg(long, global = true, default_value_t = Caps::default().max_states)]
    pub max_states: usize,
    /// Largest number of worlds per frame.
    #[arg(long, global = true, default_value_t = Caps::default().max_worlds)]
    pub max_worlds: usize,
    /// Seed partitions visited before enumeration stops.
    #[arg(long, global = true, default_value_t = Caps::default().max_partitions)]
    pub max_partitions: u64,
    /// Search nodes per abstraction search.
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_NODES)]
    pub search_nodes: u64,
    /// Valuations (or pattern pairs) tried by exhaustive checks.
    #[arg(long, global = true, default_value_t = DEFAULT_VALUATION_BUDGET)]
    pub valuation_budget: u128,
}

impl Budgets {
    pub fn caps(&self) -> Caps {
        Caps {
            max_states: self.max_states,
            max_worlds: self.max_worlds,
            max_partitions: self.max_partitions,
            search_nodes: self.search_nodes,
            valuation_budget: self.valuation_budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Iso,
    Partition,
}

impl From<ModeArg> for WorldMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Iso => WorldMode::Iso,
            ModeArg::Partition => WorldMode::Partition,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Search,
    Coarsen,
}

impl From<RelationArg> for RelationMode {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Search => RelationMode::Search,
            RelationArg::Coarsen => RelationMode::Coarsen,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model check a CTL formula at the initial states of a system.
    CheckCtl {
        /// System file or built-in name.
        #[arg(long)]
        ts: String,
        #[arg(long)]
        formula: String,
    },
    /// Enumerate the abstractions of a system and build their general frame.
    Lattice {
        #[arg(long)]
        ts: String,
        #[arg(long, value_enum, default_value = "iso")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "search")]
        relation: RelationArg,
        /// Write the frame bundle here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Validity of a modal formula on a general frame under CTL-definable valuations.
    Modal {
        /// Frame bundle file or built-in frame name.
        #[arg(long)]
        frame: String,
        /// Modal formula, or an axiom name such as `(.2)`.
        #[arg(long)]
        formula: String,
        /// Check only at this world.
        #[arg(long)]
        world: Option<String>,
        /// Print the CTL realisation of a falsifying valuation.
        #[arg(long)]
        witness: bool,
    },
    /// Write a finite frame from a family: preboolean:n,c | lollipop:n,m | fpf:n.
    FrameGen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validity of a modal formula, or the order properties, of a plain finite frame.
    FrameCheck {
        /// Frame file or family spec (see frame-gen).
        #[arg(long)]
        frame: String,
        #[arg(long, conflicts_with = "props", required_unless_present = "props")]
        formula: Option<String>,
        #[arg(long)]
        props: bool,
    },
    /// Check one control statement at a world.
    Control {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        world: Option<String>,
        /// pure-button | pure-weak-button | switch | restricted-switch | decision
        #[arg(long)]
        kind: String,
        #[arg(long)]
        ctl: String,
        /// Restrictor, for restricted switches.
        #[arg(long)]
        restrictor: Option<String>,
        /// Right half, for decisions.
        #[arg(long)]
        partner: Option<String>,
    },
    /// Check independence of a family of control statements.
    Independence {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        world: Option<String>,
        #[arg(long, num_args = 1..)]
        buttons: Vec<String>,
        #[arg(long, num_args = 1..)]
        switches: Vec<String>,
        /// Use the restricted schema with this restrictor.
        #[arg(long)]
        until: Option<String>,
        /// Decision pairs, two formulas per occurrence.
        #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"], conflicts_with_all = ["buttons", "switches", "until"])]
        decisions: Vec<String>,
    },
    /// Verify a labeling or transfer a countermodel along it.
    #[command(subcommand)]
    Labeling(LabelingCommand),
    /// Generate a built-in system or frame: family:params.
    Gen {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient a system by a partition file (JSON list of lists of state names).
    Abstract {
        #[arg(long)]
        ts: String,
        #[arg(long)]
        partition_file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an abstraction function from the fine system onto the coarse one.
    Refines {
        #[arg(long)]
        coarse: String,
        #[arg(long)]
        fine: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum LabelingCommand {
    /// Check the labeling conditions above a world.
    Verify {
        #[arg(long)]
        labeling: PathBuf,
        #[arg(long)]
        frame: String,
        #[arg(long)]
        world: Option<String>,
    },
    /// Move a finite countermodel onto the general frame.
    Transfer {
        #[arg(long)]
        labeling: PathBuf,
        #[arg(long)]
        countermodel: PathBuf,
        #[arg(long)]
        frame: String,
        #[arg(long)]
        world: Option<String>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(report) => {
            let _ = out.write_all(report.as_bytes());
            if !report.ends_with('\n') {
                let _ = writeln!(out);
            }
            EXIT_OK
        }
        Err(Failure { report, error: e }) => {
            let _ = out.write_all(report.as_bytes());
            if !report.is_empty() && !report.ends_with('\n') {
                let _ = writeln!(out);
            }
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// A failure together with any report produced before it.
#[derive(Debug)]
pub(crate) struct Failure {
    pub report: String,
    pub error: CliError,
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            report: String::new(),
            error: e.into(),
        }
    }
}
