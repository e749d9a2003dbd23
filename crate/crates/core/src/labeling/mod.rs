//! F-labelings: CTL sentences attached to the nodes of a finite frame so that
//! the refinement structure above an anchor world mirrors the frame. A valid
//! labeling turns any finite countermodel on the frame into a falsifying
//! admissible valuation on the general frame.

mod files;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use files::{CountermodelFile, LabelingFile};

use crate::bitset::BitSet;
use crate::ctl::Ctl;
use crate::general::{eval_general, AdmissibleValuation, GeneralError, GeneralFrame};
use crate::modal::{eval_modal, gen_fpf, gen_lollipop, gen_preboolean, order_iso, KripkeFrame, Modal, ModalError, Valuation};

#[derive(Debug, Error)]
pub enum LabelingError {
    #[error(transparent)]
    General(#[from] GeneralError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error("labeling has {phi} formulas for {nodes} nodes")]
    Arity { phi: usize, nodes: usize },
    #[error("node index {0} out of range")]
    NodeIndex(usize),
    #[error("labeling is not valid: {0}")]
    Invalid(LabelingViolation),
    #[error("countermodel does not falsify `{formula}` at `{root}`")]
    NotACountermodel { formula: String, root: String },
    #[error("countermodel frame differs from the labeling frame")]
    FrameMismatch,
    #[error("transferred valuation does not falsify the formula at the anchor")]
    TransferFailed,
    #[error("no countermodel within a budget of {0} valuations")]
    Budget(u128),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Formulas `phi[w]` for the nodes `w` of `frame`, with a designated root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub frame: KripkeFrame,
    pub root: usize,
    pub phi: Vec<Ctl>,
}

impl Labeling {
    pub fn new(frame: KripkeFrame, root: usize, phi: Vec<Ctl>) -> Result<Self, LabelingError> {
        if phi.len() != frame.len() {
            return Err(LabelingError::Arity { phi: phi.len(), nodes: frame.len() });
        }
        if root >= frame.len() {
            return Err(LabelingError::NodeIndex(root));
        }
        Ok(Labeling { frame, root, phi })
    }
}

/// The first failed labeling condition, with world and node names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelingViolation {
    /// No node formula holds at the world.
    NoNode { world: String },
    /// More than one node formula holds at the world.
    ManyNodes { world: String, nodes: Vec<String> },
    /// From `world`, labelled `node`, some refinement satisfies the formula
    /// of `target` although `node` does not see `target`, or vice versa.
    Reach { world: String, node: String, target: String, reachable: bool },
    /// The anchor does not satisfy the root formula.
    Root { anchor: String, root: String },
}

impl fmt::Display for LabelingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelingViolation::NoNode { world } => write!(f, "no node formula holds at `{world}`"),
            LabelingViolation::ManyNodes { world, nodes } => {
                write!(f, "several node formulas hold at `{world}`: {}", nodes.join(", "))
            }
            LabelingViolation::Reach { world, node, target, reachable: true } => {
                write!(f, "from `{world}` (node `{node}`) the formula of `{target}` is reachable, but `{node}` does not see `{target}`")
            }
            LabelingViolation::Reach { world, node, target, reachable: false } => {
                write!(f, "from `{world}` (node `{node}`) the formula of `{target}` is unreachable, but `{node}` sees `{target}`")
            }
            LabelingViolation::Root { anchor, root } => {
                write!(f, "the anchor `{anchor}` does not satisfy the formula of the root `{root}`")
            }
        }
    }
}

/// Truth set of each node formula on the target frame.
fn node_truth(l: &Labeling, g: &GeneralFrame) -> Result<Vec<BitSet>, LabelingError> {
    Ok(l.phi.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?)
}

/// Checks the three labeling conditions at every world above `anchor`:
/// exactly one node formula holds; the node formulas reachable from a world
/// are exactly those of the nodes its own node sees; the anchor satisfies
/// the root formula. Returns the first violation in world order.
pub fn verify_labeling(l: &Labeling, g: &GeneralFrame, anchor: usize) -> Result<Option<LabelingViolation>, LabelingError> {
    if anchor >= g.len() {
        return Err(GeneralError::WorldIndex(anchor).into());
    }
    let truth = node_truth(l, g)?;
    let wname = |w: usize| g.world(w).id.clone();
    let nname = |v: usize| l.frame.name(v).to_string();
    let above: Vec<usize> = g.upset(anchor).iter().collect();
    let found: Vec<Option<LabelingViolation>> = above
        .par_iter()
        .map(|&d| {
            let nodes: Vec<usize> = (0..l.phi.len()).filter(|v| truth[*v].contains(d)).collect();
            let w = match nodes.as_slice() {
                [] => return Some(LabelingViolation::NoNode { world: wname(d) }),
                [w] => *w,
                _ => {
                    return Some(LabelingViolation::ManyNodes {
                        world: wname(d),
                        nodes: nodes.iter().map(|v| nname(*v)).collect(),
                    })
                }
            };
            (0..l.phi.len()).find_map(|v| {
                let reachable = g.upset(d).intersects(&truth[v]);
                (reachable != l.frame.access(w, v)).then(|| LabelingViolation::Reach {
                    world: wname(d),
                    node: nname(w),
                    target: nname(v),
                    reachable,
                })
            })
        })
        .collect();
    if let Some(v) = found.into_iter().flatten().next() {
        return Ok(Some(v));
    }
    if !truth[l.root].contains(anchor) {
        return Ok(Some(LabelingViolation::Root { anchor: wname(anchor), root: nname(l.root) }));
    }
    Ok(None)
}

/// For a verified labeling: the target worlds above the anchor grouped by
/// node are order-isomorphic to the frame restricted to nodes that occur.
pub fn quotient_matches(l: &Labeling, g: &GeneralFrame, anchor: usize) -> Result<bool, LabelingError> {
    let truth = node_truth(l, g)?;
    let above = g.upset(anchor);
    let used: Vec<usize> = (0..l.phi.len()).filter(|v| truth[*v].intersects(above)).collect();
    let node_of = |d: usize| used.iter().position(|v| truth[*v].contains(d));
    let names: Vec<String> = used.iter().map(|v| l.frame.name(*v).to_string()).collect();
    let quotient = KripkeFrame::from_fn(names.clone(), |a, b| {
        above.iter().any(|d| {
            node_of(d) == Some(a) && g.upset(d).iter().any(|e| above.contains(e) && node_of(e) == Some(b))
        })
    })?;
    let restricted = l.frame.restrict(&used)?;
    Ok(order_iso(&quotient, &restricted).is_some())
}

/// A valuation on a finite frame falsifying `formula` at `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCountermodel {
    pub frame: KripkeFrame,
    pub valuation: Valuation,
    pub root: usize,
    pub formula: Modal,
}

impl FiniteCountermodel {
    pub fn new(frame: KripkeFrame, valuation: Valuation, root: usize, formula: Modal) -> Result<Self, LabelingError> {
        if eval_modal(&frame, &valuation, root, &formula)? {
            return Err(LabelingError::NotACountermodel {
                formula: formula.to_string(),
                root: frame.name(root).to_string(),
            });
        }
        Ok(FiniteCountermodel { frame, valuation, root, formula })
    }

    /// First valuation (in enumeration order) falsifying `formula` at `root`.
    pub fn search(frame: KripkeFrame, root: usize, formula: Modal, budget: u128) -> Result<Option<Self>, LabelingError> {
        let props: Vec<String> = formula.props().into_iter().collect();
        let bits = frame.len() * props.len();
        if bits >= 127 || 1u128 << bits > budget {
            return Err(LabelingError::Budget(budget));
        }
        let n = frame.len();
        for m in 0u128..1 << bits {
            let v: Valuation = props
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), (0..n).filter(|w| m >> (i * n + w) & 1 == 1).collect()))
                .collect();
            if !eval_modal(&frame, &v, root, &formula)? {
                return Ok(Some(FiniteCountermodel { frame, valuation: v, root, formula }));
            }
        }
        Ok(None)
    }
}

/// Result of moving a countermodel onto the target frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    /// Per proposition, the CTL formula `OR_{w in V(p)} phi[w]`.
    pub ctl: BTreeMap<String, Ctl>,
    /// Per proposition, the worlds satisfying that formula.
    pub world_sets: BTreeMap<String, BTreeSet<usize>>,
    /// The same valuation as block sets.
    pub valuation: AdmissibleValuation,
}

/// Lifts `cm` along `l`: `V'(p)` is the set of worlds satisfying the
/// disjunction of the formulas of the nodes in `V(p)`. The formula is then
/// re-evaluated on the target frame and must be false at the anchor.
pub fn transfer_countermodel(
    l: &Labeling,
    g: &GeneralFrame,
    anchor: usize,
    cm: &FiniteCountermodel,
) -> Result<Transfer, LabelingError> {
    if let Some(v) = verify_labeling(l, g, anchor)? {
        return Err(LabelingError::Invalid(v));
    }
    if cm.frame != l.frame {
        return Err(LabelingError::FrameMismatch);
    }
    FiniteCountermodel::new(cm.frame.clone(), cm.valuation.clone(), cm.root, cm.formula.clone())?;
    let mut out = Transfer {
        ctl: BTreeMap::new(),
        world_sets: BTreeMap::new(),
        valuation: BTreeMap::new(),
    };
    for p in cm.formula.props() {
        let nodes = cm.valuation.get(&p).cloned().unwrap_or_default();
        let f = Ctl::disj(nodes.iter().map(|v| l.phi[*v].clone()));
        let truth = g.truth(&f)?;
        let blocks = g
            .blocks_of_worlds(&truth)
            .ok_or_else(|| GeneralError::Internal(format!("`{f}` is not a union of blocks")))?;
        out.world_sets.insert(p.clone(), truth.iter().collect());
        out.valuation.insert(p.clone(), blocks.iter().collect());
        out.ctl.insert(p, f);
    }
    if eval_general(g, &out.valuation, anchor, &cm.formula)? {
        return Err(LabelingError::TransferFailed);
    }
    Ok(out)
}

fn literal(f: &Ctl, on: bool) -> Ctl {
    if on {
        f.clone()
    } else {
        f.clone().negate()
    }
}

fn pattern(buttons: &[Ctl], i: u64, switches: &[Ctl], j: u64) -> Vec<Ctl> {
    let mut parts: Vec<Ctl> = buttons.iter().enumerate().map(|(k, b)| literal(b, i >> k & 1 == 1)).collect();
    parts.extend(switches.iter().enumerate().map(|(k, s)| literal(s, j >> k & 1 == 1)));
    parts
}

/// Labeling of the pre-Boolean frame with `n` atoms and clusters of size
/// `2^m`: node `(I, J)` gets the buttons in `I` and switches in `J` true and
/// all others false. The root is `(∅, ∅)`.
pub fn build_preboolean_labeling(buttons: &[Ctl], switches: &[Ctl]) -> Labeling {
    let (n, m) = (buttons.len(), switches.len());
    let frame = gen_preboolean(n, 1 << m);
    let mut phi = Vec::with_capacity(frame.len());
    for i in 0..1u64 << n {
        for j in 0..1u64 << m {
            phi.push(Ctl::conj(pattern(buttons, i, switches, j)));
        }
    }
    Labeling { frame, root: 0, phi }
}

/// Labeling of the inverted lollipop: node `(I, J)` as in the pre-Boolean
/// case plus `!B`, and the top node `*` labelled `B`.
pub fn build_lollipop_labeling(buttons: &[Ctl], restrictor: &Ctl, switches: &[Ctl]) -> Labeling {
    let (n, m) = (buttons.len(), switches.len());
    let frame = gen_lollipop(n, m);
    let mut phi = Vec::with_capacity(frame.len());
    for i in 0..1u64 << n {
        for j in 0..1u64 << m {
            let mut parts = pattern(buttons, i, switches, j);
            parts.push(restrictor.clone().negate());
            phi.push(Ctl::conj(parts));
        }
    }
    phi.push(restrictor.clone());
    Labeling { frame, root: 0, phi }
}

/// Labeling of the partial-function frame: `f` gets `l_i` where `f(i) = 0`,
/// `r_i` where `f(i) = 1`, and `!l_i & !r_i` where `f` is undefined.
pub fn build_fpf_labeling(decisions: &[(Ctl, Ctl)]) -> Labeling {
    let frame = gen_fpf(decisions.len());
    let phi = frame
        .worlds()
        .iter()
        .map(|name| {
            let parts = name.chars().zip(decisions).flat_map(|(c, (l, r))| match c {
                '0' => vec![l.clone()],
                '1' => vec![r.clone()],
                _ => vec![l.clone().negate(), r.clone().negate()],
            });
            Ctl::conj(parts.collect::<Vec<_>>())
        })
        .collect();
    Labeling { frame, root: 0, phi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{beta, button_lattice, pruned_subframe};
    use crate::general::Caps;
    use crate::modal::{parse_modal, DEFAULT_VALUATION_BUDGET};

    #[test]
    fn button_lattice_labelings() {
        for n in 1..=2 {
            let g = button_lattice(n, &Caps::default()).unwrap();
            let c = g.root().unwrap();
            let bs: Vec<Ctl> = (1..=n).map(beta).collect();
            let l = build_preboolean_labeling(&bs, &[]);
            assert_eq!(verify_labeling(&l, &g, c).unwrap(), None);
            assert!(quotient_matches(&l, &g, c).unwrap());
        }
    }

    #[test]
    fn broken_labeling_is_caught() {
        let g = button_lattice(1, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let mut l = build_preboolean_labeling(&[beta(1)], &[]);
        l.phi[1] = Ctl::falsum();
        assert_eq!(
            verify_labeling(&l, &g, c).unwrap(),
            Some(LabelingViolation::NoNode { world: "{1}".into() })
        );
        l.phi[1] = Ctl::True;
        assert!(matches!(verify_labeling(&l, &g, c).unwrap(), Some(LabelingViolation::ManyNodes { .. })));
    }

    #[test]
    fn transfer_on_the_two_chain() {
        let g = button_lattice(1, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let l = build_preboolean_labeling(&[beta(1)], &[]);
        let f = parse_modal("<>p -> p").unwrap();
        let v: Valuation = BTreeMap::from([("p".to_string(), BTreeSet::from([1]))]);
        let cm = FiniteCountermodel::new(l.frame.clone(), v, 0, f).unwrap();
        let t = transfer_countermodel(&l, &g, c, &cm).unwrap();
        let pushed = g.world_index("{1}").unwrap();
        assert_eq!(t.world_sets["p"], BTreeSet::from([pushed]));

        let empty: Valuation = BTreeMap::from([("p".to_string(), BTreeSet::new())]);
        let cm = FiniteCountermodel::new(l.frame.clone(), empty, 0, parse_modal("<>p").unwrap()).unwrap();
        let t = transfer_countermodel(&l, &g, c, &cm).unwrap();
        assert!(t.world_sets["p"].is_empty());
        assert_eq!(t.ctl["p"], Ctl::falsum());
    }

    #[test]
    fn fpf_labeling_and_dot_two() {
        for n in 0..=2 {
            let d = pruned_subframe(n, &Caps::default()).unwrap();
            let c = d.frame.root().unwrap();
            let l = build_fpf_labeling(&d.decisions);
            assert_eq!(verify_labeling(&l, &d.frame, c).unwrap(), None, "n = {n}");
            assert!(quotient_matches(&l, &d.frame, c).unwrap());
        }
        let d = pruned_subframe(1, &Caps::default()).unwrap();
        let l = build_fpf_labeling(&d.decisions);
        let dot2 = parse_modal("<>[]p -> []<>p").unwrap();
        let cm = FiniteCountermodel::search(l.frame.clone(), 0, dot2, DEFAULT_VALUATION_BUDGET).unwrap().unwrap();
        let c = d.frame.root().unwrap();
        transfer_countermodel(&l, &d.frame, c, &cm).unwrap();
    }

    #[test]
    fn trivial_constructors() {
        let l = build_preboolean_labeling(&[], &[]);
        assert_eq!(l.phi, vec![Ctl::True]);
        let b = Ctl::atom("q");
        let l = build_lollipop_labeling(&[], &b, &[]);
        assert_eq!(l.phi, vec![Ctl::not(b.clone()), b]);
        assert_eq!(build_fpf_labeling(&[]).phi, vec![Ctl::True]);
        assert_eq!(build_fpf_labeling(&[(Ctl::atom("l"), Ctl::atom("r"))]).phi.len(), 3);
    }
}
