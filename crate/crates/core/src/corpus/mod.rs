//! Example systems, gadget families and the frames built from them.
//!
//! Infinite gadgets are truncated to finitely many copies. Where a
//! truncation changes a control verdict, the frame constructor says so and
//! a scope function gives the worlds on which the verdict still holds.

mod formulas;
mod systems;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use formulas::{beta, delta, lambda, restricted_switch, restrictor, switch};
pub use systems::{
    buttons, decision_chain, fig1_s_trunc, fig1_t1, fig1_t2, fig2_s, pruned_chain, rswitch_trunc, switch_trunc,
};

use crate::ctl::{holds, Ctl};
use crate::general::{
    build_general_frame, enumerate_abstractions, enumerate_within, worlds_from_partitions, Caps, GeneralError,
    GeneralFrame, RelationMode, World, WorldMode,
};
use crate::modal::gen_fpf;
use crate::ts::{find_abstraction, is_abstraction, Partition, SearchOutcome, TransitionSystem};

/// Largest `n` accepted by [`button_lattice`].
pub const MAX_BUTTONS: usize = 4;
/// Largest `n` accepted by [`pruned_subframe`].
pub const MAX_DECISIONS: usize = 3;
/// Largest system any generator will produce.
pub const MAX_GENERATED_STATES: usize = 10_000;
/// World cap used for the restricted-switch frame, whose default instance has 50 worlds.
pub const RSWITCH_MAX_WORLDS: usize = 64;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{what} = {value} exceeds the cap {cap}")]
    Cap { what: &'static str, value: usize, cap: usize },
    #[error("generator produced an invalid refinement: {0}")]
    Construction(String),
    #[error(transparent)]
    General(#[from] GeneralError),
}

/// A named gadget with its parameters, written `family` or `family:p1,p2,...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetParams {
    Fig1T1,
    Fig1T2,
    Fig1STrunc { depth: usize },
    Fig2S,
    Buttons { n: usize },
    SwitchTrunc { paths: usize, copies: usize },
    RswitchTrunc { n: usize, m: usize, copies: usize },
    DecisionChain { n: usize },
    PrunedSubframe { n: usize },
    Fig2Frame,
    ButtonLattice { n: usize },
    SwitchFrame { paths: usize, copies: usize },
    RswitchFrame { n: usize, m: usize, copies: usize },
}

/// What a generator returns.
#[derive(Debug, Clone)]
pub enum Generated {
    System(TransitionSystem),
    Frame(GeneralFrame),
}

/// All family names, for help texts.
pub const FAMILIES: &[&str] = &[
    "fig1_t1",
    "fig1_t2",
    "fig1_s_trunc:depth",
    "fig2_s",
    "buttons:n",
    "switch_trunc:paths,copies",
    "rswitch_trunc:n,m,copies",
    "decision_chain:n",
    "pruned_subframe:n",
    "fig2",
    "button_lattice:n",
    "switch_frame:paths,copies",
    "rswitch_frame:n,m,copies",
];

impl FromStr for GadgetParams {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, CorpusError> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let nums: Vec<usize> = match args {
            None => Vec::new(),
            Some(a) => a
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| CorpusError::BadParams(format!("`{x}` is not a non-negative integer")))
                })
                .collect::<Result<_, _>>()?,
        };
        let arity = |k: usize, defaults: &[usize]| -> Result<Vec<usize>, CorpusError> {
            if nums.is_empty() && defaults.len() == k {
                return Ok(defaults.to_vec());
            }
            if nums.len() != k {
                return Err(CorpusError::BadParams(format!("`{name}` takes {k} parameter(s), got {}", nums.len())));
            }
            Ok(nums.clone())
        };
        Ok(match name {
            "fig1_t1" => {
                arity(0, &[])?;
                GadgetParams::Fig1T1
            }
            "fig1_t2" => {
                arity(0, &[])?;
                GadgetParams::Fig1T2
            }
            "fig1_s_trunc" => GadgetParams::Fig1STrunc { depth: arity(1, &[3])?[0] },
            "fig2_s" => {
                arity(0, &[])?;
                GadgetParams::Fig2S
            }
            "fig2" => {
                arity(0, &[])?;
                GadgetParams::Fig2Frame
            }
            "buttons" => GadgetParams::Buttons { n: arity(1, &[2])?[0] },
            "decision_chain" => GadgetParams::DecisionChain { n: arity(1, &[1])?[0] },
            "pruned_subframe" => GadgetParams::PrunedSubframe { n: arity(1, &[1])?[0] },
            "button_lattice" => GadgetParams::ButtonLattice { n: arity(1, &[2])?[0] },
            "switch_trunc" | "switch_frame" => {
                let v = arity(2, &[2, 2])?;
                if name == "switch_trunc" {
                    GadgetParams::SwitchTrunc { paths: v[0], copies: v[1] }
                } else {
                    GadgetParams::SwitchFrame { paths: v[0], copies: v[1] }
                }
            }
            "rswitch_trunc" | "rswitch_frame" => {
                let v = arity(3, &[1, 1, 2])?;
                let (n, m, copies) = (v[0], v[1], v[2]);
                if name == "rswitch_trunc" {
                    GadgetParams::RswitchTrunc { n, m, copies }
                } else {
                    GadgetParams::RswitchFrame { n, m, copies }
                }
            }
            other => return Err(CorpusError::UnknownFamily(other.to_string())),
        })
    }
}

impl fmt::Display for GadgetParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetParams::Fig1T1 => write!(f, "fig1_t1"),
            GadgetParams::Fig1T2 => write!(f, "fig1_t2"),
            GadgetParams::Fig1STrunc { depth } => write!(f, "fig1_s_trunc:{depth}"),
            GadgetParams::Fig2S => write!(f, "fig2_s"),
            GadgetParams::Buttons { n } => write!(f, "buttons:{n}"),
            GadgetParams::SwitchTrunc { paths, copies } => write!(f, "switch_trunc:{paths},{copies}"),
            GadgetParams::RswitchTrunc { n, m, copies } => write!(f, "rswitch_trunc:{n},{m},{copies}"),
            GadgetParams::DecisionChain { n } => write!(f, "decision_chain:{n}"),
            GadgetParams::PrunedSubframe { n } => write!(f, "pruned_subframe:{n}"),
            GadgetParams::Fig2Frame => write!(f, "fig2"),
            GadgetParams::ButtonLattice { n } => write!(f, "button_lattice:{n}"),
            GadgetParams::SwitchFrame { paths, copies } => write!(f, "switch_frame:{paths},{copies}"),
            GadgetParams::RswitchFrame { n, m, copies } => write!(f, "rswitch_frame:{n},{m},{copies}"),
        }
    }
}

fn cap_states(ts: TransitionSystem) -> Result<TransitionSystem, CorpusError> {
    if ts.num_states() > MAX_GENERATED_STATES {
        return Err(CorpusError::Cap {
            what: "states",
            value: ts.num_states(),
            cap: MAX_GENERATED_STATES,
        });
    }
    Ok(ts)
}

fn estimate(parts: &[usize]) -> usize {
    parts.iter().fold(1usize, |acc, x| acc.saturating_mul(*x))
}

/// Runs the generator for `params`.
pub fn gen(params: GadgetParams, caps: &Caps) -> Result<Generated, CorpusError> {
    let sys = |ts: TransitionSystem| Ok(Generated::System(cap_states(ts)?));
    match params {
        GadgetParams::Fig1T1 => sys(fig1_t1()),
        GadgetParams::Fig1T2 => sys(fig1_t2()),
        GadgetParams::Fig1STrunc { depth } => {
            if estimate(&[2, depth]) > MAX_GENERATED_STATES {
                return Err(CorpusError::Cap { what: "depth", value: depth, cap: MAX_GENERATED_STATES / 2 });
            }
            sys(fig1_s_trunc(depth))
        }
        GadgetParams::Fig2S => sys(fig2_s()),
        GadgetParams::Buttons { n } => {
            if estimate(&[2, n]) > MAX_GENERATED_STATES {
                return Err(CorpusError::Cap { what: "n", value: n, cap: MAX_GENERATED_STATES / 2 });
            }
            sys(buttons(n))
        }
        GadgetParams::SwitchTrunc { paths, copies } => {
            if estimate(&[4, paths, copies]) > MAX_GENERATED_STATES {
                return Err(CorpusError::Cap { what: "paths * copies", value: paths.saturating_mul(copies), cap: MAX_GENERATED_STATES / 4 });
            }
            sys(switch_trunc(paths, copies)?)
        }
        GadgetParams::RswitchTrunc { n, m, copies } => {
            if estimate(&[4, m, copies]).saturating_add(estimate(&[2, n])) > MAX_GENERATED_STATES {
                return Err(CorpusError::Cap { what: "m * copies", value: m.saturating_mul(copies), cap: MAX_GENERATED_STATES / 4 });
            }
            sys(rswitch_trunc(n, m, copies)?)
        }
        GadgetParams::DecisionChain { n } => {
            if estimate(&[3, n]) > MAX_GENERATED_STATES {
                return Err(CorpusError::Cap { what: "n", value: n, cap: MAX_GENERATED_STATES / 3 });
            }
            sys(decision_chain(n))
        }
        GadgetParams::PrunedSubframe { n } => Ok(Generated::Frame(pruned_subframe(n, caps)?.frame)),
        GadgetParams::Fig2Frame => Ok(Generated::Frame(fig2_frame(caps)?)),
        GadgetParams::ButtonLattice { n } => Ok(Generated::Frame(button_lattice(n, caps)?)),
        GadgetParams::SwitchFrame { paths, copies } => Ok(Generated::Frame(switch_frame(paths, copies, caps)?)),
        GadgetParams::RswitchFrame { n, m, copies } => Ok(Generated::Frame(rswitch_frame(n, m, copies, caps)?)),
    }
}

/// Looks up a built-in system by family name.
pub fn builtin_system(name: &str) -> Result<TransitionSystem, CorpusError> {
    match gen(name.parse()?, &Caps::default())? {
        Generated::System(ts) => Ok(ts),
        Generated::Frame(_) => Err(CorpusError::BadParams(format!("`{name}` is a frame, not a system"))),
    }
}

/// Looks up a built-in frame by family name.
pub fn builtin_frame(name: &str, caps: &Caps) -> Result<GeneralFrame, CorpusError> {
    match gen(name.parse()?, caps)? {
        Generated::Frame(g) => Ok(g),
        Generated::System(_) => Err(CorpusError::BadParams(format!("`{name}` is a system, not a frame"))),
    }
}

fn initially(ts: &TransitionSystem, f: &Ctl) -> bool {
    holds(ts, f).expect("corpus formulas only use the gadget's propositions")
}

/// The four-world frame over the abstractions of [`fig2_s`], with worlds
/// named `S`, `T₁`, `T₂`, `T₃`. `T₁` merges `a0` with `a1`, `T₂` merges
/// `a1` with `a2`, `T₃` merges all three.
pub fn fig2_frame(caps: &Caps) -> Result<GeneralFrame, CorpusError> {
    let e = enumerate_abstractions(&fig2_s(), WorldMode::Iso, caps)?;
    let g = build_general_frame(e.worlds, RelationMode::Search, caps)?;
    let ebx = Ctl::ex(Ctl::atom("b"));
    let ids = g
        .worlds()
        .iter()
        .map(|w| match w.system.num_states() {
            4 => "S",
            2 => "T₃",
            _ if initially(&w.system, &ebx) => "T₁",
            _ => "T₂",
        })
        .map(String::from)
        .collect();
    Ok(g.with_ids(ids)?)
}

/// All abstractions of [`buttons`]`(n)`: the pair of each button may be
/// split or merged, giving `2^n` worlds. Worlds are named by their set of
/// pushed buttons, e.g. `{1,3}`.
pub fn button_lattice(n: usize, caps: &Caps) -> Result<GeneralFrame, CorpusError> {
    if n > MAX_BUTTONS {
        return Err(CorpusError::Cap { what: "n", value: n, cap: MAX_BUTTONS });
    }
    let e = enumerate_abstractions(&buttons(n), WorldMode::Iso, caps)?;
    let g = build_general_frame(e.worlds, RelationMode::Search, caps)?;
    let ids = g
        .worlds()
        .iter()
        .map(|w| {
            let pushed: Vec<String> = (1..=n).filter(|i| initially(&w.system, &beta(*i))).map(|i| i.to_string()).collect();
            format!("{{{}}}", pushed.join(","))
        })
        .collect();
    Ok(g.with_ids(ids)?)
}

/// A frame of pruned decision-chain refinements with its decision family.
#[derive(Debug, Clone)]
pub struct DecisionFrame {
    pub frame: GeneralFrame,
    /// `(lambda(i), delta(i))` for each level `i`.
    pub decisions: Vec<(Ctl, Ctl)>,
}

/// Refinements of [`decision_chain`]`(n)` in which some `a{i}` or `b{i}` is
/// unreachable, one world per partial function `f` on `0..n`: `f(i) = 0`
/// prunes `a{i}`, `f(i) = 1` prunes `b{i}`. World ids use `?`/`0`/`1` per
/// level, matching [`gen_fpf`].
pub fn pruned_subframe(n: usize, caps: &Caps) -> Result<DecisionFrame, CorpusError> {
    if n > MAX_DECISIONS {
        return Err(CorpusError::Cap { what: "n", value: n, cap: MAX_DECISIONS });
    }
    let chain = decision_chain(n);
    let mut worlds = Vec::new();
    for id in gen_fpf(n).worlds() {
        let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
        for (i, c) in id.chars().enumerate() {
            match c {
                '0' => {
                    a.insert(i);
                }
                '1' => {
                    b.insert(i);
                }
                _ => {}
            }
        }
        let r = pruned_chain(n, &a, &b)?;
        match find_abstraction(&chain, &r, caps.search_nodes).map_err(GeneralError::from)? {
            SearchOutcome::Found(w) => {
                is_abstraction(&w).map_err(|v| CorpusError::Construction(format!("{id}: {v}")))?;
            }
            _ => return Err(CorpusError::Construction(format!("{id}: the chain is not an abstraction"))),
        }
        worlds.push(World::new(id.clone(), r));
    }
    let frame = build_general_frame(worlds, RelationMode::Search, caps)?;
    Ok(DecisionFrame {
        frame,
        decisions: (0..n).map(|i| (lambda(i), delta(i))).collect(),
    })
}

/// Paths of `copy` isolated in a seed partition of [`switch_trunc`].
fn isolated_paths(seed: &TransitionSystem, p: &Partition, paths: usize, copy: usize) -> usize {
    (0..paths)
        .filter(|l| {
            let s = seed.state_index(&systems::path_state(*l, copy, 1)).expect("path state");
            p.blocks()[p.block_of(s)].len() == 1
        })
        .count()
}

/// Frame over the path-isolating refinements of the collapsed switch gadget.
///
/// Each copy `k` picks a set `I_k` of isolated paths; states of isolated
/// paths stay apart, the remaining `b` states and `x` states of the copy are
/// merged. Worlds are taken up to isomorphism.
///
/// The switch is on exactly when some copy isolates a single path. With
/// finitely many copies it is therefore not a switch on the whole frame:
/// once every copy isolates two or more paths it is off for good. It is a
/// switch on the worlds returned by [`switch_scope`], where some copy is
/// still fully collapsed.
pub fn switch_frame(paths: usize, copies: usize, caps: &Caps) -> Result<GeneralFrame, CorpusError> {
    let seed = switch_trunc(paths, copies)?;
    if copies.saturating_mul(paths) > 12 {
        return Err(CorpusError::Cap { what: "paths * copies", value: copies * paths, cap: 12 });
    }
    let idx = |s: &str| seed.state_index(s).expect("gadget state");
    let mut parts = Vec::new();
    for mask in 0u64..(1u64 << (paths * copies)) {
        let mut blocks: Vec<Vec<usize>> = vec![vec![idx("s")], vec![idx("f")]];
        for k in 0..copies {
            let (mut rest_b, mut rest_x) = (Vec::new(), Vec::new());
            for l in 0..paths {
                let members: Vec<usize> = (1..=3).map(|h| idx(&systems::path_state(l, k, h))).collect();
                let x = idx(&systems::x_state(l, k));
                if mask >> (k * paths + l) & 1 == 1 {
                    blocks.extend(members.into_iter().map(|s| vec![s]));
                    blocks.push(vec![x]);
                } else {
                    rest_b.extend(members);
                    rest_x.push(x);
                }
            }
            blocks.extend([rest_b, rest_x].into_iter().filter(|b| !b.is_empty()));
        }
        parts.push(Partition::new(seed.num_states(), blocks).map_err(GeneralError::from)?);
    }
    let e = worlds_from_partitions(&seed, parts, WorldMode::Iso, caps)?;
    Ok(build_general_frame(e.worlds, RelationMode::Search, caps)?)
}

/// Worlds of a [`switch_frame`] in which some copy isolates no path.
pub fn switch_scope(g: &GeneralFrame, paths: usize, copies: usize) -> Result<Vec<usize>, CorpusError> {
    let seed = switch_trunc(paths, copies)?;
    g.worlds()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let p = w
                .partition
                .as_ref()
                .ok_or_else(|| CorpusError::BadParams(format!("world `{}` has no seed partition", w.id)))?;
            Ok((0..copies).any(|k| isolated_paths(&seed, p, paths, k) == 0).then_some(i))
        })
        .filter_map(|r| r.transpose())
        .collect()
}

/// Frame over all refinements of the collapsed restricted-switch gadget:
/// every label-uniform partition of [`rswitch_trunc`] that keeps the `t`
/// states apart. The least world merges every triple and every button pair.
///
/// With `copies = 2` and one family the frame has 25 worlds (50 with one
/// button pair). The restrictor is a pure button and the restricted switch
/// is on exactly while some copy is split as 1|23 or 12|3. The pattern
/// breaks once copy 0 is split as 13|2 or 1|2|3 while the last copy is
/// collapsed or split 13|2: the restrictor and the switch are off there, and
/// only a 1|23 or 12|3 split of the last copy turns the switch on, which
/// pushes the restrictor. A truncated gadget cannot avoid this, since only
/// the last copy carries the restrictor's loop.
pub fn rswitch_frame(n: usize, m: usize, copies: usize, caps: &Caps) -> Result<GeneralFrame, CorpusError> {
    let seed = rswitch_trunc(n, m, copies)?;
    let idx = |s: &str| seed.state_index(s).expect("gadget state");
    let mut ids: Vec<usize> = (0..seed.num_states()).collect();
    for i in 1..=n {
        ids[idx(&systems::button_state(i, 2))] = idx(&systems::button_state(i, 1));
    }
    for j in 0..m {
        for k in 0..copies {
            for h in 2..=3 {
                ids[idx(&systems::triple_state(j, k, h))] = idx(&systems::triple_state(j, k, 1));
            }
        }
    }
    let base = Partition::from_block_ids(&ids);
    let caps = Caps {
        max_worlds: caps.max_worlds.max(RSWITCH_MAX_WORLDS),
        ..*caps
    };
    let e = enumerate_within(&seed, &base, WorldMode::Iso, &caps)?;
    Ok(build_general_frame(e.worlds, RelationMode::Search, &caps)?)
}

/// The buttons adjoined to a restricted-switch gadget with `n` pairs.
pub fn rswitch_buttons(n: usize) -> Vec<Ctl> {
    (1..=n).map(beta).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::{gen_preboolean, order_iso};

    #[test]
    fn parse_and_print_params() {
        for s in ["fig1_t1", "buttons:3", "switch_trunc:2,2", "rswitch_frame:1,1,2", "fig2"] {
            assert_eq!(s.parse::<GadgetParams>().unwrap().to_string(), s);
        }
        assert_eq!("buttons".parse::<GadgetParams>().unwrap(), GadgetParams::Buttons { n: 2 });
        assert!("buttons:1,2".parse::<GadgetParams>().is_err());
        assert!("nope".parse::<GadgetParams>().is_err());
        assert!("buttons:-1".parse::<GadgetParams>().is_err());
    }

    #[test]
    fn fig2_world_names() {
        let g = fig2_frame(&Caps::default()).unwrap();
        let ids: Vec<&str> = g.worlds().iter().map(|w| w.id.as_str()).collect();
        assert_eq!(ids, ["S", "T₁", "T₂", "T₃"]);
    }

    #[test]
    fn button_lattice_sizes() {
        for n in 0..=2 {
            let g = button_lattice(n, &Caps::default()).unwrap();
            assert_eq!(g.len(), 1 << n);
            assert!(order_iso(g.kripke(), &gen_preboolean(n, 1)).is_some());
            assert_eq!(g.world(g.root().unwrap()).id, "{}");
        }
        assert!(button_lattice(MAX_BUTTONS + 1, &Caps::default()).is_err());
    }

    #[test]
    fn pruned_subframe_n1() {
        let d = pruned_subframe(1, &Caps::default()).unwrap();
        let g = &d.frame;
        assert_eq!(g.len(), 3);
        assert!(order_iso(g.kripke(), &gen_fpf(1)).is_some());
        for (w, world) in g.worlds().iter().enumerate() {
            let l = initially(&world.system, &d.decisions[0].0);
            let r = initially(&world.system, &d.decisions[0].1);
            assert_eq!(l, world.id == "0", "{w}");
            assert_eq!(r, world.id == "1", "{w}");
        }
    }

    #[test]
    fn switch_frame_scope() {
        let g = switch_frame(2, 2, &Caps::default()).unwrap();
        assert_eq!(g.len(), 6);
        let scope = switch_scope(&g, 2, 2).unwrap();
        assert_eq!(scope.len(), 3);
        let on = g.truth(&switch()).unwrap();
        // one isolated path in some copy
        for w in 0..g.len() {
            let p = g.world(w).partition.as_ref().unwrap();
            let seed = switch_trunc(2, 2).unwrap();
            let single = (0..2).any(|k| isolated_paths(&seed, p, 2, k) == 1);
            assert_eq!(on.contains(w), single, "{}", g.world(w).id);
        }
    }

    #[test]
    fn rswitch_frame_size() {
        let g = rswitch_frame(0, 1, 2, &Caps::default()).unwrap();
        assert_eq!(g.len(), 25);
        assert!(g.root().is_some());
    }
}
