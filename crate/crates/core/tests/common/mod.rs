//! Shared generators and reference evaluators for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refmodal::ctl::{Ctl, PathFormula};
use refmodal::modal::{KripkeFrame, Modal, Valuation};
use refmodal::TransitionSystem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid system: every state has a successor, at least one initial state.
pub fn random_system(r: &mut ChaCha8Rng, max_states: usize, ap: &[&str]) -> TransitionSystem {
    let n = r.gen_range(1..=max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let labels = (0..n)
        .map(|_| ap.iter().filter(|_| r.gen_bool(0.5)).map(|p| p.to_string()).collect())
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        edges.push((a, r.gen_range(0..n)));
        for b in 0..n {
            if r.gen_bool(0.25) {
                edges.push((a, b));
            }
        }
    }
    let mut initial: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
    if initial.is_empty() {
        initial.push(0);
    }
    let ap = ap.iter().map(|p| p.to_string()).collect();
    TransitionSystem::from_parts(states, initial, ap, labels, edges).unwrap()
}

/// Random CTL formula of depth at most `depth`, using every operator of the surface syntax.
pub fn random_ctl(r: &mut ChaCha8Rng, depth: usize, ap: &[&str]) -> Ctl {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..6) {
            0 => Ctl::True,
            1 => Ctl::falsum(),
            _ => Ctl::atom(*ap.choose(r).unwrap()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..14) {
        0 => Ctl::not(random_ctl(r, d, ap)),
        1 => Ctl::and(random_ctl(r, d, ap), random_ctl(r, d, ap)),
        2 => Ctl::or(random_ctl(r, d, ap), random_ctl(r, d, ap)),
        3 => Ctl::implies(random_ctl(r, d, ap), random_ctl(r, d, ap)),
        4 => Ctl::ex(random_ctl(r, d, ap)),
        5 => Ctl::ax(random_ctl(r, d, ap)),
        6 => Ctl::ef(random_ctl(r, d, ap)),
        7 => Ctl::af(random_ctl(r, d, ap)),
        8 => Ctl::eg(random_ctl(r, d, ap)),
        9 => Ctl::ag(random_ctl(r, d, ap)),
        10 => Ctl::eu(random_ctl(r, d, ap), random_ctl(r, d, ap)),
        11 => Ctl::au(random_ctl(r, d, ap), random_ctl(r, d, ap)),
        _ => Ctl::atom(*ap.choose(r).unwrap()),
    }
}

/// All CTL formulas over `ap` up to `depth`, restricted to a fixed operator
/// set so the count stays small: atoms, negation, conjunction, EX, AX, EU, AU.
pub fn ctl_up_to(depth: usize, ap: &[&str], limit: usize) -> Vec<Ctl> {
    let mut levels: Vec<Vec<Ctl>> = vec![ap.iter().map(|p| Ctl::atom(*p)).chain([Ctl::True]).collect()];
    for _ in 0..depth {
        let prev: Vec<Ctl> = levels.iter().flatten().cloned().collect();
        let mut next = Vec::new();
        let last = levels.last().unwrap().clone();
        for f in &last {
            next.push(Ctl::not(f.clone()));
            next.push(Ctl::ex(f.clone()));
            next.push(Ctl::ax(f.clone()));
        }
        'outer: for f in &last {
            for g in &prev {
                next.push(Ctl::and(f.clone(), g.clone()));
                next.push(Ctl::eu(f.clone(), g.clone()));
                next.push(Ctl::au(g.clone(), f.clone()));
                if next.len() > limit {
                    break 'outer;
                }
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

/// Reference CTL semantics by explicit path enumeration. Path formulas are
/// decided by walking every path prefix of length `n + 1`: within that many
/// steps a path either settles the formula or closes a loop.
pub fn oracle_states(ts: &TransitionSystem, f: &Ctl) -> Vec<bool> {
    let n = ts.num_states();
    match f {
        Ctl::True => vec![true; n],
        Ctl::Atom(p) => (0..n).map(|s| ts.label(s).contains(p)).collect(),
        Ctl::Not(a) => oracle_states(ts, a).into_iter().map(|x| !x).collect(),
        Ctl::And(a, b) => zip(ts, a, b, |x, y| x && y),
        Ctl::Or(a, b) => zip(ts, a, b, |x, y| x || y),
        Ctl::Implies(a, b) => zip(ts, a, b, |x, y| !x || y),
        Ctl::Exists(p) => {
            let (a, b) = operands(ts, p);
            (0..n).map(|s| paths(ts, s).iter().any(|pi| path_holds(pi, p, &a, &b))).collect()
        }
        Ctl::Forall(p) => {
            let (a, b) = operands(ts, p);
            (0..n).map(|s| paths(ts, s).iter().all(|pi| path_holds(pi, p, &a, &b))).collect()
        }
    }
}

fn zip(ts: &TransitionSystem, a: &Ctl, b: &Ctl, op: fn(bool, bool) -> bool) -> Vec<bool> {
    oracle_states(ts, a).into_iter().zip(oracle_states(ts, b)).map(|(x, y)| op(x, y)).collect()
}

/// Every path prefix with `n + 1` states starting at `s`.
fn paths(ts: &TransitionSystem, s: usize) -> Vec<Vec<usize>> {
    let len = ts.num_states() + 1;
    let mut out = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(p) = stack.pop() {
        if p.len() == len {
            out.push(p);
            continue;
        }
        for &t in ts.successors(*p.last().unwrap()) {
            let mut q = p.clone();
            q.push(t);
            stack.push(q);
        }
    }
    out
}

/// Extensions of the state formulas under a path operator: `(left, right)`
/// for until, `(true, arg)` for F, `(arg, arg)` for X and G.
fn operands(ts: &TransitionSystem, p: &PathFormula) -> (Vec<bool>, Vec<bool>) {
    match p {
        PathFormula::Until(a, b) => (oracle_states(ts, a), oracle_states(ts, b)),
        PathFormula::Finally(b) => (vec![true; ts.num_states()], oracle_states(ts, b)),
        PathFormula::Next(a) | PathFormula::Globally(a) => {
            let v = oracle_states(ts, a);
            (v.clone(), v)
        }
    }
}

/// Truth of a path formula on the paths through prefix `pi`. Prefixes of
/// length `n + 1` contain a repeated state, and a prefix that has not decided
/// `U` or `G` by its first repetition never will on the lasso it closes. For
/// the existential case that lasso is itself a path; for the universal case
/// every infinite path has an enumerated prefix deciding it the same way.
fn path_holds(pi: &[usize], p: &PathFormula, a: &[bool], b: &[bool]) -> bool {
    match p {
        PathFormula::Next(_) => a[pi[1]],
        PathFormula::Until(..) | PathFormula::Finally(_) => until(pi, a, b),
        PathFormula::Globally(_) => pi[..first_repeat(pi)].iter().all(|s| a[*s]),
    }
}

/// Index just past the first state that repeats an earlier one.
fn first_repeat(pi: &[usize]) -> usize {
    let mut seen = BTreeSet::new();
    for (i, s) in pi.iter().enumerate() {
        if !seen.insert(*s) {
            return i + 1;
        }
    }
    pi.len()
}

fn until(pi: &[usize], sa: &[bool], sb: &[bool]) -> bool {
    let cut = first_repeat(pi);
    for s in &pi[..cut] {
        if sb[*s] {
            return true;
        }
        if !sa[*s] {
            return false;
        }
    }
    false
}

/// System-level truth: the formula holds at every initial state.
pub fn oracle_holds(ts: &TransitionSystem, f: &Ctl) -> bool {
    let v = oracle_states(ts, f);
    ts.initial().iter().all(|s| v[*s])
}

/// Random frame with arbitrary (not necessarily reflexive) accessibility.
pub fn random_frame(r: &mut ChaCha8Rng, max_worlds: usize) -> KripkeFrame {
    let n = r.gen_range(1..=max_worlds);
    let p = r.gen_range(0.1..0.7);
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| r.gen_bool(p)).collect();
    KripkeFrame::new((0..n).map(|i| format!("w{i}")).collect(), edges).unwrap()
}

pub fn random_modal(r: &mut ChaCha8Rng, depth: usize, props: &[&str]) -> Modal {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..5) {
            0 => Modal::True,
            _ => Modal::prop(*props.choose(r).unwrap()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => Modal::not(random_modal(r, d, props)),
        1 => Modal::and(random_modal(r, d, props), random_modal(r, d, props)),
        2 => Modal::or(random_modal(r, d, props), random_modal(r, d, props)),
        3 => Modal::implies(random_modal(r, d, props), random_modal(r, d, props)),
        4 => Modal::diamond(random_modal(r, d, props)),
        _ => Modal::boxed(random_modal(r, d, props)),
    }
}

pub fn random_valuation(r: &mut ChaCha8Rng, frame: &KripkeFrame, props: &[&str]) -> Valuation {
    props
        .iter()
        .map(|p| (p.to_string(), (0..frame.len()).filter(|_| r.gen_bool(0.5)).collect()))
        .collect()
}

/// Reference modal semantics: direct recursion, diamond by successor scan.
pub fn oracle_modal(frame: &KripkeFrame, v: &Valuation, w: usize, f: &Modal) -> bool {
    match f {
        Modal::True => true,
        Modal::Prop(p) => v.get(p).is_some_and(|s| s.contains(&w)),
        Modal::Not(a) => !oracle_modal(frame, v, w, a),
        Modal::And(a, b) => oracle_modal(frame, v, w, a) && oracle_modal(frame, v, w, b),
        Modal::Or(a, b) => oracle_modal(frame, v, w, a) || oracle_modal(frame, v, w, b),
        Modal::Implies(a, b) => !oracle_modal(frame, v, w, a) || oracle_modal(frame, v, w, b),
        Modal::Diamond(a) => (0..frame.len()).any(|u| frame.access(w, u) && oracle_modal(frame, v, u, a)),
        Modal::Box(a) => (0..frame.len()).all(|u| !frame.access(w, u) || oracle_modal(frame, v, u, a)),
    }
}

/// Every valuation of `props` over the frame's worlds.
pub fn all_valuations(frame: &KripkeFrame, props: &[String]) -> Vec<Valuation> {
    let n = frame.len();
    let bits = n * props.len();
    (0u64..1 << bits)
        .map(|m| {
            props
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), (0..n).filter(|w| m >> (i * n + w) & 1 == 1).collect::<BTreeSet<usize>>()))
                .collect::<BTreeMap<_, _>>()
        })
        .collect()
}

/// Extensions of every CTL formula over `atoms` with nesting
/// depth at most `depth`, computed semantically: each level applies the
/// operators (negation, conjunction, EX, AX, EU, AU, EG) to the extensions of
/// the previous levels. Extensions are state bitmasks; needs at most 64 states.
pub fn ctl_extensions(ts: &TransitionSystem, atoms: &[&str], depth: usize) -> BTreeSet<u64> {
    let n = ts.num_states();
    assert!(n <= 64);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let succ: Vec<u64> = (0..n).map(|s| ts.successors(s).iter().fold(0, |m, t| m | 1 << t)).collect();
    let ex = |x: u64| (0..n).filter(|s| succ[*s] & x != 0).fold(0u64, |m, s| m | 1 << s);
    let ax = |x: u64| (0..n).filter(|s| succ[*s] & !x == 0).fold(0u64, |m, s| m | 1 << s);
    let eu = |a: u64, b: u64| {
        let mut z = b;
        loop {
            let next = b | (a & ex(z));
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let au = |a: u64, b: u64| {
        let mut z = b;
        loop {
            let next = b | (a & ax(z));
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let eg = |a: u64| {
        let mut z = a;
        loop {
            let next = a & ex(z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let mut all: BTreeSet<u64> = atoms
        .iter()
        .map(|p| (0..n).filter(|s| ts.label(*s).contains(*p)).fold(0u64, |m, s| m | 1 << s))
        .collect();
    all.insert(full);
    let mut frontier: Vec<u64> = all.iter().copied().collect();
    for _ in 0..depth {
        let prev: Vec<u64> = all.iter().copied().collect();
        let mut next = BTreeSet::new();
        for &x in &frontier {
            next.extend([full & !x, ex(x), ax(x), eg(x)]);
            for &y in &prev {
                next.extend([x & y, eu(x, y), eu(y, x), au(x, y), au(y, x)]);
            }
        }
        frontier = next.difference(&all).copied().collect();
        all.extend(next);
        if frontier.is_empty() {
            break;
        }
    }
    all
}
