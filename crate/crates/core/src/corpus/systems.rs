use std::collections::BTreeSet;

use super::CorpusError;
use crate::ts::{TransitionSystem, TsBuilder};

fn build(b: TsBuilder) -> TransitionSystem {
    b.build().expect("corpus systems are well formed")
}

/// Coarse abstraction of the integer counter: zero, negative, positive.
pub fn fig1_t1() -> TransitionSystem {
    build(
        TransitionSystem::builder()
            .state("x=0", ["x0"])
            .state("x<0", ["neg"])
            .state("x>0", ["pos"])
            .initial("x=0")
            .edge("x=0", "x>0")
            .edge("x=0", "x<0")
            .edge("x<0", "x<0")
            .edge("x>0", "x>0")
            .edge("x>0", "x=0")
            .edge("x<0", "x=0"),
    )
}

/// Refinement of [`fig1_t1`] that keeps `x=1` and `x=-1` apart.
pub fn fig1_t2() -> TransitionSystem {
    build(
        TransitionSystem::builder()
            .state("x=0", ["x0"])
            .state("x=-1", ["neg"])
            .state("x<-1", ["neg"])
            .state("x=1", ["pos"])
            .state("x>1", ["pos"])
            .initial("x=0")
            .edge("x=0", "x=1")
            .edge("x=0", "x=-1")
            .edge("x=-1", "x<-1")
            .edge("x=1", "x>1")
            .edge("x=1", "x=0")
            .edge("x=-1", "x=0")
            .edge("x<-1", "x=-1")
            .edge("x>1", "x=1")
            .edge("x<-1", "x<-1")
            .edge("x>1", "x>1"),
    )
}

/// The counter on `[-depth, depth]`; a step past either end stays put.
pub fn fig1_s_trunc(depth: usize) -> TransitionSystem {
    let d = depth as i64;
    let name = |x: i64| format!("x={x}");
    let mut b = TransitionSystem::builder().ap("x0").ap("neg").ap("pos");
    for x in -d..=d {
        let label = match x.cmp(&0) {
            std::cmp::Ordering::Less => "neg",
            std::cmp::Ordering::Equal => "x0",
            std::cmp::Ordering::Greater => "pos",
        };
        b.add_state(name(x), [label]);
    }
    b.add_initial(name(0));
    for x in -d..=d {
        b.add_edge(name(x), name((x + 1).min(d)));
        b.add_edge(name(x), name((x - 1).max(-d)));
    }
    build(b)
}

/// Three `a` states below the initial one fan out to a single `b` loop.
pub fn fig2_s() -> TransitionSystem {
    build(
        TransitionSystem::builder()
            .state("a0", ["a"])
            .state("a1", ["a"])
            .state("a2", ["a"])
            .state("b", ["b"])
            .initial("a0")
            .edge("a0", "a1")
            .edge("a0", "a2")
            .edge("a1", "b")
            .edge("a2", "b")
            .edge("b", "b"),
    )
}

pub(crate) fn button_state(i: usize, h: usize) -> String {
    format!("a{i}_{h}")
}

fn add_buttons(b: &mut TsBuilder, n: usize) {
    for i in 1..=n {
        let atom = format!("a{i}");
        b.add_state(button_state(i, 1), [atom.as_str()]);
        b.add_state(button_state(i, 2), [atom.as_str()]);
        b.add_edge("s", button_state(i, 1));
        b.add_edge(button_state(i, 1), button_state(i, 2));
        b.add_edge(button_state(i, 2), "f");
    }
}

/// Button gadget: `s → a{i}_1 → a{i}_2 → f` for `i = 1..=n`.
///
/// With `n = 0` the initial state gets an edge to `f` so that it is not terminal.
pub fn buttons(n: usize) -> TransitionSystem {
    let mut b = TransitionSystem::builder().state("s", ["s"]).state("f", ["f"]).initial("s").edge("f", "f");
    add_buttons(&mut b, n);
    if n == 0 {
        b.add_edge("s", "f");
    }
    build(b)
}

pub(crate) fn path_state(l: usize, k: usize, h: usize) -> String {
    format!("p{l}k{k}.{h}")
}

pub(crate) fn x_state(l: usize, k: usize) -> String {
    format!("x{l}k{k}")
}

/// Switch gadget with `paths` b-paths of length 3 in each of `copies` copies.
///
/// From the head of path `l`, the `x` state of that path leads to the heads
/// of all other paths of the same copy.
pub fn switch_trunc(paths: usize, copies: usize) -> Result<TransitionSystem, CorpusError> {
    if paths < 2 || copies < 1 {
        return Err(CorpusError::BadParams("switch_trunc needs at least 2 paths and 1 copy".into()));
    }
    let mut b = TransitionSystem::builder().state("s", ["s"]).state("f", ["f"]).initial("s").edge("f", "f");
    for k in 0..copies {
        for l in 0..paths {
            for h in 1..=3 {
                b.add_state(path_state(l, k, h), ["b"]);
            }
            b.add_state(x_state(l, k), ["x"]);
        }
        for l in 0..paths {
            b.add_edge("s", path_state(l, k, 1));
            b.add_edge(path_state(l, k, 1), path_state(l, k, 2));
            b.add_edge(path_state(l, k, 2), path_state(l, k, 3));
            b.add_edge(path_state(l, k, 3), "f");
            b.add_edge(path_state(l, k, 1), x_state(l, k));
            for other in (0..paths).filter(|o| *o != l) {
                b.add_edge(x_state(l, k), path_state(other, k, 1));
            }
        }
    }
    Ok(build(b))
}

pub(crate) fn t_state(j: usize, k: usize) -> String {
    format!("t{j}k{k}")
}

pub(crate) fn triple_state(j: usize, k: usize, h: usize) -> String {
    format!("r{j}k{k}.{h}")
}

/// Restricted-switch gadget with `n` adjoined button pairs, `m` switch
/// families and `copies` triples per family. The `t` chain of each family
/// ends in a self-loop at its last copy.
pub fn rswitch_trunc(n: usize, m: usize, copies: usize) -> Result<TransitionSystem, CorpusError> {
    if copies < 1 {
        return Err(CorpusError::BadParams("rswitch_trunc needs at least 1 copy".into()));
    }
    let mut b = TransitionSystem::builder().state("s", ["s"]).state("f", ["f"]).initial("s").edge("f", "f");
    add_buttons(&mut b, n);
    for j in 0..m {
        for k in 0..copies {
            b.add_state(t_state(j, k), ["t"]);
            let labels = ["b".to_string(), format!("b{j}"), format!("b{j}k{k}")];
            for h in 1..=3 {
                b.add_state(triple_state(j, k, h), labels.clone());
            }
            b.add_edge("s", t_state(j, k));
            b.add_edge(t_state(j, k), t_state(j, (k + 1).min(copies - 1)));
            b.add_edge(t_state(j, k), triple_state(j, k, 1));
            b.add_edge(triple_state(j, k, 1), triple_state(j, k, 2));
            b.add_edge(triple_state(j, k, 2), triple_state(j, k, 3));
            b.add_edge(triple_state(j, k, 3), "f");
        }
    }
    if n == 0 && m == 0 {
        b.add_edge("s", "f");
    }
    Ok(build(b))
}

/// Decision chain of depth `n`: `s → a0, b0 → c0 → a1, b1 → ... → c{n-1} → f`.
pub fn decision_chain(n: usize) -> TransitionSystem {
    pruned_chain(n, &BTreeSet::new(), &BTreeSet::new()).expect("unpruned chain")
}

fn chain_pred(i: usize) -> String {
    if i == 0 {
        "s".to_string()
    } else {
        format!("c{}", i - 1)
    }
}

/// Refinement of [`decision_chain`] in which `a{i}` (`i ∈ a`) and `b{i}`
/// (`i ∈ b`) are unreachable. The predecessor of each pruned state gets an
/// unreachable duplicate that keeps the pruned edge, so the chain is still an
/// abstraction of the result.
pub fn pruned_chain(n: usize, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<TransitionSystem, CorpusError> {
    if let Some(i) = a.intersection(b).next() {
        return Err(CorpusError::BadParams(format!("index {i} pruned on both sides")));
    }
    if let Some(i) = a.union(b).find(|i| **i >= n) {
        return Err(CorpusError::BadParams(format!("index {i} outside the chain")));
    }
    let mut t = TransitionSystem::builder().state("s", ["s"]).initial("s");
    for i in 0..n {
        t.add_state(format!("a{i}"), [format!("a{i}")]);
        t.add_state(format!("b{i}"), [format!("b{i}")]);
        t.add_state(format!("c{i}"), ["c"]);
    }
    t.add_state("f", ["f"]);
    t.add_edge("f", "f");
    if n == 0 {
        t.add_edge("s", "f");
    } else {
        t.add_edge(format!("c{}", n - 1), "f");
    }
    for i in 0..n {
        let pred = chain_pred(i);
        for (side, pruned) in [("a", a.contains(&i)), ("b", b.contains(&i))] {
            let target = format!("{side}{i}");
            if pruned {
                let dup = format!("{pred}'");
                let label = if i == 0 { "s" } else { "c" };
                t.add_state(dup.clone(), [label]);
                t.add_edge(dup, target.clone());
            } else {
                t.add_edge(pred.clone(), target.clone());
            }
            t.add_edge(target, format!("c{i}"));
        }
    }
    Ok(build(t))
}
