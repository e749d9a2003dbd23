use std::collections::{BTreeMap, BTreeSet};

use super::{LabelSet, TransitionSystem, TsError};

/// Bisimulation classes over the disjoint union of several systems.
///
/// States of the union are numbered system by system (see [`BisimPartition::global`]).
/// Refinement proceeds in rounds: round 0 separates by label, round `r + 1`
/// separates states of one round-`r` block whose successors reach different
/// sets of round-`r` blocks. Every round is kept; the round in which two states
/// first separate drives [`crate::ctl::distinguishing_formula`].
#[derive(Debug, Clone)]
pub struct BisimPartition {
    offsets: Vec<usize>,
    labels: Vec<LabelSet>,
    succ: Vec<Vec<usize>>,
    rounds: Vec<Vec<usize>>,
}

fn renumber<K: Ord + Clone>(keys: &[K]) -> (Vec<usize>, usize) {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(keys.len());
    // ids follow first occurrence, so numbering is stable under the union order
    for k in keys {
        let next = ids.len();
        out.push(*ids.entry(k.clone()).or_insert(next));
    }
    (out, ids.len())
}

/// Coarsest bisimulation on the disjoint union of `systems`.
pub fn bisim_classes(systems: &[&TransitionSystem]) -> Result<BisimPartition, TsError> {
    if let Some(first) = systems.first() {
        if systems.iter().any(|s| s.ap() != first.ap()) {
            return Err(TsError::ApMismatch);
        }
    }
    let mut offsets = Vec::with_capacity(systems.len() + 1);
    let mut labels = Vec::new();
    let mut succ = Vec::new();
    let mut off = 0;
    for ts in systems {
        offsets.push(off);
        for i in 0..ts.num_states() {
            labels.push(ts.label(i).clone());
            succ.push(ts.successors(i).iter().map(|t| t + off).collect::<Vec<_>>());
        }
        off += ts.num_states();
    }
    offsets.push(off);

    let (first, mut count) = renumber(&labels);
    let mut rounds = vec![first];
    loop {
        let prev = rounds.last().expect("round 0");
        let keys: Vec<(usize, BTreeSet<usize>)> = (0..labels.len())
            .map(|s| (prev[s], succ[s].iter().map(|t| prev[*t]).collect()))
            .collect();
        let (next, n) = renumber(&keys);
        if n == count {
            break;
        }
        count = n;
        rounds.push(next);
    }
    Ok(BisimPartition {
        offsets,
        labels,
        succ,
        rounds,
    })
}

impl BisimPartition {
    pub fn num_systems(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    /// Index of `state` of system `sys` in the union.
    pub fn global(&self, sys: usize, state: usize) -> usize {
        assert!(self.offsets[sys] + state < self.offsets[sys + 1], "state out of range");
        self.offsets[sys] + state
    }

    /// Inverse of [`global`](Self::global).
    pub fn local(&self, g: usize) -> (usize, usize) {
        let sys = self.offsets.partition_point(|o| *o <= g) - 1;
        (sys, g - self.offsets[sys])
    }

    /// Final block of a union state.
    pub fn block(&self, g: usize) -> usize {
        self.rounds.last().expect("round 0")[g]
    }

    pub fn block_of(&self, sys: usize, state: usize) -> usize {
        self.block(self.global(sys, state))
    }

    pub fn num_blocks(&self) -> usize {
        self.rounds.last().map_or(0, |r| r.iter().max().map_or(0, |m| m + 1))
    }

    /// Blocks as lists of union states, ordered by first member.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (g, b) in self.rounds.last().expect("round 0").iter().enumerate() {
            out[*b].push(g);
        }
        out
    }

    pub fn bisimilar(&self, a: usize, b: usize) -> bool {
        self.block(a) == self.block(b)
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Block of `g` after refinement round `r`.
    pub fn round_block(&self, r: usize, g: usize) -> usize {
        self.rounds[r][g]
    }

    /// First round after which `a` and `b` are in different blocks.
    pub fn split_round(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.rounds.len()).find(|r| self.rounds[*r][a] != self.rounds[*r][b])
    }

    pub fn label(&self, g: usize) -> &LabelSet {
        &self.labels[g]
    }

    pub fn successors(&self, g: usize) -> &[usize] {
        &self.succ[g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_labels_give_singletons() {
        let ts = TransitionSystem::builder()
            .state("a", ["p"])
            .state("b", ["q"])
            .state("c", ["r"])
            .ap("p")
            .initial("a")
            .edge("a", "b")
            .edge("b", "c")
            .edge("c", "a")
            .build()
            .unwrap();
        let bp = bisim_classes(&[&ts]).unwrap();
        assert_eq!(bp.num_blocks(), 3);
    }

    #[test]
    fn unrolled_loop_is_bisimilar() {
        let one = TransitionSystem::builder()
            .state("x", ["p"])
            .initial("x")
            .edge("x", "x")
            .build()
            .unwrap();
        let two = TransitionSystem::builder()
            .state("y0", ["p"])
            .state("y1", ["p"])
            .initial("y0")
            .edge("y0", "y1")
            .edge("y1", "y0")
            .build()
            .unwrap();
        let bp = bisim_classes(&[&one, &two]).unwrap();
        assert_eq!(bp.num_blocks(), 1);
        assert_eq!(bp.local(2), (1, 1));
        assert_eq!(bp.global(1, 0), 1);
    }

    #[test]
    fn ap_mismatch_rejected() {
        let a = TransitionSystem::builder().state("x", ["p"]).edge("x", "x").build().unwrap();
        let b = TransitionSystem::builder().state("x", ["q"]).edge("x", "x").build().unwrap();
        assert!(matches!(bisim_classes(&[&a, &b]), Err(TsError::ApMismatch)));
    }
}
