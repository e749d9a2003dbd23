use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use super::{Caps, GeneralError, RelationMode, World};
use crate::bitset::BitSet;
use crate::ctl::{distinguishing_formula, holds, Ctl};
use crate::modal::KripkeFrame;
use crate::ts::{bisim_classes, find_abstraction, BisimPartition, SearchOutcome};

/// A CTL formula together with the set of blocks on which it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub formula: Ctl,
    pub blocks: BitSet,
}

/// General frame over a finite class of systems: worlds ordered by refinement,
/// admissible sets are unions of CTL-equivalence blocks.
#[derive(Debug, Clone)]
pub struct GeneralFrame {
    worlds: Vec<World>,
    frame: KripkeFrame,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_formulas: BTreeMap<usize, Ctl>,
    candidates: Vec<Candidate>,
    inconclusive: Vec<(usize, usize)>,
}

/// Builds the frame, computing access by the chosen relation mode.
pub fn build_general_frame(worlds: Vec<World>, mode: RelationMode, caps: &Caps) -> Result<GeneralFrame, GeneralError> {
    check_ap(&worlds)?;
    let n = worlds.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
    let (edges, inconclusive) = match mode {
        RelationMode::Search => {
            let results: Vec<Result<(usize, usize, Option<bool>), GeneralError>> = pairs
                .par_iter()
                .map(|&(u, v)| {
                    let out = find_abstraction(&worlds[u].system, &worlds[v].system, caps.search_nodes)?;
                    Ok((
                        u,
                        v,
                        match out {
                            SearchOutcome::Found(_) => Some(true),
                            SearchOutcome::NoWitness => Some(false),
                            SearchOutcome::Inconclusive { .. } => None,
                        },
                    ))
                })
                .collect();
            let mut edges = Vec::new();
            let mut open = Vec::new();
            for r in results {
                match r? {
                    (u, v, Some(true)) => edges.push((u, v)),
                    (u, v, None) => open.push((u, v)),
                    _ => {}
                }
            }
            (edges, open)
        }
        RelationMode::Coarsen => {
            if let Some(w) = worlds.iter().find(|w| w.class.is_empty()) {
                return Err(GeneralError::NoProvenance(w.id.clone()));
            }
            let edges = pairs
                .par_iter()
                .filter(|&&(u, v)| {
                    worlds[v]
                        .class
                        .iter()
                        .any(|pv| worlds[u].class.iter().any(|pu| pv.refines(pu)))
                })
                .copied()
                .collect();
            (edges, Vec::new())
        }
    };
    let mut g = GeneralFrame::from_parts(worlds, edges)?;
    g.inconclusive = inconclusive;
    Ok(g)
}

fn check_ap(worlds: &[World]) -> Result<(), GeneralError> {
    if let Some(first) = worlds.first() {
        if worlds.iter().any(|w| w.system.ap() != first.system.ap()) {
            return Err(GeneralError::Ts(crate::ts::TsError::ApMismatch));
        }
    }
    Ok(())
}

fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Vec<BitSet> {
    let mut r: Vec<BitSet> = (0..n).map(|i| BitSet::from_indices(n, [i])).collect();
    for &(a, b) in edges {
        r[a].insert(b);
    }
    for k in 0..n {
        let rk = r[k].clone();
        for row in r.iter_mut() {
            if row.contains(k) {
                row.union_with(&rk);
            }
        }
    }
    r
}

impl GeneralFrame {
    /// Frame over `worlds` with access the reflexive-transitive closure of `edges`.
    pub fn from_parts(worlds: Vec<World>, edges: Vec<(usize, usize)>) -> Result<Self, GeneralError> {
        check_ap(&worlds)?;
        for w in &worlds {
            w.system.ensure_valid()?;
        }
        let n = worlds.len();
        if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(GeneralError::WorldIndex(a.max(b)));
        }
        let closure = transitive_closure(n, &edges);
        let frame = KripkeFrame::new(
            worlds.iter().map(|w| w.id.clone()).collect(),
            (0..n).flat_map(|a| closure[a].iter().map(move |b| (a, b)).collect::<Vec<_>>()),
        )?;

        let systems: Vec<_> = worlds.iter().map(|w| &w.system).collect();
        let bp = bisim_classes(&systems)?;
        let keys: Vec<BTreeSet<usize>> = (0..n)
            .map(|w| worlds[w].system.initial().iter().map(|s| bp.block_of(w, *s)).collect())
            .collect();
        let mut ids: HashMap<&BTreeSet<usize>, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(n);
        for key in &keys {
            let next = blocks.len();
            let b = *ids.entry(key).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(block_of.len());
            block_of.push(b);
        }

        let mut g = GeneralFrame {
            worlds,
            frame,
            blocks,
            block_of,
            block_formulas: BTreeMap::new(),
            candidates: Vec::new(),
            inconclusive: Vec::new(),
        };
        g.candidates = g.build_candidates(&bp, &keys)?;
        g.block_formulas = g.build_indicators()?;
        Ok(g)
    }

    /// Formula true on the worlds with initial classes `ki`, false on those with `kj`.
    fn separator(bp: &BisimPartition, ki: &BTreeSet<usize>, kj: &BTreeSet<usize>, rep: &[usize]) -> Result<Ctl, GeneralError> {
        let sep = |a: usize, b: usize| distinguishing_formula(bp, rep[a], rep[b]);
        if let Some(&x) = kj.iter().find(|x| !ki.contains(x)) {
            let parts = ki.iter().map(|y| sep(*y, x)).collect::<Result<BTreeSet<_>, _>>()?;
            return Ok(Ctl::disj(parts));
        }
        // kj ⊊ ki: separate the other way round and negate
        let x = *ki.iter().find(|x| !kj.contains(x)).expect("keys differ");
        let parts = kj.iter().map(|y| sep(*y, x)).collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Ctl::disj(parts).negate())
    }

    fn build_candidates(&self, bp: &BisimPartition, keys: &[BTreeSet<usize>]) -> Result<Vec<Candidate>, GeneralError> {
        // a union state representing every bisimulation block
        let mut rep = vec![usize::MAX; bp.num_blocks()];
        for g in (0..bp.num_states()).rev() {
            rep[bp.block(g)] = g;
        }
        let nb = self.blocks.len();
        let mut formulas: Vec<Ctl> = vec![Ctl::True, Ctl::falsum()];
        for i in 0..nb {
            for j in 0..nb {
                if i == j {
                    continue;
                }
                let ki = &keys[self.blocks[i][0]];
                let kj = &keys[self.blocks[j][0]];
                let f = Self::separator(bp, ki, kj, &rep)?;
                formulas.push(f.clone().negate());
                formulas.push(f);
            }
        }
        let mut seen = BTreeSet::new();
        formulas.retain(|f| seen.insert(f.clone()));
        formulas
            .into_par_iter()
            .map(|f| {
                let worlds = self.truth(&f)?;
                let blocks = self.blocks_of_worlds(&worlds).ok_or_else(|| {
                    GeneralError::Internal(format!("`{f}` is not constant on a CTL block"))
                })?;
                Ok(Candidate { formula: f, blocks })
            })
            .collect()
    }

    fn build_indicators(&self) -> Result<BTreeMap<usize, Ctl>, GeneralError> {
        let nb = self.blocks.len();
        let mut out = BTreeMap::new();
        for i in 0..nb {
            let mut parts = BTreeSet::new();
            let mut ok = true;
            for j in (0..nb).filter(|j| *j != i) {
                let best = self
                    .candidates
                    .iter()
                    .filter(|c| c.blocks.contains(i) && !c.blocks.contains(j))
                    .min_by_key(|c| c.formula.size());
                match best {
                    Some(c) => {
                        parts.insert(c.formula.clone());
                    }
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let f = Ctl::conj(parts);
            // kept only when the check confirms it isolates the block
            let truth = self.truth(&f)?;
            if (0..self.len()).all(|w| truth.contains(w) == (self.block_of[w] == i)) {
                out.insert(i, f);
            }
        }
        Ok(out)
    }

    /// Block set of a world set that is a union of blocks.
    pub fn blocks_of_worlds(&self, worlds: &BitSet) -> Option<BitSet> {
        let mut out = BitSet::new(self.blocks.len());
        for (b, members) in self.blocks.iter().enumerate() {
            let inside = members.iter().filter(|w| worlds.contains(**w)).count();
            if inside == members.len() {
                out.insert(b);
            } else if inside != 0 {
                return None;
            }
        }
        Some(out)
    }

    /// World set of a block set.
    pub fn worlds_of_blocks(&self, blocks: &BitSet) -> BitSet {
        BitSet::from_indices(self.len(), blocks.iter().flat_map(|b| self.blocks[b].iter().copied()))
    }

    /// Worlds whose system satisfies `f` (every initial state).
    pub fn truth(&self, f: &Ctl) -> Result<BitSet, GeneralError> {
        let mut out = BitSet::new(self.len());
        for (i, w) in self.worlds.iter().enumerate() {
            if holds(&w.system, f)? {
                out.insert(i);
            }
        }
        Ok(out)
    }

    /// Smallest known CTL formula holding exactly on the given blocks.
    pub fn express(&self, blocks: &BitSet) -> Option<Ctl> {
        let direct = self
            .candidates
            .iter()
            .filter(|c| c.blocks == *blocks)
            .min_by_key(|c| c.formula.size())
            .map(|c| c.formula.clone());
        let via_indicators = blocks
            .iter()
            .map(|b| self.block_formulas.get(&b).cloned())
            .collect::<Option<Vec<_>>>()
            .map(Ctl::disj);
        match (direct, via_indicators) {
            (Some(a), Some(b)) => Some(if b.size() < a.size() { b } else { a }),
            (a, b) => a.or(b),
        }
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world(&self, w: usize) -> &World {
        &self.worlds[w]
    }

    pub fn world_index(&self, id: &str) -> Result<usize, GeneralError> {
        self.frame.index_of(id).ok_or_else(|| GeneralError::UnknownWorld(id.to_string()))
    }

    /// The underlying Kripke frame, worlds named by id.
    pub fn kripke(&self) -> &KripkeFrame {
        &self.frame
    }

    pub fn access(&self, u: usize, v: usize) -> bool {
        self.frame.access(u, v)
    }

    pub fn upset(&self, w: usize) -> &BitSet {
        self.frame.successors(w)
    }

    pub fn ap(&self) -> BTreeSet<String> {
        self.worlds.first().map(|w| w.system.ap().clone()).unwrap_or_default()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, w: usize) -> usize {
        self.block_of[w]
    }

    pub fn block_formulas(&self) -> &BTreeMap<usize, Ctl> {
        &self.block_formulas
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// World pairs whose abstraction search ran out of budget (treated as no edge).
    pub fn inconclusive_edges(&self) -> &[(usize, usize)] {
        &self.inconclusive
    }

    /// The least world: one from which every world is accessible.
    pub fn root(&self) -> Option<usize> {
        (0..self.len()).find(|w| self.upset(*w).count() == self.len())
    }

    /// Same frame with new world ids.
    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self, GeneralError> {
        if ids.len() != self.len() {
            return Err(GeneralError::Internal(format!("{} ids for {} worlds", ids.len(), self.len())));
        }
        self.frame = KripkeFrame::new(ids.clone(), self.frame.edges().collect::<Vec<_>>())?;
        for (w, id) in self.worlds.iter_mut().zip(ids) {
            w.id = id;
        }
        Ok(self)
    }

    /// Subframe on `keep`, recomputing blocks and formulas.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, GeneralError> {
        let worlds = keep.iter().map(|w| self.worlds[*w].clone()).collect();
        let edges = keep
            .iter()
            .enumerate()
            .flat_map(|(i, a)| keep.iter().enumerate().map(move |(j, b)| ((i, *a), (j, *b))))
            .filter(|((_, a), (_, b))| self.access(*a, *b))
            .map(|((i, _), (j, _))| (i, j))
            .collect();
        Self::from_parts(worlds, edges)
    }
}
