use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{LabelSet, TransitionSystem, TsError};

pub const DEFAULT_SEARCH_NODES: u64 = 1_000_000;

/// A surjective function from `fine` states onto `coarse` states, claimed to
/// certify that `coarse` is an abstraction of `fine` (`coarse ⤳ fine`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionWitness {
    pub fine: TransitionSystem,
    pub coarse: TransitionSystem,
    pub map: Vec<usize>,
}

impl AbstractionWitness {
    pub fn identity(ts: &TransitionSystem) -> Self {
        AbstractionWitness {
            fine: ts.clone(),
            coarse: ts.clone(),
            map: (0..ts.num_states()).collect(),
        }
    }

    /// The map as `fine name -> coarse name` pairs.
    pub fn named_map(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(s, c)| (self.fine.state_name(s).to_string(), self.coarse.state_name(*c).to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// The map is not defined on every fine state.
    Total,
    Surjective,
    Labels,
    Transitions,
    Initial,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Total => "totality",
            Condition::Surjective => "surjectivity",
            Condition::Labels => "label preservation",
            Condition::Transitions => "exact image of transitions",
            Condition::Initial => "exact image of initial states",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionViolation {
    pub condition: Condition,
    pub states: (String, String),
    pub reason: String,
}

impl fmt::Display for AbstractionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at ({}, {}): {}",
            self.condition, self.states.0, self.states.1, self.reason
        )
    }
}

fn violation(condition: Condition, a: &str, b: &str, reason: impl Into<String>) -> AbstractionViolation {
    AbstractionViolation {
        condition,
        states: (a.to_string(), b.to_string()),
        reason: reason.into(),
    }
}

/// Checks the witness conditions in order and reports the first failure.
pub fn is_abstraction(w: &AbstractionWitness) -> Result<(), AbstractionViolation> {
    let (fine, coarse) = (&w.fine, &w.coarse);
    if w.map.len() != fine.num_states() {
        return Err(violation(
            Condition::Total,
            "",
            "",
            format!("map has {} entries for {} states", w.map.len(), fine.num_states()),
        ));
    }
    if let Some(s) = w.map.iter().position(|c| *c >= coarse.num_states()) {
        return Err(violation(Condition::Total, fine.state_name(s), "", "image out of range"));
    }
    let mut hit = vec![false; coarse.num_states()];
    for &c in &w.map {
        hit[c] = true;
    }
    if let Some(c) = hit.iter().position(|h| !h) {
        let name = coarse.state_name(c);
        return Err(violation(Condition::Surjective, name, name, "coarse state has no preimage"));
    }
    for (s, &c) in w.map.iter().enumerate() {
        if fine.label(s) != coarse.label(c) {
            return Err(violation(
                Condition::Labels,
                fine.state_name(s),
                coarse.state_name(c),
                "labels differ",
            ));
        }
    }
    let mut image = BTreeSet::new();
    for (a, b) in fine.transitions() {
        let (fa, fb) = (w.map[a], w.map[b]);
        if !coarse.has_transition(fa, fb) {
            return Err(violation(
                Condition::Transitions,
                fine.state_name(a),
                fine.state_name(b),
                format!(
                    "image {} -> {} is not a coarse transition",
                    coarse.state_name(fa),
                    coarse.state_name(fb)
                ),
            ));
        }
        image.insert((fa, fb));
    }
    for (u, v) in coarse.transitions() {
        if !image.contains(&(u, v)) {
            return Err(violation(
                Condition::Transitions,
                coarse.state_name(u),
                coarse.state_name(v),
                "coarse transition is not the image of a fine transition",
            ));
        }
    }
    let init_image: BTreeSet<usize> = fine.initial().iter().map(|s| w.map[*s]).collect();
    for &s in fine.initial() {
        if !coarse.is_initial(w.map[s]) {
            return Err(violation(
                Condition::Initial,
                fine.state_name(s),
                coarse.state_name(w.map[s]),
                "initial state mapped to a non-initial state",
            ));
        }
    }
    for &c in coarse.initial() {
        if !init_image.contains(&c) {
            let name = coarse.state_name(c);
            return Err(violation(
                Condition::Initial,
                name,
                name,
                "coarse initial state is not the image of a fine initial state",
            ));
        }
    }
    Ok(())
}

/// Composes `outer: mid -> coarse` with `inner: fine -> mid`.
pub fn compose(outer: &AbstractionWitness, inner: &AbstractionWitness) -> Result<AbstractionWitness, TsError> {
    if inner.coarse != outer.fine {
        return Err(TsError::WitnessMismatch);
    }
    Ok(AbstractionWitness {
        fine: inner.fine.clone(),
        coarse: outer.coarse.clone(),
        map: inner.map.iter().map(|m| outer.map[*m]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(AbstractionWitness),
    NoWitness,
    /// The node budget ran out before the search space was exhausted.
    Inconclusive {
        nodes: u64,
    },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&AbstractionWitness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

struct Search<'a> {
    coarse: &'a TransitionSystem,
    fine: &'a TransitionSystem,
    order: Vec<usize>,
    cand: Vec<Vec<usize>>,
    class_of_fine: Vec<usize>,
    /// Unassigned fine states per label class.
    fine_left: Vec<usize>,
    /// Coarse states per label class without a preimage yet.
    coarse_unhit: Vec<usize>,
    hits: Vec<usize>,
    fine_init_left: usize,
    coarse_init_unhit: usize,
    init_hits: Vec<usize>,
    assign: Vec<usize>,
    /// Number of assigned fine edges covering each coarse edge.
    cover: BTreeMap<(usize, usize), usize>,
    nodes: u64,
    budget: u64,
}

const UNSET: usize = usize::MAX;

impl Search<'_> {
    fn consistent(&self, s: usize, c: usize) -> bool {
        for &t in self.fine.successors(s) {
            let ft = if t == s { c } else { self.assign[t] };
            if ft != UNSET && !self.coarse.has_transition(c, ft) {
                return false;
            }
        }
        for &t in self.fine.predecessors(s) {
            let ft = if t == s { c } else { self.assign[t] };
            if ft != UNSET && !self.coarse.has_transition(ft, c) {
                return false;
            }
        }
        true
    }

    fn edges_of(&self, s: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &t in self.fine.successors(s) {
            let ft = self.assign[t];
            if ft != UNSET {
                out.push((self.assign[s], ft));
            }
        }
        for &t in self.fine.predecessors(s) {
            if t != s {
                let ft = self.assign[t];
                if ft != UNSET {
                    out.push((ft, self.assign[s]));
                }
            }
        }
        out
    }

    fn place(&mut self, s: usize, c: usize) {
        self.assign[s] = c;
        let k = self.class_of_fine[s];
        self.fine_left[k] -= 1;
        if self.hits[c] == 0 {
            self.coarse_unhit[k] -= 1;
        }
        self.hits[c] += 1;
        if self.fine.is_initial(s) {
            self.fine_init_left -= 1;
            if self.init_hits[c] == 0 {
                self.coarse_init_unhit -= 1;
            }
            self.init_hits[c] += 1;
        }
        for e in self.edges_of(s) {
            *self.cover.entry(e).or_insert(0) += 1;
        }
    }

    fn unplace(&mut self, s: usize) {
        for e in self.edges_of(s) {
            let n = self.cover.get_mut(&e).expect("covered edge");
            *n -= 1;
            if *n == 0 {
                self.cover.remove(&e);
            }
        }
        let c = self.assign[s];
        let k = self.class_of_fine[s];
        self.fine_left[k] += 1;
        self.hits[c] -= 1;
        if self.hits[c] == 0 {
            self.coarse_unhit[k] += 1;
        }
        if self.fine.is_initial(s) {
            self.fine_init_left += 1;
            self.init_hits[c] -= 1;
            if self.init_hits[c] == 0 {
                self.coarse_init_unhit += 1;
            }
        }
        self.assign[s] = UNSET;
    }

    fn counts_ok(&self) -> bool {
        self.fine_left.iter().zip(&self.coarse_unhit).all(|(f, c)| f >= c)
            && self.fine_init_left >= self.coarse_init_unhit
    }

    /// Returns `Some(true)` when a full witness is found, `None` on budget exhaustion.
    fn run(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(self.cover.len() == self.coarse.num_transitions() && self.coarse_init_unhit == 0);
        }
        let s = self.order[depth];
        let cands = self.cand[s].clone();
        for c in cands {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            if !self.consistent(s, c) {
                continue;
            }
            self.place(s, c);
            if self.counts_ok() {
                match self.run(depth + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            self.unplace(s);
        }
        Some(false)
    }
}

fn label_successor_profile(ts: &TransitionSystem, s: usize, forward: bool) -> BTreeSet<&LabelSet> {
    let n = if forward { ts.successors(s) } else { ts.predecessors(s) };
    n.iter().map(|t| ts.label(*t)).collect()
}

/// Backtracking search for a witness of `coarse ⤳ fine`.
///
/// Fine states are visited breadth-first from the initial states (ties by
/// declaration order); candidates are coarse states with the same label and
/// compatible neighbourhood label profiles, tried in declaration order.
pub fn find_abstraction(
    coarse: &TransitionSystem,
    fine: &TransitionSystem,
    budget: u64,
) -> Result<SearchOutcome, TsError> {
    coarse.ensure_valid()?;
    fine.ensure_valid()?;
    if coarse.ap() != fine.ap() {
        return Err(TsError::ApMismatch);
    }
    if fine.num_states() < coarse.num_states()
        || fine.num_transitions() < coarse.num_transitions()
        || fine.initial().len() < coarse.initial().len()
    {
        return Ok(SearchOutcome::NoWitness);
    }
    let mut class_ids: BTreeMap<&LabelSet, usize> = BTreeMap::new();
    for i in 0..coarse.num_states() {
        let next = class_ids.len();
        class_ids.entry(coarse.label(i)).or_insert(next);
    }
    let k = class_ids.len();
    let class_of_coarse: Vec<usize> = (0..coarse.num_states()).map(|i| class_ids[coarse.label(i)]).collect();
    let mut class_of_fine = Vec::with_capacity(fine.num_states());
    for s in 0..fine.num_states() {
        match class_ids.get(fine.label(s)) {
            Some(c) => class_of_fine.push(*c),
            None => return Ok(SearchOutcome::NoWitness),
        }
    }
    let mut fine_left = vec![0; k];
    let mut coarse_unhit = vec![0; k];
    for &c in &class_of_fine {
        fine_left[c] += 1;
    }
    for &c in &class_of_coarse {
        coarse_unhit[c] += 1;
    }
    if fine_left.iter().zip(&coarse_unhit).any(|(f, c)| f < c) {
        return Ok(SearchOutcome::NoWitness);
    }

    let coarse_out: Vec<_> = (0..coarse.num_states())
        .map(|c| label_successor_profile(coarse, c, true))
        .collect();
    let coarse_in: Vec<_> = (0..coarse.num_states())
        .map(|c| label_successor_profile(coarse, c, false))
        .collect();
    let mut cand = Vec::with_capacity(fine.num_states());
    for s in 0..fine.num_states() {
        let out = label_successor_profile(fine, s, true);
        let inn = label_successor_profile(fine, s, false);
        let list: Vec<usize> = (0..coarse.num_states())
            .filter(|&c| {
                class_of_coarse[c] == class_of_fine[s]
                    && (!fine.is_initial(s) || coarse.is_initial(c))
                    && out.is_subset(&coarse_out[c])
                    && inn.is_subset(&coarse_in[c])
            })
            .collect();
        if list.is_empty() {
            return Ok(SearchOutcome::NoWitness);
        }
        cand.push(list);
    }

    let mut order = Vec::with_capacity(fine.num_states());
    let mut seen = vec![false; fine.num_states()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let roots: Vec<usize> = fine.initial().iter().copied().chain(0..fine.num_states()).collect();
    for r in roots {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        queue.push_back(r);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for &t in fine.successors(s) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }

    let mut search = Search {
        coarse,
        fine,
        order,
        cand,
        class_of_fine,
        fine_left,
        coarse_unhit,
        hits: vec![0; coarse.num_states()],
        fine_init_left: fine.initial().len(),
        coarse_init_unhit: coarse.initial().len(),
        init_hits: vec![0; coarse.num_states()],
        assign: vec![UNSET; fine.num_states()],
        cover: BTreeMap::new(),
        nodes: 0,
        budget,
    };
    match search.run(0) {
        None => Ok(SearchOutcome::Inconclusive { nodes: search.nodes }),
        Some(false) => Ok(SearchOutcome::NoWitness),
        Some(true) => {
            let w = AbstractionWitness {
                fine: fine.clone(),
                coarse: coarse.clone(),
                map: search.assign,
            };
            debug_assert!(is_abstraction(&w).is_ok());
            Ok(SearchOutcome::Found(w))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::{quotient, Partition};

    fn chain() -> TransitionSystem {
        TransitionSystem::builder()
            .state("a", ["p"])
            .state("b", ["p"])
            .state("c", ["q"])
            .initial("a")
            .edge("a", "b")
            .edge("b", "c")
            .edge("c", "c")
            .build()
            .unwrap()
    }

    #[test]
    fn quotient_witness_passes() {
        let ts = chain();
        let (_, w) = quotient(&ts, &Partition::from_block_ids(&[0, 0, 1])).unwrap();
        assert_eq!(is_abstraction(&w), Ok(()));
    }

    #[test]
    fn deleting_a_coarse_transition_breaks_the_image_condition() {
        let ts = chain();
        let (q, w) = quotient(&ts, &Partition::from_block_ids(&[0, 0, 1])).unwrap();
        let edges: Vec<_> = q.transitions().filter(|e| *e != (0, 0)).collect();
        let cut = TransitionSystem::from_parts(
            q.states().to_vec(),
            q.initial().to_vec(),
            q.ap().clone(),
            q.labels().to_vec(),
            edges,
        )
        .unwrap();
        let bad = AbstractionWitness { coarse: cut, ..w };
        let v = is_abstraction(&bad).unwrap_err();
        assert_eq!(v.condition, Condition::Transitions);
    }

    #[test]
    fn identity_is_found() {
        let ts = chain();
        let out = find_abstraction(&ts, &ts, DEFAULT_SEARCH_NODES).unwrap();
        assert_eq!(out.witness().unwrap().map, vec![0, 1, 2]);
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let ts = chain();
        let out = find_abstraction(&ts, &ts, 1).unwrap();
        assert!(matches!(out, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn composition_of_quotients() {
        let ts = chain();
        let (mid, inner) = quotient(&ts, &Partition::discrete(3)).unwrap();
        let (_, outer) = quotient(&mid, &Partition::from_block_ids(&[0, 0, 1])).unwrap();
        let w = compose(&outer, &inner).unwrap();
        assert_eq!(is_abstraction(&w), Ok(()));
        assert!(compose(&inner, &outer).is_err());
    }
}
