use std::collections::BTreeMap;

use super::TransitionSystem;

/// Name-independent encoding of a system: the lexicographically least
/// (labels, edges) encoding over the orderings explored by colour refinement
/// and individualisation. Two systems are isomorphic iff their forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    ap: Vec<String>,
    nodes: Vec<(bool, Vec<String>)>,
    edges: Vec<(usize, usize)>,
}

impl CanonicalForm {
    pub fn num_states(&self) -> usize {
        self.nodes.len()
    }
}

/// Ranks keys by sorted order, so the result does not depend on state numbering.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let sorted: BTreeMap<K, usize> = keys.iter().cloned().map(|k| (k, 0)).collect();
    let ids: BTreeMap<K, usize> = sorted.into_keys().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| ids[k]).collect()
}

fn num_colors(c: &[usize]) -> usize {
    c.iter().max().map_or(0, |m| m + 1)
}

fn refine(ts: &TransitionSystem, mut color: Vec<usize>) -> Vec<usize> {
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..ts.num_states())
            .map(|s| {
                let mut out: Vec<usize> = ts.successors(s).iter().map(|t| color[*t]).collect();
                let mut inn: Vec<usize> = ts.predecessors(s).iter().map(|t| color[*t]).collect();
                out.sort_unstable();
                inn.sort_unstable();
                (color[s], out, inn)
            })
            .collect();
        let next = rank(&keys);
        if num_colors(&next) == num_colors(&color) {
            return next;
        }
        color = next;
    }
}

fn encode(ts: &TransitionSystem, color: &[usize]) -> (CanonicalForm, Vec<usize>) {
    let n = ts.num_states();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|s| color[*s]);
    let mut pos = vec![0; n];
    for (i, s) in order.iter().enumerate() {
        pos[*s] = i;
    }
    let nodes = order
        .iter()
        .map(|s| (ts.is_initial(*s), ts.label(*s).iter().cloned().collect()))
        .collect();
    let mut edges: Vec<(usize, usize)> = ts.transitions().map(|(a, b)| (pos[a], pos[b])).collect();
    edges.sort_unstable();
    (
        CanonicalForm {
            ap: ts.ap().iter().cloned().collect(),
            nodes,
            edges,
        },
        order,
    )
}

fn search(ts: &TransitionSystem, color: Vec<usize>, best: &mut Option<(CanonicalForm, Vec<usize>)>) {
    let n = ts.num_states();
    let k = num_colors(&color);
    if k == n {
        let cand = encode(ts, &color);
        if best.as_ref().is_none_or(|b| cand.0 < b.0) {
            *best = Some(cand);
        }
        return;
    }
    let mut sizes = vec![0; k];
    for &c in &color {
        sizes[c] += 1;
    }
    let cell = (0..k).find(|c| sizes[*c] > 1).expect("non-discrete colouring has a non-singleton cell");
    for v in (0..n).filter(|s| color[*s] == cell) {
        let keys: Vec<(usize, bool)> = (0..n).map(|s| (color[s], s != v)).collect();
        let next = refine(ts, rank(&keys));
        search(ts, next, best);
    }
}

fn canonical(ts: &TransitionSystem) -> (CanonicalForm, Vec<usize>) {
    let keys: Vec<(bool, Vec<&String>)> = (0..ts.num_states())
        .map(|s| (ts.is_initial(s), ts.label(s).iter().collect()))
        .collect();
    let start = refine(ts, rank(&keys));
    let mut best = None;
    search(ts, start, &mut best);
    best.unwrap_or_else(|| encode(ts, &[]))
}

pub fn canonical_form(ts: &TransitionSystem) -> CanonicalForm {
    canonical(ts).0
}

/// A bijection `a-state -> b-state` preserving labels, transitions and
/// initial states, if one exists.
pub fn iso_check(a: &TransitionSystem, b: &TransitionSystem) -> Option<Vec<usize>> {
    if a.num_states() != b.num_states() || a.num_transitions() != b.num_transitions() {
        return None;
    }
    let (fa, oa) = canonical(a);
    let (fb, ob) = canonical(b);
    if fa != fb {
        return None;
    }
    let mut map = vec![0; a.num_states()];
    for (i, s) in oa.iter().enumerate() {
        map[*s] = ob[i];
    }
    Some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> TransitionSystem {
        TransitionSystem::builder()
            .state("r", ["a"])
            .state("x", ["a"])
            .state("y", ["a"])
            .state("z", ["b"])
            .initial("r")
            .edge("r", "x")
            .edge("r", "y")
            .edge("x", "z")
            .edge("y", "z")
            .edge("z", "z")
            .build()
            .unwrap()
    }

    fn check_bijection(a: &TransitionSystem, b: &TransitionSystem, m: &[usize]) {
        for s in 0..a.num_states() {
            assert_eq!(a.label(s), b.label(m[s]));
            assert_eq!(a.is_initial(s), b.is_initial(m[s]));
        }
        for (x, y) in a.transitions() {
            assert!(b.has_transition(m[x], m[y]));
        }
    }

    #[test]
    fn renaming_is_isomorphic() {
        let a = diamond();
        let b = a.renamed(|i, _| format!("q{}", 3 - i)).unwrap();
        let m = iso_check(&a, &b).unwrap();
        check_bijection(&a, &b, &m);
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn reordered_states_are_isomorphic() {
        let a = diamond();
        let b = TransitionSystem::builder()
            .state("z", ["b"])
            .state("y", ["a"])
            .state("r", ["a"])
            .state("x", ["a"])
            .initial("r")
            .edge("z", "z")
            .edge("y", "z")
            .edge("x", "z")
            .edge("r", "y")
            .edge("r", "x")
            .build()
            .unwrap();
        let m = iso_check(&a, &b).unwrap();
        check_bijection(&a, &b, &m);
    }

    #[test]
    fn initial_flag_matters() {
        let a = diamond();
        let b = TransitionSystem::builder()
            .state("r", ["a"])
            .state("x", ["a"])
            .state("y", ["a"])
            .state("z", ["b"])
            .initial("x")
            .edge("r", "x")
            .edge("r", "y")
            .edge("x", "z")
            .edge("y", "z")
            .edge("z", "z")
            .build()
            .unwrap();
        assert!(iso_check(&a, &b).is_none());
    }

    #[test]
    fn regular_symmetric_graph() {
        // 6-cycle vs two 3-cycles: colour refinement alone cannot tell them apart
        let mut c6 = TransitionSystem::builder();
        let mut c33 = TransitionSystem::builder();
        for i in 0..6 {
            c6.add_state(format!("s{i}"), ["p"]);
            c33.add_state(format!("s{i}"), ["p"]);
            c6.add_edge(format!("s{i}"), format!("s{}", (i + 1) % 6));
            let next = if i < 3 { (i + 1) % 3 } else { 3 + (i + 1) % 3 };
            c33.add_edge(format!("s{i}"), format!("s{next}"));
        }
        let (c6, c33) = (c6.build().unwrap(), c33.build().unwrap());
        assert!(iso_check(&c6, &c33).is_none());
        assert!(iso_check(&c6, &c6).is_some());
    }
}
