use std::collections::{BTreeMap, HashMap};

use super::{AbstractionWitness, TransitionSystem, TsError};

/// Common refinement of two abstractions of `t`: the image of `t` under
/// `s ↦ (f1(s), f2(s))`, with projections onto both coarse systems.
pub fn common_refinement(
    t: &TransitionSystem,
    w1: &AbstractionWitness,
    w2: &AbstractionWitness,
) -> Result<(TransitionSystem, AbstractionWitness, AbstractionWitness), TsError> {
    if w1.fine != *t || w2.fine != *t {
        return Err(TsError::WitnessMismatch);
    }
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut of = Vec::with_capacity(t.num_states());
    for s in 0..t.num_states() {
        let key = (w1.map[s], w2.map[s]);
        let next = pairs.len();
        let id = *ids.entry(key).or_insert_with(|| {
            pairs.push((key, s));
            next
        });
        of.push(id);
    }
    let names = pairs
        .iter()
        .map(|((a, b), _)| format!("({},{})", w1.coarse.state_name(*a), w2.coarse.state_name(*b)))
        .collect();
    let labels = pairs.iter().map(|(_, s)| t.label(*s).clone()).collect();
    let product = TransitionSystem::from_parts(
        names,
        t.initial().iter().map(|s| of[*s]),
        t.ap().clone(),
        labels,
        t.transitions().map(|(a, b)| (of[a], of[b])),
    )?;
    let p1 = AbstractionWitness {
        fine: product.clone(),
        coarse: w1.coarse.clone(),
        map: pairs.iter().map(|((a, _), _)| *a).collect(),
    };
    let p2 = AbstractionWitness {
        fine: product.clone(),
        coarse: w2.coarse.clone(),
        map: pairs.iter().map(|((_, b), _)| *b).collect(),
    };
    Ok((product, p1, p2))
}

/// A finite lasso: visit `path` in order, then continue from `path[loop_to]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub path: Vec<usize>,
    pub loop_to: usize,
}

impl Lasso {
    pub fn new(path: Vec<usize>, loop_to: usize) -> Self {
        Lasso { path, loop_to }
    }
}

/// Disjoint union of a non-initial copy of `t` and, for every initial state,
/// an initial component that can only follow the given lasso.
pub fn path_isolating_refinement(
    t: &TransitionSystem,
    lassos: &BTreeMap<usize, Lasso>,
) -> Result<(TransitionSystem, AbstractionWitness), TsError> {
    let bad = |init: usize, step: usize, reason: &str| TsError::BadLasso {
        initial: t.state_name(init).to_string(),
        step,
        reason: reason.to_string(),
    };
    for &i in t.initial() {
        if !lassos.contains_key(&i) {
            return Err(bad(i, 0, "no lasso given for this initial state"));
        }
    }
    for (&init, lasso) in lassos {
        if init >= t.num_states() || !t.is_initial(init) {
            return Err(TsError::BadLasso {
                initial: t.states().get(init).cloned().unwrap_or_else(|| init.to_string()),
                step: 0,
                reason: "key is not an initial state".into(),
            });
        }
        let p = &lasso.path;
        if p.first() != Some(&init) {
            return Err(bad(init, 0, "lasso does not start at its initial state"));
        }
        if let Some(k) = p.iter().position(|s| *s >= t.num_states()) {
            return Err(bad(init, k, "unknown state"));
        }
        for k in 1..p.len() {
            if !t.has_transition(p[k - 1], p[k]) {
                return Err(bad(init, k, "no such transition"));
            }
        }
        if lasso.loop_to >= p.len() {
            return Err(bad(init, p.len(), "loop target outside the path"));
        }
        if !t.has_transition(p[p.len() - 1], p[lasso.loop_to]) {
            return Err(bad(init, p.len(), "closing transition missing"));
        }
    }

    let n = t.num_states();
    let mut names: Vec<String> = t.states().to_vec();
    let mut labels = t.labels().to_vec();
    let mut map: Vec<usize> = (0..n).collect();
    let mut edges: Vec<(usize, usize)> = t.transitions().collect();
    let mut initial = Vec::new();
    for (&init, lasso) in lassos {
        let base = names.len();
        for (k, &s) in lasso.path.iter().enumerate() {
            names.push(format!("{}@{}.{}", t.state_name(s), t.state_name(init), k));
            labels.push(t.label(s).clone());
            map.push(s);
            if k > 0 {
                edges.push((base + k - 1, base + k));
            }
        }
        edges.push((base + lasso.path.len() - 1, base + lasso.loop_to));
        initial.push(base);
    }
    let ts = TransitionSystem::from_parts(names, initial, t.ap().clone(), labels, edges)?;
    let w = AbstractionWitness {
        fine: ts.clone(),
        coarse: t.clone(),
        map,
    };
    Ok((ts, w))
}
