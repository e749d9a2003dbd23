use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::GeneralError;
use crate::modal::DEFAULT_VALUATION_BUDGET;
use crate::ts::{canonical_form, quotient, LabelSet, Partition, TransitionSystem, DEFAULT_SEARCH_NODES};

/// A world of a general frame: one finite system, optionally with the seed
/// partitions it was obtained from.
#[derive(Debug, Clone)]
pub struct World {
    pub id: String,
    pub system: TransitionSystem,
    /// Representative seed partition.
    pub partition: Option<Partition>,
    /// Every enumerated seed partition whose quotient was merged into this world.
    pub class: Vec<Partition>,
}

impl World {
    pub fn new(id: impl Into<String>, system: TransitionSystem) -> Self {
        World {
            id: id.into(),
            system,
            partition: None,
            class: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_states: usize,
    pub max_worlds: usize,
    /// Seed partitions visited before enumeration gives up.
    pub max_partitions: u64,
    pub search_nodes: u64,
    pub valuation_budget: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 14,
            max_worlds: 40,
            max_partitions: 1_000_000,
            search_nodes: DEFAULT_SEARCH_NODES,
            valuation_budget: DEFAULT_VALUATION_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldMode {
    /// One world per isomorphism class of quotients.
    Iso,
    /// One world per partition.
    Partition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    /// Pairwise abstraction search.
    Search,
    /// Partition coarsening, closed under isomorphism.
    Coarsen,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub worlds: Vec<World>,
    /// False when a cap cut the enumeration short.
    pub complete: bool,
}

/// All set partitions of `0..k` as restricted growth strings, in lexicographic order.
pub fn restricted_growth_strings(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let bound = if cur.is_empty() { 0 } else { max + 1 };
        for v in 0..=bound {
            cur.push(v);
            go(k, max.max(v), cur, out);
            cur.pop();
        }
    }
    go(k, 0, &mut cur, &mut out);
    out
}

/// Partition id used as a world id: blocks joined by `|`, members by `+`.
pub fn partition_id(ts: &TransitionSystem, p: &Partition) -> String {
    p.to_names(ts).iter().map(|b| b.join("+")).collect::<Vec<_>>().join("|")
}

/// Label-uniform partitions of `seed` refining `base`, visited group by group.
fn partitions_within(
    seed: &TransitionSystem,
    base: &Partition,
    limit: u64,
) -> (Vec<Partition>, bool) {
    let mut groups: BTreeMap<(usize, &LabelSet), Vec<usize>> = BTreeMap::new();
    for s in 0..seed.num_states() {
        groups.entry((base.block_of(s), seed.label(s))).or_default().push(s);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups.sort_by_key(|g| g[0]);
    let choices: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| restricted_growth_strings(g.len())).collect();
    let mut digits = vec![0usize; groups.len()];
    let mut out = Vec::new();
    loop {
        if out.len() as u64 >= limit {
            return (out, false);
        }
        let mut ids = vec![0usize; seed.num_states()];
        let mut offset = 0;
        for (g, members) in groups.iter().enumerate() {
            let rgs = &choices[g][digits[g]];
            for (i, s) in members.iter().enumerate() {
                ids[*s] = offset + rgs[i];
            }
            offset += members.len();
        }
        out.push(Partition::from_block_ids(&ids));
        // odometer, last group fastest
        let mut g = groups.len();
        loop {
            if g == 0 {
                return (out, true);
            }
            g -= 1;
            digits[g] += 1;
            if digits[g] < choices[g].len() {
                break;
            }
            digits[g] = 0;
        }
    }
}

/// Worlds for every label-uniform quotient of `seed`.
///
/// Worlds come finest first (more blocks first, then enumeration order), so
/// the seed itself is world 0.
pub fn enumerate_abstractions(seed: &TransitionSystem, mode: WorldMode, caps: &Caps) -> Result<Enumeration, GeneralError> {
    enumerate_within(seed, &Partition::by_labels(seed), mode, caps)
}

/// As [`enumerate_abstractions`], restricted to partitions refining `base`.
pub fn enumerate_within(
    seed: &TransitionSystem,
    base: &Partition,
    mode: WorldMode,
    caps: &Caps,
) -> Result<Enumeration, GeneralError> {
    seed.ensure_valid()?;
    if seed.num_states() > caps.max_states {
        return Err(GeneralError::TooManyStates {
            states: seed.num_states(),
            cap: caps.max_states,
        });
    }
    if base.len() != seed.num_states() {
        return Err(GeneralError::Ts(crate::ts::TsError::BadPartition(
            "base partition does not match the seed".into(),
        )));
    }
    if let Some(b) = base.first_mixed_block(seed) {
        return Err(GeneralError::Ts(crate::ts::TsError::NotLabelUniform(
            b.iter().map(|s| seed.state_name(*s).to_string()).collect(),
        )));
    }
    let (parts, complete) = partitions_within(seed, base, caps.max_partitions);
    let mut e = worlds_from_partitions(seed, parts, mode, caps)?;
    e.complete &= complete;
    Ok(e)
}

/// One world per given partition, or per isomorphism class of quotients.
///
/// Partitions are visited with more blocks first, ties in the given order.
pub fn worlds_from_partitions(
    seed: &TransitionSystem,
    mut parts: Vec<Partition>,
    mode: WorldMode,
    caps: &Caps,
) -> Result<Enumeration, GeneralError> {
    parts.sort_by_key(|p| std::cmp::Reverse(p.num_blocks()));
    let mut complete = true;
    let mut worlds: Vec<World> = Vec::new();
    let mut by_form = HashMap::new();
    for p in parts {
        let (q, _) = quotient(seed, &p)?;
        let form = (mode == WorldMode::Iso).then(|| canonical_form(&q));
        let existing = form.as_ref().and_then(|f| by_form.get(f).copied());
        match existing {
            Some(w) => {
                let world: &mut World = &mut worlds[w];
                world.class.push(p);
            }
            None => {
                if worlds.len() >= caps.max_worlds {
                    complete = false;
                    continue;
                }
                if let Some(f) = form {
                    by_form.insert(f, worlds.len());
                }
                worlds.push(World {
                    id: partition_id(seed, &p),
                    system: q,
                    partition: Some(p.clone()),
                    class: vec![p],
                });
            }
        }
    }
    Ok(Enumeration { worlds, complete })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell: Vec<usize> = (0..7).map(|k| restricted_growth_strings(k).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203]);
        assert_eq!(restricted_growth_strings(3)[1], vec![0, 0, 1]);
    }

    fn distinct_labels() -> TransitionSystem {
        TransitionSystem::builder()
            .state("x", ["p"])
            .state("y", ["q"])
            .initial("x")
            .edge("x", "y")
            .edge("y", "y")
            .build()
            .unwrap()
    }

    #[test]
    fn all_labels_distinct_gives_one_world() {
        let e = enumerate_abstractions(&distinct_labels(), WorldMode::Iso, &Caps::default()).unwrap();
        assert_eq!(e.worlds.len(), 1);
        assert!(e.complete);
        assert_eq!(e.worlds[0].id, "x|y");
    }

    #[test]
    fn state_cap() {
        let caps = Caps {
            max_states: 1,
            ..Caps::default()
        };
        assert!(matches!(
            enumerate_abstractions(&distinct_labels(), WorldMode::Iso, &caps),
            Err(GeneralError::TooManyStates { states: 2, cap: 1 })
        ));
    }
}
