use std::collections::{BTreeMap, HashSet};

use super::{AbstractionWitness, LabelSet, TransitionSystem, TsError};

/// A partition of `0..n`, kept in normal form: members sorted inside each
/// block, blocks ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, TsError> {
        let mut block_of = vec![usize::MAX; n];
        for (b, members) in blocks.iter().enumerate() {
            if members.is_empty() {
                return Err(TsError::BadPartition("empty block".into()));
            }
            for &s in members {
                if s >= n {
                    return Err(TsError::StateIndex(s));
                }
                if block_of[s] != usize::MAX {
                    return Err(TsError::BadPartition(format!("state index {s} in two blocks")));
                }
                block_of[s] = b;
            }
        }
        if let Some(s) = block_of.iter().position(|b| *b == usize::MAX) {
            return Err(TsError::BadPartition(format!("state index {s} uncovered")));
        }
        Ok(Self::from_block_ids(&block_of))
    }

    /// Builds the partition whose blocks are the fibres of `ids`.
    pub fn from_block_ids(ids: &[usize]) -> Self {
        let mut rename = BTreeMap::new();
        let mut block_of = Vec::with_capacity(ids.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (s, id) in ids.iter().enumerate() {
            let next = rename.len();
            let b = *rename.entry(*id).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(s);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_block_ids(&(0..n).collect::<Vec<_>>())
    }

    /// Blocks of states with equal labels.
    pub fn by_labels(ts: &TransitionSystem) -> Self {
        let mut ids: BTreeMap<&LabelSet, usize> = BTreeMap::new();
        let v: Vec<usize> = (0..ts.num_states())
            .map(|i| {
                let next = ids.len();
                *ids.entry(ts.label(i)).or_insert(next)
            })
            .collect();
        Self::from_block_ids(&v)
    }

    /// Resolves a partition given by state names.
    pub fn from_names(ts: &TransitionSystem, blocks: &[Vec<String>]) -> Result<Self, TsError> {
        let idx = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|s| ts.state_index(s).ok_or_else(|| TsError::UnknownState(s.clone())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ts.num_states(), idx)
    }

    pub fn to_names(&self, ts: &TransitionSystem) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|s| ts.state_name(*s).to_string()).collect())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.block_of[s]
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_of
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.len() == coarser.len()
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|s| coarser.block_of[*s] == coarser.block_of[b[0]]))
    }

    /// First block whose members carry different labels, if any.
    pub fn first_mixed_block(&self, ts: &TransitionSystem) -> Option<&[usize]> {
        self.blocks
            .iter()
            .find(|b| b.iter().any(|s| ts.label(*s) != ts.label(b[0])))
            .map(Vec::as_slice)
    }
}

fn block_name(ts: &TransitionSystem, members: &[usize]) -> String {
    members.iter().map(|s| ts.state_name(*s)).collect::<Vec<_>>().join("+")
}

/// Quotient of `ts` by a label-uniform partition, with the canonical projection.
pub fn quotient(ts: &TransitionSystem, p: &Partition) -> Result<(TransitionSystem, AbstractionWitness), TsError> {
    if p.len() != ts.num_states() {
        return Err(TsError::BadPartition(format!(
            "partition covers {} states, system has {}",
            p.len(),
            ts.num_states()
        )));
    }
    if let Some(b) = p.first_mixed_block(ts) {
        return Err(TsError::NotLabelUniform(
            b.iter().map(|s| ts.state_name(*s).to_string()).collect(),
        ));
    }
    let mut names: Vec<String> = p.blocks().iter().map(|b| block_name(ts, b)).collect();
    let mut seen = HashSet::new();
    let clash = names.iter().any(|n| !seen.insert(n.clone()));
    if clash {
        names = (0..p.num_blocks()).map(|i| format!("[{i}]")).collect();
    }
    let labels = p.blocks().iter().map(|b| ts.label(b[0]).clone()).collect();
    let initial: Vec<usize> = ts.initial().iter().map(|s| p.block_of(*s)).collect();
    let edges: Vec<(usize, usize)> = ts.transitions().map(|(a, b)| (p.block_of(a), p.block_of(b))).collect();
    let q = TransitionSystem::from_parts(names, initial, ts.ap().clone(), labels, edges)?;
    let w = AbstractionWitness {
        fine: ts.clone(),
        coarse: q.clone(),
        map: p.block_ids().to_vec(),
    };
    Ok((q, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_is_independent_of_input_order() {
        let a = Partition::new(4, vec![vec![3, 1], vec![0], vec![2]]).unwrap();
        let b = Partition::new(4, vec![vec![2], vec![0], vec![1, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks(), &[vec![0], vec![1, 3], vec![2]]);
    }

    #[test]
    fn malformed_partitions_rejected() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0], vec![], vec![1]]).is_err());
    }

    #[test]
    fn refinement_order() {
        let fine = Partition::from_block_ids(&[0, 1, 2, 2]);
        let coarse = Partition::from_block_ids(&[0, 0, 1, 1]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(fine.refines(&fine));
        assert!(Partition::discrete(4).refines(&coarse));
    }

    #[test]
    fn quotient_rejects_mixed_blocks() {
        let ts = TransitionSystem::builder()
            .state("x", ["p"])
            .state("y", ["q"])
            .initial("x")
            .edge("x", "y")
            .edge("y", "y")
            .build()
            .unwrap();
        let err = quotient(&ts, &Partition::from_block_ids(&[0, 0])).unwrap_err();
        assert!(matches!(err, TsError::NotLabelUniform(ref b) if b == &["x", "y"]));
    }
}
