use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use super::{GeneralError, GeneralFrame};
use crate::bitset::BitSet;
use crate::ctl::Ctl;
use crate::modal::{extension, valuation_count, Modal};

/// Proposition name to set of block ids.
pub type AdmissibleValuation = BTreeMap<String, BTreeSet<usize>>;

fn world_sets(g: &GeneralFrame, v: &AdmissibleValuation) -> Result<BTreeMap<String, BitSet>, GeneralError> {
    v.iter()
        .map(|(p, bs)| {
            if let Some(b) = bs.iter().find(|b| **b >= g.num_blocks()) {
                return Err(GeneralError::UnknownBlock(*b));
            }
            let blocks = BitSet::from_indices(g.num_blocks(), bs.iter().copied());
            Ok((p.clone(), g.worlds_of_blocks(&blocks)))
        })
        .collect()
}

/// Truth of `f` at `world` under an admissible valuation.
pub fn eval_general(g: &GeneralFrame, v: &AdmissibleValuation, world: usize, f: &Modal) -> Result<bool, GeneralError> {
    if world >= g.len() {
        return Err(GeneralError::WorldIndex(world));
    }
    if let Some(p) = f.props().into_iter().find(|p| !v.contains_key(p)) {
        return Err(GeneralError::MissingProp(p));
    }
    Ok(extension(g.kripke(), &world_sets(g, v)?, f)?.contains(world))
}

/// A falsifying admissible valuation with its CTL realisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralWitness {
    pub valuation: AdmissibleValuation,
    pub world: usize,
    /// Worlds assigned to each proposition.
    pub world_sets: BTreeMap<String, BTreeSet<usize>>,
    /// A CTL formula per proposition whose extension is that world set.
    pub ctl: Option<BTreeMap<String, Ctl>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneralValidity {
    Valid,
    Falsified(Box<GeneralWitness>),
    Inconclusive { required: u128 },
}

impl GeneralValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, GeneralValidity::Valid)
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, GeneralValidity::Falsified(_))
    }

    pub fn witness(&self) -> Option<&GeneralWitness> {
        match self {
            GeneralValidity::Falsified(w) => Some(w),
            _ => None,
        }
    }
}

fn block_mask(m: u128, i: usize, nb: usize) -> BitSet {
    BitSet::from_indices(nb, (0..nb).filter(|b| (m >> (i * nb + b)) & 1 == 1))
}

/// Validity over all admissible valuations, at `at` or at every world.
///
/// Among falsifying valuations the one whose CTL realisation is smallest is
/// reported (ties go to enumeration order), so witnesses stay readable. The
/// witness is re-verified before it is returned.
pub fn valid_on_general(
    g: &GeneralFrame,
    f: &Modal,
    at: Option<usize>,
    budget: u128,
) -> Result<GeneralValidity, GeneralError> {
    if let Some(w) = at {
        if w >= g.len() {
            return Err(GeneralError::WorldIndex(w));
        }
    }
    let props: Vec<String> = f.props().into_iter().collect();
    let nb = g.num_blocks();
    let required = valuation_count(nb, props.len());
    if required > budget {
        return Ok(GeneralValidity::Inconclusive { required });
    }
    let total = required as u64;
    let n = g.len();
    let mut direct: HashMap<&BitSet, usize> = HashMap::new();
    for c in g.candidates() {
        let e = direct.entry(&c.blocks).or_insert(usize::MAX);
        *e = (*e).min(c.formula.size());
    }
    // mirrors GeneralFrame::express without building formulas
    let cost = |mask: &BitSet| {
        let via = mask
            .iter()
            .map(|b| g.block_formulas().get(&b).cloned())
            .collect::<Option<Vec<_>>>()
            .map_or(usize::MAX / 4, |parts| Ctl::disj(parts).size());
        direct.get(mask).copied().unwrap_or(usize::MAX / 4).min(via)
    };

    let best = (0..total)
        .into_par_iter()
        .filter_map(|m| {
            let m = m as u128;
            let v: BTreeMap<String, BitSet> = props
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), g.worlds_of_blocks(&block_mask(m, i, nb))))
                .collect();
            let ext = extension(g.kripke(), &v, f).expect("every proposition is valued");
            let fails = match at {
                Some(w) => !ext.contains(w),
                None => ext.count() < n,
            };
            fails.then(|| {
                let c: usize = (0..props.len()).map(|i| cost(&block_mask(m, i, nb))).sum();
                (c, m)
            })
        })
        .min();
    let Some((_, m)) = best else {
        return Ok(GeneralValidity::Valid);
    };

    let masks: Vec<BitSet> = (0..props.len()).map(|i| block_mask(m, i, nb)).collect();
    let v: BTreeMap<String, BitSet> =
        props.iter().zip(&masks).map(|(p, b)| (p.clone(), g.worlds_of_blocks(b))).collect();
    let ext = extension(g.kripke(), &v, f)?;
    let world = at.unwrap_or_else(|| (0..n).find(|w| !ext.contains(*w)).expect("falsified somewhere"));
    let ctl: Option<BTreeMap<String, Ctl>> = props
        .iter()
        .zip(&masks)
        .map(|(p, b)| g.express(b).map(|c| (p.clone(), c)))
        .collect();
    let witness = GeneralWitness {
        valuation: props.iter().zip(&masks).map(|(p, b)| (p.clone(), b.iter().collect())).collect(),
        world,
        world_sets: v.into_iter().map(|(p, s)| (p, s.iter().collect())).collect(),
        ctl,
    };
    verify_witness(g, f, &witness)?;
    Ok(GeneralValidity::Falsified(Box::new(witness)))
}

/// Re-checks a witness from scratch: each CTL formula is model-checked on
/// every world and must reproduce the claimed world set, and the modal
/// formula must be false at the claimed world.
pub fn verify_witness(g: &GeneralFrame, f: &Modal, w: &GeneralWitness) -> Result<(), GeneralError> {
    let fail = |msg: String| Err(GeneralError::WitnessFailed(msg));
    if w.world >= g.len() {
        return fail(format!("world index {} out of range", w.world));
    }
    for (p, blocks) in &w.valuation {
        let bs = BitSet::from_indices(g.num_blocks(), blocks.iter().copied());
        let claimed: BTreeSet<usize> = g.worlds_of_blocks(&bs).iter().collect();
        if w.world_sets.get(p) != Some(&claimed) {
            return fail(format!("world set of `{p}` does not match its blocks"));
        }
    }
    if let Some(ctl) = &w.ctl {
        for (p, phi) in ctl {
            let truth: BTreeSet<usize> = g.truth(phi)?.iter().collect();
            if w.world_sets.get(p) != Some(&truth) {
                return fail(format!("`{phi}` does not define the world set of `{p}`"));
            }
        }
    }
    let sets: BTreeMap<String, BitSet> = w
        .world_sets
        .iter()
        .map(|(p, s)| (p.clone(), BitSet::from_indices(g.len(), s.iter().copied())))
        .collect();
    if let Some(p) = f.props().into_iter().find(|p| !sets.contains_key(p)) {
        return fail(format!("no valuation for `{p}`"));
    }
    if extension(g.kripke(), &sets, f)?.contains(w.world) {
        return fail(format!("`{f}` holds at `{}`", g.world(w.world).id));
    }
    Ok(())
}
