use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{KripkeFrame, Modal, ModalError, Valuation};
use crate::bitset::BitSet;

pub const DEFAULT_VALUATION_BUDGET: u128 = 1 << 20;

/// Set of worlds where `f` holds, given each proposition's extension.
pub fn extension(frame: &KripkeFrame, v: &BTreeMap<String, BitSet>, f: &Modal) -> Result<BitSet, ModalError> {
    let n = frame.len();
    Ok(match f {
        Modal::True => BitSet::full(n),
        Modal::Prop(p) => v.get(p).cloned().ok_or_else(|| ModalError::MissingProp(p.clone()))?,
        Modal::Not(g) => extension(frame, v, g)?.complement(),
        Modal::And(a, b) => {
            let mut x = extension(frame, v, a)?;
            x.intersect_with(&extension(frame, v, b)?);
            x
        }
        Modal::Or(a, b) => {
            let mut x = extension(frame, v, a)?;
            x.union_with(&extension(frame, v, b)?);
            x
        }
        Modal::Implies(a, b) => {
            let mut x = extension(frame, v, a)?.complement();
            x.union_with(&extension(frame, v, b)?);
            x
        }
        Modal::Diamond(g) => {
            let x = extension(frame, v, g)?;
            BitSet::from_indices(n, (0..n).filter(|w| frame.successors(*w).intersects(&x)))
        }
        // □φ is ¬◇¬φ
        Modal::Box(g) => {
            let x = extension(frame, v, g)?.complement();
            BitSet::from_indices(n, (0..n).filter(|w| frame.successors(*w).intersects(&x))).complement()
        }
    })
}

fn to_bitsets(frame: &KripkeFrame, v: &Valuation) -> Result<BTreeMap<String, BitSet>, ModalError> {
    v.iter()
        .map(|(p, ws)| {
            if let Some(w) = ws.iter().find(|w| **w >= frame.len()) {
                return Err(ModalError::WorldIndex(*w));
            }
            Ok((p.clone(), BitSet::from_indices(frame.len(), ws.iter().copied())))
        })
        .collect()
}

/// Truth of `f` at `world` in the model `(frame, v)`.
pub fn eval_modal(frame: &KripkeFrame, v: &Valuation, world: usize, f: &Modal) -> Result<bool, ModalError> {
    if world >= frame.len() {
        return Err(ModalError::WorldIndex(world));
    }
    for p in f.props() {
        if !v.contains_key(&p) {
            return Err(ModalError::MissingProp(p));
        }
    }
    Ok(extension(frame, &to_bitsets(frame, v)?, f)?.contains(world))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Falsified { valuation: Valuation, world: usize },
    /// Exhaustive search would need `required` valuations, above the budget.
    Inconclusive { required: u128 },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, Validity::Falsified { .. })
    }
}

/// Number of valuations of `k` propositions over `n` points, saturating.
pub(crate) fn valuation_count(n: usize, k: usize) -> u128 {
    let bits = n * k;
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// Decodes the `m`-th valuation: proposition `i` owns bits `i*n .. (i+1)*n`.
pub(crate) fn decode(m: u128, n: usize, props: &[String]) -> BTreeMap<String, BitSet> {
    props
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let set = BitSet::from_indices(n, (0..n).filter(|w| (m >> (i * n + w)) & 1 == 1));
            (p.clone(), set)
        })
        .collect()
}

/// Exhaustive validity over all valuations of `f`'s propositions and all worlds.
///
/// The returned countermodel is the first in enumeration order, so results do
/// not depend on how the work is split across threads.
pub fn valid_on_frame(frame: &KripkeFrame, f: &Modal, budget: u128) -> Result<Validity, ModalError> {
    let props: Vec<String> = f.props().into_iter().collect();
    let n = frame.len();
    let required = valuation_count(n, props.len());
    if required > budget {
        return Ok(Validity::Inconclusive { required });
    }
    let total = required as u64;
    let failing = (0..total).into_par_iter().find_first(|m| {
        let v = decode(*m as u128, n, &props);
        extension(frame, &v, f).map(|x| x.count() < n).unwrap_or(true)
    });
    match failing {
        None => Ok(Validity::Valid),
        Some(m) => {
            let v = decode(m as u128, n, &props);
            let ext = extension(frame, &v, f)?;
            let world = (0..n).find(|w| !ext.contains(*w)).expect("falsified somewhere");
            let valuation = v.into_iter().map(|(p, s)| (p, s.iter().collect())).collect();
            Ok(Validity::Falsified { valuation, world })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::{axioms, parse_modal};
    use std::collections::BTreeSet;

    fn chain(n: usize) -> KripkeFrame {
        KripkeFrame::from_fn((0..n).map(|i| format!("w{i}")).collect(), |a, b| a <= b).unwrap()
    }

    #[test]
    fn two_chain_semantics() {
        let f = KripkeFrame::new(vec!["w0".into(), "w1".into()], [(0, 1)]).unwrap();
        let v = Valuation::from([("p".to_string(), BTreeSet::from([1]))]);
        assert!(eval_modal(&f, &v, 0, &parse_modal("<>p").unwrap()).unwrap());
        assert!(!eval_modal(&f, &v, 0, &parse_modal("p").unwrap()).unwrap());
        assert!(eval_modal(&f, &v, 1, &Modal::True).unwrap());
    }

    #[test]
    fn missing_prop_is_named() {
        let f = chain(2);
        let err = eval_modal(&f, &Valuation::new(), 0, &parse_modal("q").unwrap()).unwrap_err();
        assert!(matches!(err, ModalError::MissingProp(p) if p == "q"));
    }

    #[test]
    fn transitive_chain_validates_four() {
        assert!(valid_on_frame(&chain(3), &axioms::four(), DEFAULT_VALUATION_BUDGET)
            .unwrap()
            .is_valid());
    }

    #[test]
    fn budget_reports_required_size() {
        let out = valid_on_frame(&chain(3), &axioms::k(), 8).unwrap();
        assert_eq!(out, Validity::Inconclusive { required: 64 });
    }

    #[test]
    fn irreflexive_point_falsifies_t() {
        let f = KripkeFrame::new(vec!["x".into()], []).unwrap();
        match valid_on_frame(&f, &axioms::t(), 16).unwrap() {
            Validity::Falsified { valuation, world } => {
                assert_eq!(world, 0);
                assert_eq!(valuation["p"], BTreeSet::from([0]));
            }
            other => panic!("expected falsification, got {other:?}"),
        }
    }
}
