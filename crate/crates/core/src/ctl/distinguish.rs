use std::collections::{BTreeSet, HashMap};

use super::{Ctl, CtlError};
use crate::ts::BisimPartition;

/// A formula true at union state `s` and false at union state `t`.
///
/// Built from the split history: a label difference yields an atom literal;
/// a split by successor blocks yields `EX(⋀ ...)` over the side that reaches
/// the extra block, negated when that side is `t`.
pub fn distinguishing_formula(bp: &BisimPartition, s: usize, t: usize) -> Result<Ctl, CtlError> {
    if bp.bisimilar(s, t) {
        return Err(CtlError::Bisimilar { s, t });
    }
    let mut memo = HashMap::new();
    Ok(build(bp, s, t, &mut memo))
}

fn build(bp: &BisimPartition, s: usize, t: usize, memo: &mut HashMap<(usize, usize), Ctl>) -> Ctl {
    if let Some(f) = memo.get(&(s, t)) {
        return f.clone();
    }
    let r = bp.split_round(s, t).expect("states are not bisimilar");
    let f = if r == 0 {
        let (ls, lt) = (bp.label(s), bp.label(t));
        match ls.difference(lt).next() {
            Some(p) => Ctl::atom(p.clone()),
            None => Ctl::not(Ctl::atom(lt.difference(ls).next().expect("labels differ").clone())),
        }
    } else {
        let prev = r - 1;
        let blocks = |x: usize| -> BTreeSet<usize> {
            bp.successors(x).iter().map(|y| bp.round_block(prev, *y)).collect()
        };
        let (bs, bt) = (blocks(s), blocks(t));
        // some successor of one side sits in a round-(r-1) block the other side misses
        let extra_s = bp.successors(s).iter().find(|y| !bt.contains(&bp.round_block(prev, **y)));
        match extra_s {
            Some(&y) => Ctl::ex(separate_from_all(bp, y, bp.successors(t), memo)),
            None => {
                let y = *bp
                    .successors(t)
                    .iter()
                    .find(|y| !bs.contains(&bp.round_block(prev, **y)))
                    .expect("successor block sets differ");
                Ctl::not(Ctl::ex(separate_from_all(bp, y, bp.successors(s), memo)))
            }
        }
    };
    memo.insert((s, t), f.clone());
    f
}

/// Conjunction of separators of `y` from each of `others`; true at `y`, false at all of them.
fn separate_from_all(
    bp: &BisimPartition,
    y: usize,
    others: &[usize],
    memo: &mut HashMap<(usize, usize), Ctl>,
) -> Ctl {
    let parts: BTreeSet<Ctl> = others.iter().map(|z| build(bp, y, *z, memo)).collect();
    Ctl::conj(parts)
}
