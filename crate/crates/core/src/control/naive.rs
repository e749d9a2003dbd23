//! Second code path for the control checks: materialise the valuation of
//! each statement as a set of blocks and evaluate the defining modal
//! formulas with [`eval_general`].

use super::{Checker, ControlError, ControlKind, IndependenceKind};
use crate::bitset::BitSet;
use crate::ctl::Ctl;
use crate::general::{eval_general, AdmissibleValuation, GeneralError, GeneralFrame};
use crate::modal::{parse_modal, Modal};

fn valuation(g: &GeneralFrame, props: &[(&str, &Ctl)]) -> Result<AdmissibleValuation, ControlError> {
    props
        .iter()
        .map(|(p, f)| {
            let blocks = g
                .blocks_of_worlds(&g.truth(f)?)
                .ok_or_else(|| GeneralError::Internal(format!("`{f}` is not a union of blocks")))?;
            Ok((p.to_string(), blocks.iter().collect()))
        })
        .collect()
}

fn modal(text: &str) -> Modal {
    parse_modal(text).expect("fixed modal formula")
}

fn all_at(g: &GeneralFrame, v: &AdmissibleValuation, worlds: &BitSet, f: &str) -> Result<bool, ControlError> {
    let f = modal(f);
    for w in worlds.iter() {
        if !eval_general(g, v, w, &f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verdict of `kind` for `f` (and `partner`) recomputed from the modal
/// definitions, with the outer box ranging over the checker's range.
pub fn naive_verdict(ch: &Checker, kind: ControlKind, f: &Ctl, partner: Option<&Ctl>) -> Result<bool, ControlError> {
    let g = ch.frame();
    let c = ch.anchor();
    let range = ch.range();
    let at_c = BitSet::from_indices(g.len(), [c]);
    let need = || ControlError::Arity(format!("{kind} needs a second formula"));
    Ok(match kind {
        ControlKind::PureButton => {
            let v = valuation(g, &[("b", f)])?;
            all_at(g, &v, range, "(b -> []b) & <>b")?
        }
        ControlKind::PureWeakButton => {
            let v = valuation(g, &[("b", f)])?;
            all_at(g, &v, range, "b -> []b")? && all_at(g, &v, &at_c, "<>b")?
        }
        ControlKind::Switch => {
            let v = valuation(g, &[("s", f)])?;
            all_at(g, &v, range, "<>s & <>!s")?
        }
        ControlKind::RestrictedSwitch => {
            let v = valuation(g, &[("s", f), ("B", partner.ok_or_else(need)?)])?;
            all_at(g, &v, range, "!B -> (<>(s & !B) & <>(!s & !B))")?
        }
        ControlKind::Decision => {
            let r = partner.ok_or_else(need)?;
            let either = Ctl::or(f.clone(), r.clone());
            let v = valuation(g, &[("l", f), ("r", r), ("u", &either)])?;
            all_at(g, &v, range, "(l -> []l) & (r -> []r) & (u -> []u) & <>u & !(l & r)")?
                && all_at(g, &v, range, "(<>l & <>r) | l | r")?
                && all_at(g, &v, &at_c, "<>l & <>r & !l & !r")?
        }
    })
}

fn literal(p: String, on: bool) -> Modal {
    if on {
        Modal::prop(p)
    } else {
        Modal::not(Modal::prop(p))
    }
}

fn pattern(names: &[String], bits: &[bool], extra: Option<Modal>) -> Modal {
    let mut parts: Vec<Modal> = names.iter().zip(bits).map(|(p, on)| literal(p.clone(), *on)).collect();
    parts.extend(extra);
    parts.into_iter().reduce(Modal::and).unwrap_or(Modal::True)
}

/// Independence schema of `kind` evaluated pattern pair by pattern pair with
/// [`eval_general`]. `first` are buttons (or left halves), `second` switches
/// (or right halves). Only the schema is checked, not the family
/// preconditions. Exponential in the family size; meant for cross-checks.
pub fn naive_independence(
    ch: &Checker,
    kind: IndependenceKind,
    first: &[Ctl],
    second: &[Ctl],
    restrictor: Option<&Ctl>,
) -> Result<bool, ControlError> {
    let g = ch.frame();
    let (n, m) = (first.len(), second.len());
    let mut props: Vec<(String, &Ctl)> = first.iter().enumerate().map(|(i, f)| (format!("x{i}"), f)).collect();
    props.extend(second.iter().enumerate().map(|(j, f)| (format!("y{j}"), f)));
    if let Some(b) = restrictor {
        props.push(("B".to_string(), b));
    }
    let named: Vec<(&str, &Ctl)> = props.iter().map(|(p, f)| (p.as_str(), *f)).collect();
    let v = valuation(g, &named)?;
    let names: Vec<String> = props.iter().take(n + m).map(|(p, _)| p.clone()).collect();
    let guard = (kind == IndependenceKind::Until).then(|| Modal::not(Modal::prop("B")));
    let bits = |i: u32, j: u32| -> Vec<bool> {
        (0..n).map(|k| i >> k & 1 == 1).chain((0..m).map(|k| j >> k & 1 == 1)).collect()
    };
    for i0 in 0u32..1 << n {
        for j0 in 0u32..1 << m {
            for i1 in (0u32..1 << n).filter(|i1| i1 & i0 == i0) {
                for j1 in 0u32..1 << m {
                    if kind == IndependenceKind::Decision && (j1 & j0 != j0 || j1 & i1 != 0) {
                        continue;
                    }
                    let src = pattern(&names, &bits(i0, j0), guard.clone());
                    let tgt = pattern(&names, &bits(i1, j1), guard.clone());
                    let f = Modal::implies(src, Modal::diamond(tgt));
                    for w in ch.range().iter() {
                        if !eval_general(g, &v, w, &f)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::is_pure_button;
    use crate::corpus::{beta, button_lattice, pruned_subframe};
    use crate::general::Caps;

    #[test]
    fn agrees_on_buttons_and_decisions() {
        let g = button_lattice(2, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let ch = Checker::new(&g, c).unwrap();
        for f in [beta(1), beta(2), beta(1).negate(), Ctl::True, Ctl::falsum()] {
            for kind in [ControlKind::PureButton, ControlKind::PureWeakButton, ControlKind::Switch] {
                let fast = ch.check(kind, &f, None).unwrap().verdict;
                assert_eq!(fast, naive_verdict(&ch, kind, &f, None).unwrap(), "{kind} {f}");
            }
        }
        assert!(is_pure_button(&g, c, &beta(1)).unwrap().verdict);
        assert!(naive_independence(&ch, IndependenceKind::Plain, &[beta(1), beta(2)], &[], None).unwrap());
        assert!(!naive_independence(&ch, IndependenceKind::Plain, &[beta(1), beta(1)], &[], None).unwrap());

        let d = pruned_subframe(2, &Caps::default()).unwrap();
        let ch = Checker::new(&d.frame, d.frame.root().unwrap()).unwrap();
        let (l, r): (Vec<Ctl>, Vec<Ctl>) = d.decisions.iter().cloned().unzip();
        assert!(naive_independence(&ch, IndependenceKind::Decision, &l, &r, None).unwrap());
        for (l, r) in &d.decisions {
            assert!(naive_verdict(&ch, ControlKind::Decision, l, Some(r)).unwrap());
            assert!(!naive_verdict(&ch, ControlKind::Decision, l, Some(l)).unwrap());
        }
    }
}
