use std::collections::BTreeSet;

use super::{Ctl, CtlError, PathFormula};
use crate::ts::TransitionSystem;

/// States of a system satisfying a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatSet {
    pub formula: Ctl,
    pub states: BTreeSet<usize>,
    /// System-level truth: every initial state satisfies the formula.
    pub holds: bool,
}

impl SatSet {
    pub fn contains(&self, s: usize) -> bool {
        self.states.contains(&s)
    }
}

/// Explicit-state CTL model checking by fixpoint labelling on the normal form.
pub fn check_ctl(ts: &TransitionSystem, f: &Ctl) -> Result<SatSet, CtlError> {
    let v = sat_vector(ts, f)?;
    let states: BTreeSet<usize> = (0..v.len()).filter(|i| v[*i]).collect();
    let holds = ts.initial().iter().all(|i| v[*i]);
    Ok(SatSet {
        formula: f.clone(),
        states,
        holds,
    })
}

/// System-level satisfaction only.
pub fn holds(ts: &TransitionSystem, f: &Ctl) -> Result<bool, CtlError> {
    let v = sat_vector(ts, f)?;
    Ok(ts.initial().iter().all(|i| v[*i]))
}

/// Satisfaction as a boolean vector indexed by state.
pub fn sat_vector(ts: &TransitionSystem, f: &Ctl) -> Result<Vec<bool>, CtlError> {
    for a in f.atoms() {
        if !ts.ap().contains(&a) {
            return Err(CtlError::UnknownAtom(a));
        }
    }
    Ok(eval(ts, &f.normalize()))
}

fn eval(ts: &TransitionSystem, f: &Ctl) -> Vec<bool> {
    let n = ts.num_states();
    match f {
        Ctl::True => vec![true; n],
        Ctl::Atom(a) => (0..n).map(|s| ts.label(s).contains(a)).collect(),
        Ctl::Not(g) => eval(ts, g).into_iter().map(|b| !b).collect(),
        Ctl::And(a, b) => {
            let (x, y) = (eval(ts, a), eval(ts, b));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Ctl::Exists(p) => match p.as_ref() {
            PathFormula::Next(g) => {
                let x = eval(ts, g);
                (0..n).map(|s| ts.successors(s).iter().any(|t| x[*t])).collect()
            }
            PathFormula::Until(a, b) => exists_until(ts, &eval(ts, a), eval(ts, b)),
            _ => unreachable!("normal form has no F/G"),
        },
        Ctl::Forall(p) => match p.as_ref() {
            PathFormula::Next(g) => {
                let x = eval(ts, g);
                (0..n).map(|s| ts.successors(s).iter().all(|t| x[*t])).collect()
            }
            PathFormula::Until(a, b) => forall_until(ts, &eval(ts, a), eval(ts, b)),
            _ => unreachable!("normal form has no F/G"),
        },
        Ctl::Or(..) | Ctl::Implies(..) => unreachable!("normal form has no | or ->"),
    }
}

/// Least fixpoint `Z = b ∪ (a ∩ pre∃(Z))` by backward search.
fn exists_until(ts: &TransitionSystem, a: &[bool], mut z: Vec<bool>) -> Vec<bool> {
    let mut work: Vec<usize> = (0..z.len()).filter(|s| z[*s]).collect();
    while let Some(t) = work.pop() {
        for &s in ts.predecessors(t) {
            if !z[s] && a[s] {
                z[s] = true;
                work.push(s);
            }
        }
    }
    z
}

/// Least fixpoint `Z = b ∪ (a ∩ pre∀(Z))`, counting successors outside `Z`.
fn forall_until(ts: &TransitionSystem, a: &[bool], mut z: Vec<bool>) -> Vec<bool> {
    let mut missing: Vec<usize> = (0..z.len()).map(|s| ts.successors(s).len()).collect();
    let mut work: Vec<usize> = (0..z.len()).filter(|s| z[*s]).collect();
    while let Some(t) = work.pop() {
        for &s in ts.predecessors(t) {
            missing[s] -= 1;
            if missing[s] == 0 && !z[s] && a[s] {
                z[s] = true;
                work.push(s);
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_ctl;

    fn sys() -> TransitionSystem {
        // a -> b -> c -> c, a -> a
        TransitionSystem::builder()
            .state("a", ["p"])
            .state("b", ["p"])
            .state("c", ["q"])
            .initial("a")
            .edge("a", "a")
            .edge("a", "b")
            .edge("b", "c")
            .edge("c", "c")
            .build()
            .unwrap()
    }

    fn sat(f: &str) -> Vec<usize> {
        check_ctl(&sys(), &parse_ctl(f).unwrap()).unwrap().states.into_iter().collect()
    }

    #[test]
    fn basic_operators() {
        assert_eq!(sat("true"), vec![0, 1, 2]);
        assert_eq!(sat("EX q"), vec![1, 2]);
        assert_eq!(sat("AX q"), vec![1, 2]);
        assert_eq!(sat("EF q"), vec![0, 1, 2]);
        assert_eq!(sat("AF q"), vec![1, 2]);
        assert_eq!(sat("EG p"), vec![0]);
        assert_eq!(sat("AG p"), Vec::<usize>::new());
        assert_eq!(sat("E[p U q]"), vec![0, 1, 2]);
        assert_eq!(sat("A[p U q]"), vec![1, 2]);
        assert_eq!(sat("p -> EX p"), vec![0, 2]);
    }

    #[test]
    fn unknown_atoms_are_named() {
        let err = check_ctl(&sys(), &parse_ctl("EX r").unwrap()).unwrap_err();
        assert!(matches!(err, CtlError::UnknownAtom(ref a) if a == "r"));
    }

    #[test]
    fn system_level_truth_needs_all_initial_states() {
        let ts = TransitionSystem::builder()
            .state("a", ["p"])
            .state("b", Vec::<String>::new())
            .ap("p")
            .initial("a")
            .initial("b")
            .edge("a", "a")
            .edge("b", "b")
            .build()
            .unwrap();
        assert!(!holds(&ts, &Ctl::atom("p")).unwrap());
        assert!(!holds(&ts, &Ctl::not(Ctl::atom("p"))).unwrap());
    }
}
