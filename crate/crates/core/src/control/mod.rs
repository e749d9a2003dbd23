//! Control statements on a finite general frame: buttons, switches,
//! restricted switches, decisions, and the independence schemas tying
//! families of them together.
//!
//! Every check is relative to the given frame. A scope may narrow the worlds
//! at which the outer box is checked; inner modalities still range over all
//! accessible worlds, so a scoped verdict is a statement about the full frame
//! restricted to starting points in the scope.

mod independence;
mod naive;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use independence::{
    check_decision_independence, check_independence, check_independence_until, IndependenceKind,
    IndependenceReport, PatternFailure,
};
pub use naive::{naive_independence, naive_verdict};

use crate::bitset::BitSet;
use crate::ctl::{holds, Ctl};
use crate::general::{GeneralError, GeneralFrame};

#[derive(Debug, Error)]
pub enum ControlError {
    #[error(transparent)]
    General(#[from] GeneralError),
    #[error("world index {0} out of range")]
    WorldIndex(usize),
    #[error("unknown control kind `{0}`")]
    UnknownKind(String),
    #[error("{0}")]
    Arity(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    PureButton,
    PureWeakButton,
    Switch,
    RestrictedSwitch,
    Decision,
}

impl FromStr for ControlKind {
    type Err = ControlError;

    fn from_str(s: &str) -> Result<Self, ControlError> {
        Ok(match s.replace('-', "_").as_str() {
            "pure_button" | "button" => ControlKind::PureButton,
            "pure_weak_button" | "weak_button" => ControlKind::PureWeakButton,
            "switch" => ControlKind::Switch,
            "restricted_switch" => ControlKind::RestrictedSwitch,
            "decision" => ControlKind::Decision,
            _ => return Err(ControlError::UnknownKind(s.to_string())),
        })
    }
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlKind::PureButton => "pure button",
            ControlKind::PureWeakButton => "pure weak button",
            ControlKind::Switch => "switch",
            ControlKind::RestrictedSwitch => "restricted switch",
            ControlKind::Decision => "decision",
        })
    }
}

/// The clause that failed and the worlds that witness the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub clause: String,
    #[serde(skip)]
    pub worlds: Vec<usize>,
    #[serde(rename = "worlds")]
    pub world_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlReport {
    pub kind: ControlKind,
    pub world: String,
    pub verdict: bool,
    /// Whether the statement (for decisions, `l | r`) is already true at the world.
    pub pushed: bool,
    pub counterexample: Option<Counterexample>,
    /// Check of the restrictor as a pure button, for restricted switches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restrictor: Option<Box<ControlReport>>,
}

impl fmt::Display for ControlReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = if self.pushed { "pushed" } else { "unpushed" };
        if self.verdict {
            write!(f, "{} at {}: yes ({state})", self.kind, self.world)?;
        } else {
            write!(f, "{} at {}: no", self.kind, self.world)?;
            if let Some(c) = &self.counterexample {
                write!(f, "; {} fails at {}", c.clause, c.world_ids.join(" -> "))?;
            }
        }
        if let Some(r) = &self.restrictor {
            if !r.verdict {
                write!(f, "\n  warning: restrictor is not a pure button: {r}")?;
            }
        }
        Ok(())
    }
}

/// Per world, the system-level truth of each formula of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthVector {
    formulas: Vec<Ctl>,
    columns: Vec<BitSet>,
    worlds: usize,
}

impl TruthVector {
    pub fn compute(g: &GeneralFrame, formulas: &[Ctl]) -> Result<Self, ControlError> {
        let columns = formulas.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?;
        Ok(TruthVector {
            formulas: formulas.to_vec(),
            columns,
            worlds: g.len(),
        })
    }

    pub fn formulas(&self) -> &[Ctl] {
        &self.formulas
    }

    pub fn get(&self, world: usize, i: usize) -> bool {
        self.columns[i].contains(world)
    }

    /// Worlds where formula `i` holds.
    pub fn column(&self, i: usize) -> &BitSet {
        &self.columns[i]
    }

    /// Bit `i` set iff formula `i` holds at `world`.
    pub fn row(&self, world: usize) -> BitSet {
        BitSet::from_indices(self.formulas.len(), (0..self.formulas.len()).filter(|i| self.get(world, *i)))
    }

    /// Recomputes every entry by model checking each world's system directly.
    pub fn cross_check(&self, g: &GeneralFrame) -> Result<bool, ControlError> {
        for w in 0..self.worlds {
            for (i, f) in self.formulas.iter().enumerate() {
                let direct = holds(&g.world(w).system, f).map_err(GeneralError::from)?;
                if direct != self.get(w, i) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A frame, an anchor world `c`, and the worlds at which boxed clauses are checked.
#[derive(Debug, Clone)]
pub struct Checker<'a> {
    g: &'a GeneralFrame,
    c: usize,
    range: BitSet,
}

impl<'a> Checker<'a> {
    pub fn new(g: &'a GeneralFrame, c: usize) -> Result<Self, ControlError> {
        if c >= g.len() {
            return Err(ControlError::WorldIndex(c));
        }
        Ok(Checker {
            g,
            c,
            range: g.upset(c).clone(),
        })
    }

    /// Narrows the boxed clauses to worlds in `scope`.
    pub fn within(mut self, scope: &[usize]) -> Result<Self, ControlError> {
        if let Some(w) = scope.iter().find(|w| **w >= self.g.len()) {
            return Err(ControlError::WorldIndex(*w));
        }
        self.range.intersect_with(&BitSet::from_indices(self.g.len(), scope.iter().copied()));
        Ok(self)
    }

    pub fn frame(&self) -> &GeneralFrame {
        self.g
    }

    pub fn anchor(&self) -> usize {
        self.c
    }

    /// Worlds at which boxed clauses are checked.
    pub fn range(&self) -> &BitSet {
        &self.range
    }

    fn counterexample(&self, clause: &str, worlds: Vec<usize>) -> Counterexample {
        Counterexample {
            clause: clause.to_string(),
            world_ids: worlds.iter().map(|w| self.g.world(*w).id.clone()).collect(),
            worlds,
        }
    }

    fn report(&self, kind: ControlKind, pushed: bool, cex: Option<Counterexample>) -> ControlReport {
        ControlReport {
            kind,
            world: self.g.world(self.c).id.clone(),
            verdict: cex.is_none(),
            pushed,
            counterexample: cex,
            restrictor: None,
        }
    }

    /// First `(d, e)` with `d` in range, `d ⊨ t`, `e ≥ d`, `e ⊭ t`.
    fn persistence(&self, t: &BitSet) -> Option<Vec<usize>> {
        self.range
            .iter()
            .filter(|d| t.contains(*d))
            .find_map(|d| self.g.upset(d).iter().find(|e| !t.contains(*e)).map(|e| vec![d, e]))
    }

    /// First `d` in range with no `e ≥ d` in `t`.
    fn unreachable(&self, t: &BitSet) -> Option<usize> {
        self.range.iter().find(|d| !self.g.upset(*d).intersects(t))
    }

    fn reaches(&self, d: usize, t: &BitSet) -> bool {
        self.g.upset(d).intersects(t)
    }

    fn button_truth(&self, kind: ControlKind, t: &BitSet) -> ControlReport {
        let pushed = t.contains(self.c);
        let cex = if let Some(pair) = self.persistence(t) {
            Some(self.counterexample("[](b -> []b)", pair))
        } else if kind == ControlKind::PureButton {
            self.unreachable(t).map(|d| self.counterexample("[]<>b", vec![d]))
        } else if !self.reaches(self.c, t) {
            Some(self.counterexample("<>b", vec![self.c]))
        } else {
            None
        };
        self.report(kind, pushed, cex)
    }

    /// `[](b -> []b) & []<>b` with `b` the worlds satisfying `beta`.
    pub fn pure_button(&self, beta: &Ctl) -> Result<ControlReport, ControlError> {
        Ok(self.button_truth(ControlKind::PureButton, &self.g.truth(beta)?))
    }

    /// `[](b -> []b) & <>b`.
    pub fn pure_weak_button(&self, lambda: &Ctl) -> Result<ControlReport, ControlError> {
        Ok(self.button_truth(ControlKind::PureWeakButton, &self.g.truth(lambda)?))
    }

    /// `[](<>s & <>!s)`.
    pub fn switch(&self, sigma: &Ctl) -> Result<ControlReport, ControlError> {
        let t = self.g.truth(sigma)?;
        let cex = if let Some(d) = self.unreachable(&t) {
            Some(self.counterexample("[]<>s", vec![d]))
        } else {
            self.unreachable(&t.complement()).map(|d| self.counterexample("[]<>!s", vec![d]))
        };
        Ok(self.report(ControlKind::Switch, t.contains(self.c), cex))
    }

    /// `[](!B -> (<>(s & !B) & <>(!s & !B)))`; the restrictor's own pure
    /// button check is attached to the report.
    pub fn restricted_switch(&self, sigma: &Ctl, restrictor: &Ctl) -> Result<ControlReport, ControlError> {
        let t = self.g.truth(sigma)?;
        let off_b = self.g.truth(restrictor)?.complement();
        let mut on = t.clone();
        on.intersect_with(&off_b);
        let mut off = t.complement();
        off.intersect_with(&off_b);
        let free: Vec<usize> = self.range.iter().filter(|d| off_b.contains(*d)).collect();
        let cex = if let Some(d) = free.iter().find(|d| !self.reaches(**d, &on)) {
            Some(self.counterexample("[](!B -> <>(s & !B))", vec![*d]))
        } else {
            free.iter()
                .find(|d| !self.reaches(**d, &off))
                .map(|d| self.counterexample("[](!B -> <>(!s & !B))", vec![*d]))
        };
        let mut r = self.report(ControlKind::RestrictedSwitch, t.contains(self.c), cex);
        r.restrictor = Some(Box::new(self.pure_button(restrictor)?));
        Ok(r)
    }

    /// `(l, r)` are unpushed pure weak buttons, `[](!l | !r)`,
    /// `[]((<>l & <>r) | l | r)`, and `l | r` is a pure button. Clauses are
    /// tried in that order and the first failure is reported.
    pub fn decision(&self, lambda: &Ctl, delta: &Ctl) -> Result<ControlReport, ControlError> {
        let tl = self.g.truth(lambda)?;
        let td = self.g.truth(delta)?;
        let mut either = tl.clone();
        either.union_with(&td);
        let pushed = either.contains(self.c);
        let sub = |t: &BitSet, name: &str, kind: ControlKind| {
            self.button_truth(kind, t).counterexample.map(|mut c| {
                c.clause = format!("{name}: {}", c.clause);
                c
            })
        };
        let cex = sub(&tl, "l", ControlKind::PureWeakButton)
            .or_else(|| sub(&td, "r", ControlKind::PureWeakButton))
            .or_else(|| tl.contains(self.c).then(|| self.counterexample("l unpushed", vec![self.c])))
            .or_else(|| td.contains(self.c).then(|| self.counterexample("r unpushed", vec![self.c])))
            .or_else(|| {
                self.range
                    .iter()
                    .find(|d| tl.contains(*d) && td.contains(*d))
                    .map(|d| self.counterexample("[](!l | !r)", vec![d]))
            })
            .or_else(|| {
                self.range
                    .iter()
                    .find(|d| !either.contains(*d) && !(self.reaches(*d, &tl) && self.reaches(*d, &td)))
                    .map(|d| self.counterexample("[]((<>l & <>r) | l | r)", vec![d]))
            })
            .or_else(|| sub(&either, "l | r", ControlKind::PureButton));
        Ok(self.report(ControlKind::Decision, pushed, cex))
    }

    /// Dispatches on `kind`. `partner` is the restrictor for restricted
    /// switches and the right half for decisions.
    pub fn check(&self, kind: ControlKind, f: &Ctl, partner: Option<&Ctl>) -> Result<ControlReport, ControlError> {
        let need = |what: &str| ControlError::Arity(format!("{kind} needs a {what}"));
        match kind {
            ControlKind::PureButton => self.pure_button(f),
            ControlKind::PureWeakButton => self.pure_weak_button(f),
            ControlKind::Switch => self.switch(f),
            ControlKind::RestrictedSwitch => self.restricted_switch(f, partner.ok_or_else(|| need("restrictor"))?),
            ControlKind::Decision => self.decision(f, partner.ok_or_else(|| need("partner"))?),
        }
    }
}

pub fn is_pure_button(g: &GeneralFrame, c: usize, beta: &Ctl) -> Result<ControlReport, ControlError> {
    Checker::new(g, c)?.pure_button(beta)
}

pub fn is_pure_weak_button(g: &GeneralFrame, c: usize, lambda: &Ctl) -> Result<ControlReport, ControlError> {
    Checker::new(g, c)?.pure_weak_button(lambda)
}

pub fn is_switch(g: &GeneralFrame, c: usize, sigma: &Ctl) -> Result<ControlReport, ControlError> {
    Checker::new(g, c)?.switch(sigma)
}

pub fn is_restricted_switch(
    g: &GeneralFrame,
    c: usize,
    sigma: &Ctl,
    restrictor: &Ctl,
) -> Result<ControlReport, ControlError> {
    Checker::new(g, c)?.restricted_switch(sigma, restrictor)
}

pub fn is_decision(g: &GeneralFrame, c: usize, lambda: &Ctl, delta: &Ctl) -> Result<ControlReport, ControlError> {
    Checker::new(g, c)?.decision(lambda, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, beta, switch_frame, switch_scope};
    use crate::general::Caps;

    fn lattice(n: usize) -> GeneralFrame {
        corpus::button_lattice(n, &Caps::default()).unwrap()
    }

    #[test]
    fn buttons_on_the_button_lattice() {
        let g = lattice(2);
        let c = g.root().unwrap();
        for i in 1..=2 {
            let r = is_pure_button(&g, c, &beta(i)).unwrap();
            assert!(r.verdict && !r.pushed, "{r}");
            assert!(is_pure_weak_button(&g, c, &beta(i)).unwrap().verdict);
            let s = is_switch(&g, c, &beta(i)).unwrap();
            assert!(!s.verdict);
            assert_eq!(s.counterexample.unwrap().clause, "[]<>!s");
        }
        let top = is_pure_button(&g, c, &Ctl::True).unwrap();
        assert!(top.verdict && top.pushed);
        assert!(!is_pure_weak_button(&g, c, &Ctl::falsum()).unwrap().verdict);
        assert!(!is_switch(&g, c, &Ctl::True).unwrap().verdict);
    }

    #[test]
    fn negated_button_is_not_persistent() {
        let g = lattice(1);
        let c = g.root().unwrap();
        let r = is_pure_button(&g, c, &beta(1).negate()).unwrap();
        let cex = r.counterexample.unwrap();
        assert_eq!(cex.clause, "[](b -> []b)");
        assert_eq!(cex.world_ids, ["{}", "{1}"]);
    }

    #[test]
    fn restricted_switch_without_restrictor_is_a_switch() {
        let g = switch_frame(2, 2, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let scope = switch_scope(&g, 2, 2).unwrap();
        let sigma = corpus::switch();
        let plain = is_switch(&g, c, &sigma).unwrap();
        assert!(!plain.verdict);
        let scoped = Checker::new(&g, c).unwrap().within(&scope).unwrap();
        assert!(scoped.switch(&sigma).unwrap().verdict);
        let r = scoped.restricted_switch(&sigma, &Ctl::falsum()).unwrap();
        assert!(r.verdict);
        assert!(!r.restrictor.unwrap().verdict);
    }

    #[test]
    fn decisions_on_the_pruned_frame() {
        let d = corpus::pruned_subframe(1, &Caps::default()).unwrap();
        let g = &d.frame;
        let c = g.root().unwrap();
        let (l, r) = &d.decisions[0];
        assert!(is_pure_weak_button(g, c, l).unwrap().verdict);
        assert!(!is_pure_button(g, c, l).unwrap().verdict);
        assert!(is_decision(g, c, l, r).unwrap().verdict);
        let same = is_decision(g, c, l, l).unwrap();
        assert_eq!(same.counterexample.unwrap().clause, "[](!l | !r)");
        let trivial = is_decision(g, c, &Ctl::True, &Ctl::falsum()).unwrap();
        assert!(!trivial.verdict);
    }

    #[test]
    fn truth_vector_matches_direct_checks() {
        let g = lattice(2);
        let tv = TruthVector::compute(&g, &[beta(1), beta(2)]).unwrap();
        assert!(tv.cross_check(&g).unwrap());
        let c = g.root().unwrap();
        assert_eq!(tv.row(c).count(), 0);
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("pure-weak-button".parse::<ControlKind>().unwrap(), ControlKind::PureWeakButton);
        assert!("lever".parse::<ControlKind>().is_err());
    }
}
