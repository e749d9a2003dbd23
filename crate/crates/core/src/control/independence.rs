use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::{Checker, ControlError, ControlReport};
use crate::bitset::BitSet;
use crate::ctl::Ctl;
use crate::general::GeneralFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependenceKind {
    /// Pure buttons and switches.
    Plain,
    /// Pure buttons and restricted switches, while the restrictor is off.
    Until,
    /// Decisions.
    Decision,
}

/// A reachable truth pattern `(I₀, J₀)` at `world` from which the target
/// pattern `(I₁, J₁)` cannot be reached. For decisions `I` and `J` are the
/// decided-left and decided-right index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternFailure {
    pub from: (Vec<usize>, Vec<usize>),
    pub to: (Vec<usize>, Vec<usize>),
    pub world: String,
    #[serde(skip)]
    pub world_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub kind: IndependenceKind,
    pub world: String,
    pub verdict: bool,
    /// Checks of the individual statements (buttons unpushed, switches, ...).
    pub families: Vec<ControlReport>,
    /// Number of leading entries of `families` that must also be unpushed.
    #[serde(skip)]
    pub unpushed: usize,
    pub failure: Option<PatternFailure>,
    /// Set when the pattern space exceeded the budget; no verdict then.
    pub inconclusive: Option<u128>,
}

impl IndependenceReport {
    pub fn is_inconclusive(&self) -> bool {
        self.inconclusive.is_some()
    }

    pub fn families_ok(&self) -> bool {
        self.families.iter().enumerate().all(|(i, r)| r.verdict && (i >= self.unpushed || !r.pushed))
    }
}

fn set(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn fmt_set(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
}

impl fmt::Display for IndependenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            IndependenceKind::Plain => "independent",
            IndependenceKind::Until => "independent until B",
            IndependenceKind::Decision => "independent decisions",
        };
        if let Some(required) = self.inconclusive {
            return write!(f, "{kind} at {}: inconclusive ({required} pattern pairs exceed the budget)", self.world);
        }
        write!(f, "{kind} at {}: {}", self.world, if self.verdict { "yes" } else { "no" })?;
        for (_, r) in self.families.iter().enumerate().filter(|(i, r)| !r.verdict || (*i < self.unpushed && r.pushed)) {
            write!(f, "\n  {r}")?;
        }
        if let Some(p) = &self.failure {
            write!(
                f,
                "\n  from ({}, {}) at {} the pattern ({}, {}) is unreachable",
                fmt_set(&p.from.0),
                fmt_set(&p.from.1),
                p.world,
                fmt_set(&p.to.0),
                fmt_set(&p.to.1)
            )?;
        }
        Ok(())
    }
}

type Pattern = (u32, u32);

fn supersets(base: u32, bits: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << bits).filter(move |x| x & base == base)
}

/// First `(source, target, world)` in pattern order where `world` has the
/// source pattern but no accessible eligible world has the target.
fn first_failure(
    ch: &Checker,
    patterns: &[Pattern],
    eligible: &BitSet,
    targets: impl Fn(Pattern) -> Vec<Pattern>,
) -> Option<(Pattern, Pattern, usize)> {
    let g = ch.frame();
    let sources: Vec<usize> = ch.range().iter().filter(|d| eligible.contains(*d)).collect();
    let reach: BTreeMap<usize, HashSet<Pattern>> = sources
        .par_iter()
        .map(|&d| {
            let seen = g.upset(d).iter().filter(|e| eligible.contains(*e)).map(|e| patterns[e]).collect();
            (d, seen)
        })
        .collect();
    let mut by_pattern: BTreeMap<Pattern, Vec<usize>> = BTreeMap::new();
    for d in sources {
        by_pattern.entry(patterns[d]).or_default().push(d);
    }
    for (src, worlds) in by_pattern {
        for tgt in targets(src) {
            if let Some(d) = worlds.iter().find(|d| !reach[d].contains(&tgt)) {
                return Some((src, tgt, *d));
            }
        }
    }
    None
}

fn mask_of(columns: &[BitSet], w: usize) -> u32 {
    columns.iter().enumerate().fold(0, |m, (i, c)| m | (c.contains(w) as u32) << i)
}

fn budget_exceeded(bits: usize, budget: u128) -> Option<u128> {
    let required = if bits >= 63 { u128::MAX } else { 1u128 << (2 * bits) };
    (bits > 31 || required > budget).then_some(required)
}

fn finish(
    ch: &Checker,
    kind: IndependenceKind,
    families: Vec<ControlReport>,
    unpushed: usize,
    patterns: &[Pattern],
    eligible: &BitSet,
    targets: impl Fn(Pattern) -> Vec<Pattern>,
) -> IndependenceReport {
    let failure = first_failure(ch, patterns, eligible, targets).map(|(src, tgt, d)| PatternFailure {
        from: (set(src.0), set(src.1)),
        to: (set(tgt.0), set(tgt.1)),
        world: ch.frame().world(d).id.clone(),
        world_index: d,
    });
    let mut r = IndependenceReport {
        kind,
        world: ch.frame().world(ch.anchor()).id.clone(),
        verdict: false,
        families,
        unpushed,
        failure,
        inconclusive: None,
    };
    r.verdict = r.failure.is_none() && r.families_ok();
    r
}

fn inconclusive(ch: &Checker, kind: IndependenceKind, required: u128) -> IndependenceReport {
    IndependenceReport {
        kind,
        world: ch.frame().world(ch.anchor()).id.clone(),
        verdict: false,
        families: Vec::new(),
        unpushed: 0,
        failure: None,
        inconclusive: Some(required),
    }
}

impl Checker<'_> {
    /// From every accessible pattern `(I₀, J₀)` every `(I₁, J₁)` with
    /// `I₀ ⊆ I₁` is reachable. Buttons must be unpushed pure buttons and
    /// switches must be switches.
    pub fn independence(&self, buttons: &[Ctl], switches: &[Ctl], budget: u128) -> Result<IndependenceReport, ControlError> {
        let (n, m) = (buttons.len(), switches.len());
        if let Some(req) = budget_exceeded(n + m, budget) {
            return Ok(inconclusive(self, IndependenceKind::Plain, req));
        }
        let mut families = Vec::new();
        for b in buttons {
            families.push(self.pure_button(b)?);
        }
        for s in switches {
            families.push(self.switch(s)?);
        }
        let g = self.frame();
        let bc: Vec<BitSet> = buttons.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?;
        let sc: Vec<BitSet> = switches.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?;
        let patterns: Vec<Pattern> = (0..g.len()).map(|w| (mask_of(&bc, w), mask_of(&sc, w))).collect();
        let targets = |(i0, _): Pattern| supersets(i0, n).flat_map(|i1| (0u32..1 << m).map(move |j1| (i1, j1))).collect();
        Ok(finish(self, IndependenceKind::Plain, families, n, &patterns, &BitSet::full(g.len()), targets))
    }

    /// As [`Checker::independence`], with every pattern additionally
    /// requiring the restrictor to be off. The restrictor must be an
    /// unpushed pure button and each switch a restricted switch for it.
    pub fn independence_until(
        &self,
        buttons: &[Ctl],
        restrictor: &Ctl,
        switches: &[Ctl],
        budget: u128,
    ) -> Result<IndependenceReport, ControlError> {
        let (n, m) = (buttons.len(), switches.len());
        if let Some(req) = budget_exceeded(n + m, budget) {
            return Ok(inconclusive(self, IndependenceKind::Until, req));
        }
        let mut families = Vec::new();
        for b in buttons.iter().chain([restrictor]) {
            families.push(self.pure_button(b)?);
        }
        for s in switches {
            let mut r = self.restricted_switch(s, restrictor)?;
            r.restrictor = None;
            families.push(r);
        }
        let g = self.frame();
        let bc: Vec<BitSet> = buttons.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?;
        let sc: Vec<BitSet> = switches.iter().map(|f| g.truth(f)).collect::<Result<_, _>>()?;
        let off_b = g.truth(restrictor)?.complement();
        let patterns: Vec<Pattern> = (0..g.len()).map(|w| (mask_of(&bc, w), mask_of(&sc, w))).collect();
        let targets = |(i0, _): Pattern| supersets(i0, n).flat_map(|i1| (0u32..1 << m).map(move |j1| (i1, j1))).collect();
        Ok(finish(self, IndependenceKind::Until, families, n + 1, &patterns, &off_b, targets))
    }

    /// From every accessible pattern `(I₀, J₀)` of decided-left and
    /// decided-right indices, every `(I₁, J₁)` with `I₀ ⊆ I₁` and
    /// `J₀ ⊆ J₁ ⊆ complement(I₁)` is reachable. Each pair must be a decision.
    pub fn decision_independence(&self, decisions: &[(Ctl, Ctl)], budget: u128) -> Result<IndependenceReport, ControlError> {
        let n = decisions.len();
        if let Some(req) = budget_exceeded(2 * n, budget) {
            return Ok(inconclusive(self, IndependenceKind::Decision, req));
        }
        let families = decisions.iter().map(|(l, r)| self.decision(l, r)).collect::<Result<Vec<_>, _>>()?;
        let g = self.frame();
        let lc: Vec<BitSet> = decisions.iter().map(|(l, _)| g.truth(l)).collect::<Result<_, _>>()?;
        let rc: Vec<BitSet> = decisions.iter().map(|(_, r)| g.truth(r)).collect::<Result<_, _>>()?;
        let patterns: Vec<Pattern> = (0..g.len()).map(|w| (mask_of(&lc, w), mask_of(&rc, w))).collect();
        let targets = |(i0, j0): Pattern| {
            supersets(i0, n)
                .flat_map(|i1| supersets(j0, n).filter(move |j1| j1 & i1 == 0).map(move |j1| (i1, j1)))
                .collect()
        };
        Ok(finish(self, IndependenceKind::Decision, families, n, &patterns, &BitSet::full(g.len()), targets))
    }
}

pub fn check_independence(
    g: &GeneralFrame,
    c: usize,
    buttons: &[Ctl],
    switches: &[Ctl],
    budget: u128,
) -> Result<IndependenceReport, ControlError> {
    Checker::new(g, c)?.independence(buttons, switches, budget)
}

pub fn check_independence_until(
    g: &GeneralFrame,
    c: usize,
    buttons: &[Ctl],
    restrictor: &Ctl,
    switches: &[Ctl],
    budget: u128,
) -> Result<IndependenceReport, ControlError> {
    Checker::new(g, c)?.independence_until(buttons, restrictor, switches, budget)
}

pub fn check_decision_independence(
    g: &GeneralFrame,
    c: usize,
    decisions: &[(Ctl, Ctl)],
    budget: u128,
) -> Result<IndependenceReport, ControlError> {
    Checker::new(g, c)?.decision_independence(decisions, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{beta, button_lattice, pruned_subframe};
    use crate::general::Caps;
    use crate::modal::DEFAULT_VALUATION_BUDGET;

    const BUDGET: u128 = DEFAULT_VALUATION_BUDGET;

    #[test]
    fn buttons_are_independent() {
        let g = button_lattice(3, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let r = check_independence(&g, c, &[beta(1), beta(2), beta(3)], &[], BUDGET).unwrap();
        assert!(r.verdict, "{r}");
    }

    #[test]
    fn duplicated_button_is_dependent() {
        let g = button_lattice(2, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let r = check_independence(&g, c, &[beta(1), beta(1)], &[], BUDGET).unwrap();
        assert!(!r.verdict);
        let p = r.failure.unwrap();
        assert_eq!(p.from, (vec![], vec![]));
        assert_eq!(p.to, (vec![0], vec![]));
    }

    #[test]
    fn never_true_restrictor_reduces_to_plain() {
        let g = button_lattice(2, &Caps::default()).unwrap();
        let c = g.root().unwrap();
        let bs = [beta(1), beta(2)];
        let plain = check_independence(&g, c, &bs, &[], BUDGET).unwrap();
        let until = check_independence_until(&g, c, &bs, &Ctl::falsum(), &[], BUDGET).unwrap();
        assert!(plain.failure.is_none() && until.failure.is_none());
        // the never-true restrictor is not a pure button
        assert!(!until.verdict);
    }

    #[test]
    fn decisions_are_independent() {
        for n in 1..=2 {
            let d = pruned_subframe(n, &Caps::default()).unwrap();
            let c = d.frame.root().unwrap();
            let r = check_decision_independence(&d.frame, c, &d.decisions, BUDGET).unwrap();
            assert!(r.verdict, "{r}");
        }
        let d = pruned_subframe(1, &Caps::default()).unwrap();
        let twice = vec![d.decisions[0].clone(), d.decisions[0].clone()];
        let r = check_decision_independence(&d.frame, d.frame.root().unwrap(), &twice, BUDGET).unwrap();
        assert!(!r.verdict && r.failure.is_some());
    }

    #[test]
    fn budget_makes_it_inconclusive() {
        let g = button_lattice(1, &Caps::default()).unwrap();
        let r = check_independence(&g, 0, &[beta(1)], &[], 2).unwrap();
        assert_eq!(r.inconclusive, Some(4));
        assert!(!r.verdict);
    }
}
