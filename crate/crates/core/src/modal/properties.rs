use std::fmt;

use serde::Serialize;

use super::KripkeFrame;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub holds: bool,
    /// World names witnessing the failure.
    pub counterexample: Option<Vec<String>>,
}

impl PropertyCheck {
    fn ok() -> Self {
        PropertyCheck {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(frame: &KripkeFrame, worlds: &[usize]) -> Self {
        PropertyCheck {
            holds: false,
            counterexample: Some(worlds.iter().map(|w| frame.name(*w).to_string()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub reflexive: PropertyCheck,
    pub transitive: PropertyCheck,
    /// `Rwv ∧ Rwu → ∃z. Rvz ∧ Ruz`; counterexample `(w, v, u)`.
    pub directed: PropertyCheck,
    /// `∃m ∀w. Rwm`; counterexample `(m, w)` for the best candidate `m`.
    pub has_greatest: PropertyCheck,
    pub antisymmetric: PropertyCheck,
    /// Some world seen by every world, when one exists.
    pub greatest: Option<String>,
}

pub fn frame_properties(frame: &KripkeFrame) -> FrameReport {
    let n = frame.len();
    let r = |a: usize, b: usize| frame.access(a, b);

    let reflexive = (0..n)
        .find(|w| !r(*w, *w))
        .map_or_else(PropertyCheck::ok, |w| PropertyCheck::fail(frame, &[w]));

    let mut transitive = PropertyCheck::ok();
    'tr: for a in 0..n {
        for b in frame.successors(a).iter() {
            for c in frame.successors(b).iter() {
                if !r(a, c) {
                    transitive = PropertyCheck::fail(frame, &[a, b, c]);
                    break 'tr;
                }
            }
        }
    }

    let mut directed = PropertyCheck::ok();
    'dir: for w in 0..n {
        for v in frame.successors(w).iter() {
            for u in frame.successors(w).iter() {
                if !frame.successors(v).intersects(frame.successors(u)) {
                    directed = PropertyCheck::fail(frame, &[w, v, u]);
                    break 'dir;
                }
            }
        }
    }

    let seen_by_all = |m: usize| (0..n).all(|w| r(w, m));
    let greatest_world = (0..n).find(|m| seen_by_all(*m));
    let has_greatest = match greatest_world {
        Some(_) => PropertyCheck::ok(),
        None if n == 0 => PropertyCheck {
            holds: false,
            counterexample: Some(Vec::new()),
        },
        None => {
            let indeg = |m: usize| (0..n).filter(|w| r(*w, m)).count();
            let m = (0..n).max_by_key(|m| (indeg(*m), std::cmp::Reverse(*m))).expect("nonempty");
            let w = (0..n).find(|w| !r(*w, m)).expect("m is not greatest");
            PropertyCheck::fail(frame, &[m, w])
        }
    };

    let mut antisymmetric = PropertyCheck::ok();
    'anti: for a in 0..n {
        for b in frame.successors(a).iter() {
            if a != b && r(b, a) {
                antisymmetric = PropertyCheck::fail(frame, &[a, b]);
                break 'anti;
            }
        }
    }

    FrameReport {
        reflexive,
        transitive,
        directed,
        has_greatest,
        antisymmetric,
        greatest: greatest_world.map(|m| frame.name(m).to_string()),
    }
}

impl fmt::Display for FrameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("reflexive", &self.reflexive),
            ("transitive", &self.transitive),
            ("directed", &self.directed),
            ("has_greatest", &self.has_greatest),
            ("antisymmetric", &self.antisymmetric),
        ];
        for (name, check) in rows {
            match &check.counterexample {
                None => writeln!(f, "{name}: yes")?,
                Some(c) => writeln!(f, "{name}: no ({})", c.join(", "))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_on_two_worlds() {
        let f = KripkeFrame::from_fn(vec!["a".into(), "b".into()], |_, _| true).unwrap();
        let r = frame_properties(&f);
        assert!(r.reflexive.holds && r.transitive.holds && r.directed.holds && r.has_greatest.holds);
        assert!(!r.antisymmetric.holds);
        assert_eq!(r.antisymmetric.counterexample, Some(vec!["a".into(), "b".into()]));
    }

    #[test]
    fn fork_is_not_directed() {
        let f = KripkeFrame::from_fn(vec!["r".into(), "x".into(), "y".into()], |a, b| a == b || a == 0).unwrap();
        let r = frame_properties(&f);
        assert!(!r.directed.holds);
        assert_eq!(r.directed.counterexample, Some(vec!["r".into(), "x".into(), "y".into()]));
        assert!(!r.has_greatest.holds);
        assert!(r.antisymmetric.holds);
    }

    #[test]
    fn non_transitive_path() {
        let f = KripkeFrame::new(vec!["a".into(), "b".into(), "c".into()], [(0, 1), (1, 2)]).unwrap();
        let r = frame_properties(&f);
        assert_eq!(r.transitive.counterexample, Some(vec!["a".into(), "b".into(), "c".into()]));
        assert_eq!(r.reflexive.counterexample, Some(vec!["a".into()]));
    }
}
