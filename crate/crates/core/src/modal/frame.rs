use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ModalError;
use crate::bitset::BitSet;

/// A finite Kripke frame `(W, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeFrame {
    worlds: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<BitSet>,
}

/// Valuation: proposition name to set of world indices.
pub type Valuation = BTreeMap<String, BTreeSet<usize>>;

impl KripkeFrame {
    pub fn new(worlds: Vec<String>, access: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModalError> {
        let n = worlds.len();
        let mut index = HashMap::with_capacity(n);
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(ModalError::DuplicateWorld(w.clone()));
            }
        }
        let mut succ = vec![BitSet::new(n); n];
        for (a, b) in access {
            if a >= n || b >= n {
                return Err(ModalError::WorldIndex(a.max(b)));
            }
            succ[a].insert(b);
        }
        Ok(KripkeFrame { worlds, index, succ })
    }

    /// Frame over `worlds` with `access(i, j)` deciding the relation.
    pub fn from_fn(worlds: Vec<String>, access: impl Fn(usize, usize) -> bool) -> Result<Self, ModalError> {
        let n = worlds.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| access(*i, *j))
            .collect();
        Self::new(worlds, pairs)
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn world(&self, name: &str) -> Result<usize, ModalError> {
        self.index_of(name).ok_or_else(|| ModalError::UnknownWorld(name.to_string()))
    }

    pub fn access(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> &BitSet {
        &self.succ[a]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| self.succ[a].iter().map(move |b| (a, b)))
    }

    /// Same frame with worlds renamed.
    pub fn renamed(&self, f: impl Fn(usize, &str) -> String) -> Result<Self, ModalError> {
        let names = self.worlds.iter().enumerate().map(|(i, w)| f(i, w)).collect();
        Self::new(names, self.edges())
    }

    /// Subframe induced by `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, ModalError> {
        let names = keep.iter().map(|w| self.worlds[*w].clone()).collect();
        let pairs: Vec<(usize, usize)> = keep
            .iter()
            .enumerate()
            .flat_map(|(i, a)| keep.iter().enumerate().map(move |(j, b)| ((i, *a), (j, *b))))
            .filter(|((_, a), (_, b))| self.access(*a, *b))
            .map(|((i, _), (j, _))| (i, j))
            .collect();
        Self::new(names, pairs)
    }

    /// Worlds reachable from `w` (including `w` when reflexive).
    pub fn upset(&self, w: usize) -> Vec<usize> {
        self.succ[w].iter().collect()
    }

    pub fn to_file(&self) -> FrameFile {
        FrameFile {
            worlds: self.worlds.clone(),
            access: self
                .edges()
                .map(|(a, b)| [self.worlds[a].clone(), self.worlds[b].clone()])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ModalError> {
        let file: FrameFile = serde_json::from_str(text)?;
        file.into_frame()
    }

    /// Graphviz rendering with reflexive and transitively implied edges hidden.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph frame {\n  rankdir=BT;\n");
        for (i, w) in self.worlds.iter().enumerate() {
            let _ = writeln!(out, "  w{i} [label=\"{}\"];", crate::ts::dot_escape(w));
        }
        for (a, b) in hasse_edges(self.len(), |x, y| self.access(x, y)) {
            let _ = writeln!(out, "  w{a} -> w{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Edges of a relation after dropping loops and edges implied by a two-step
/// path through a third world outside both endpoints' clusters.
pub(crate) fn hasse_edges(n: usize, r: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let cluster = |x: usize, y: usize| r(x, y) && r(y, x);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b || !r(a, b) {
                continue;
            }
            let implied = (0..n).any(|m| {
                m != a && m != b && !cluster(m, a) && !cluster(m, b) && r(a, m) && r(m, b)
            });
            if !implied {
                out.push((a, b));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub worlds: Vec<String>,
    pub access: Vec<[String; 2]>,
}

impl FrameFile {
    pub fn into_frame(self) -> Result<KripkeFrame, ModalError> {
        let index: HashMap<&str, usize> = self.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let look = |w: &str| index.get(w).copied().ok_or_else(|| ModalError::UnknownWorld(w.to_string()));
        let pairs = self
            .access
            .iter()
            .map(|[a, b]| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, ModalError>>()?;
        KripkeFrame::new(self.worlds.clone(), pairs)
    }
}

/// Converts a name-keyed valuation to world indices.
pub fn valuation_from_names(
    frame: &KripkeFrame,
    named: &BTreeMap<String, Vec<String>>,
) -> Result<Valuation, ModalError> {
    named
        .iter()
        .map(|(p, ws)| {
            let set = ws.iter().map(|w| frame.world(w)).collect::<Result<BTreeSet<_>, _>>()?;
            Ok((p.clone(), set))
        })
        .collect()
}

pub fn valuation_to_names(frame: &KripkeFrame, v: &Valuation) -> BTreeMap<String, Vec<String>> {
    v.iter()
        .map(|(p, ws)| (p.clone(), ws.iter().map(|w| frame.name(*w).to_string()).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_worlds() {
        let f = KripkeFrame::new(vec!["a".into(), "b".into()], [(0, 0), (0, 1), (1, 1)]).unwrap();
        let g = KripkeFrame::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
        let bad = r#"{"worlds": ["a"], "access": [["a", "z"]]}"#;
        assert!(matches!(KripkeFrame::from_json(bad), Err(ModalError::UnknownWorld(w)) if w == "z"));
    }

    #[test]
    fn hasse_drops_loops_and_shortcuts() {
        // 3-chain, reflexive-transitive
        let f = KripkeFrame::from_fn(vec!["0".into(), "1".into(), "2".into()], |a, b| a <= b).unwrap();
        assert_eq!(hasse_edges(3, |a, b| f.access(a, b)), vec![(0, 1), (1, 2)]);
        // a 2-cluster keeps both directions
        let c = KripkeFrame::from_fn(vec!["x".into(), "y".into()], |_, _| true).unwrap();
        assert_eq!(hasse_edges(2, |a, b| c.access(a, b)), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn restriction() {
        let f = KripkeFrame::from_fn(vec!["0".into(), "1".into(), "2".into()], |a, b| a <= b).unwrap();
        let g = f.restrict(&[0, 2]).unwrap();
        assert!(g.access(0, 1));
        assert!(!g.access(1, 0));
        assert_eq!(g.worlds(), &["0", "2"]);
    }
}
