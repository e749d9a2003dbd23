use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::TsError;

pub type LabelSet = BTreeSet<String>;

/// A finite transition system `(S, ->, I, AP, L)`.
///
/// States are addressed by their index in declaration order. The structure is
/// immutable; well-formedness (totality, nonempty initial set, labels within
/// `ap`) is reported by [`TransitionSystem::validate`] rather than enforced, so
/// malformed inputs can still be inspected.
#[derive(Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    states: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    initial: Vec<usize>,
    is_initial: Vec<bool>,
    ap: BTreeSet<String>,
    labels: Vec<LabelSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    TerminalState(String),
    EmptyInitialSet,
    LabelOutsideAp { state: String, prop: String },
}

impl Diagnostic {
    /// Short category name, independent of the offending state.
    pub fn kind(&self) -> &'static str {
        match self {
            Diagnostic::TerminalState(_) => "terminal state",
            Diagnostic::EmptyInitialSet => "empty initial set",
            Diagnostic::LabelOutsideAp { .. } => "label outside ap",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TerminalState(s) => write!(f, "terminal state `{s}`"),
            Diagnostic::EmptyInitialSet => write!(f, "empty initial set"),
            Diagnostic::LabelOutsideAp { state, prop } => {
                write!(f, "label outside ap: `{prop}` on state `{state}`")
            }
        }
    }
}

impl TransitionSystem {
    /// Builds a system from indexed parts. Only structural errors (duplicate
    /// names, out-of-range indices, label vector length) are rejected here.
    pub fn from_parts(
        states: Vec<String>,
        initial: impl IntoIterator<Item = usize>,
        ap: BTreeSet<String>,
        labels: Vec<LabelSet>,
        transitions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TsError> {
        let n = states.len();
        let mut index = HashMap::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(TsError::DuplicateState(s.clone()));
            }
        }
        if labels.len() != n {
            let missing = states.get(labels.len()).cloned().unwrap_or_default();
            return Err(TsError::MissingLabel(missing));
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b) in transitions {
            if a >= n {
                return Err(TsError::StateIndex(a));
            }
            if b >= n {
                return Err(TsError::StateIndex(b));
            }
            succ[a].push(b);
            pred[b].push(a);
        }
        for v in succ.iter_mut().chain(pred.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let mut is_initial = vec![false; n];
        for i in initial {
            if i >= n {
                return Err(TsError::StateIndex(i));
            }
            is_initial[i] = true;
        }
        let initial = (0..n).filter(|i| is_initial[*i]).collect();
        Ok(TransitionSystem {
            states,
            index,
            succ,
            pred,
            initial,
            is_initial,
            ap,
            labels,
        })
    }

    pub fn builder() -> TsBuilder {
        TsBuilder::default()
    }

    /// Lists every violated well-formedness invariant; empty iff valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.initial.is_empty() {
            out.push(Diagnostic::EmptyInitialSet);
        }
        for (i, name) in self.states.iter().enumerate() {
            if self.succ[i].is_empty() {
                out.push(Diagnostic::TerminalState(name.clone()));
            }
            for p in &self.labels[i] {
                if !self.ap.contains(p) {
                    out.push(Diagnostic::LabelOutsideAp {
                        state: name.clone(),
                        prop: p.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), TsError> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(TsError::Invalid(d))
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn has_transition(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, v)| v.iter().map(move |b| (a, *b)))
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_initial(&self, i: usize) -> bool {
        self.is_initial[i]
    }

    pub fn ap(&self) -> &BTreeSet<String> {
        &self.ap
    }

    pub fn label(&self, i: usize) -> &LabelSet {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[LabelSet] {
        &self.labels
    }

    /// Same system with states renamed by `f`.
    pub fn renamed(&self, mut f: impl FnMut(usize, &str) -> String) -> Result<Self, TsError> {
        let states = self.states.iter().enumerate().map(|(i, s)| f(i, s)).collect();
        Self::from_parts(
            states,
            self.initial.iter().copied(),
            self.ap.clone(),
            self.labels.clone(),
            self.transitions(),
        )
    }

    /// Same system with a different ap set (labels untouched).
    pub fn with_ap(&self, ap: BTreeSet<String>) -> Self {
        let mut out = self.clone();
        out.ap = ap;
        out
    }

    /// Initial states plus everything reachable from them.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = self.initial.clone();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

impl fmt::Debug for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self
            .transitions()
            .map(|(a, b)| format!("{}->{}", self.states[a], self.states[b]))
            .collect();
        let init: Vec<_> = self.initial.iter().map(|i| &self.states[*i]).collect();
        f.debug_struct("TransitionSystem")
            .field("states", &self.states)
            .field("initial", &init)
            .field("labels", &self.labels)
            .field("transitions", &edges)
            .finish()
    }
}

/// Name-based construction helper.
#[derive(Debug, Default, Clone)]
pub struct TsBuilder {
    states: Vec<String>,
    labels: Vec<LabelSet>,
    initial: Vec<String>,
    edges: Vec<(String, String)>,
    ap: BTreeSet<String>,
}

impl TsBuilder {
    pub fn state<I, S>(mut self, name: impl Into<String>, props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.add_state(name, props);
        self
    }

    pub fn add_state<I, S>(&mut self, name: impl Into<String>, props: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.push(name.into());
        self.labels.push(props.into_iter().map(Into::into).collect());
    }

    pub fn initial(mut self, name: impl Into<String>) -> Self {
        self.initial.push(name.into());
        self
    }

    pub fn add_initial(&mut self, name: impl Into<String>) {
        self.initial.push(name.into());
    }

    pub fn edge(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.add_edge(a, b);
        self
    }

    pub fn add_edge(&mut self, a: impl Into<String>, b: impl Into<String>) {
        self.edges.push((a.into(), b.into()));
    }

    /// Declares an atomic proposition that may not occur in any label.
    pub fn ap(mut self, p: impl Into<String>) -> Self {
        self.ap.insert(p.into());
        self
    }

    pub fn add_ap(&mut self, p: impl Into<String>) {
        self.ap.insert(p.into());
    }

    pub fn build(self) -> Result<TransitionSystem, TsError> {
        let mut ap = self.ap;
        for l in &self.labels {
            ap.extend(l.iter().cloned());
        }
        let index: HashMap<&str, usize> = self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| TsError::UnknownState(s.to_string()));
        let initial = self.initial.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>()?;
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, TsError>>()?;
        TransitionSystem::from_parts(self.states, initial, ap, self.labels, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_and_empty_initial_are_diagnosed() {
        let ts = TransitionSystem::builder().state("s", ["p"]).initial("s").build().unwrap();
        let kinds: Vec<_> = ts.validate().iter().map(|d| d.kind()).collect();
        assert_eq!(kinds, vec!["terminal state"]);

        let ts = TransitionSystem::builder().state("s", ["p"]).edge("s", "s").build().unwrap();
        let kinds: Vec<_> = ts.validate().iter().map(|d| d.kind()).collect();
        assert_eq!(kinds, vec!["empty initial set"]);
    }

    #[test]
    fn labels_outside_ap() {
        let ts = TransitionSystem::from_parts(
            vec!["s".into()],
            [0],
            BTreeSet::new(),
            vec![["q".to_string()].into_iter().collect()],
            [(0, 0)],
        )
        .unwrap();
        assert_eq!(ts.validate()[0].kind(), "label outside ap");
    }

    #[test]
    fn builder_rejects_unknown_names_and_duplicates() {
        let err = TransitionSystem::builder().state("s", ["p"]).edge("s", "t").build().unwrap_err();
        assert!(matches!(err, TsError::UnknownState(ref s) if s == "t"));
        let err = TransitionSystem::builder()
            .state("s", ["p"])
            .state("s", ["p"])
            .build()
            .unwrap_err();
        assert!(matches!(err, TsError::DuplicateState(_)));
    }

    #[test]
    fn transitions_are_deduplicated_and_sorted() {
        let ts = TransitionSystem::builder()
            .state("a", Vec::<String>::new())
            .state("b", Vec::<String>::new())
            .initial("a")
            .edge("a", "b")
            .edge("a", "b")
            .edge("a", "a")
            .edge("b", "b")
            .build()
            .unwrap();
        assert_eq!(ts.successors(0), &[0, 1]);
        assert_eq!(ts.num_transitions(), 3);
        assert!(ts.validate().is_empty());
    }
}
