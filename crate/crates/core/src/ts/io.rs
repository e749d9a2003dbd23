use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{TransitionSystem, TsError};

/// On-disk shape of a transition system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsFile {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub ap: Vec<String>,
    pub labels: BTreeMap<String, Vec<String>>,
    pub transitions: Vec<[String; 2]>,
}

impl TsFile {
    pub fn from_system(ts: &TransitionSystem) -> Self {
        TsFile {
            states: ts.states().to_vec(),
            initial: ts.initial().iter().map(|i| ts.state_name(*i).to_string()).collect(),
            ap: ts.ap().iter().cloned().collect(),
            labels: (0..ts.num_states())
                .map(|i| (ts.state_name(i).to_string(), ts.label(i).iter().cloned().collect()))
                .collect(),
            transitions: ts
                .transitions()
                .map(|(a, b)| [ts.state_name(a).to_string(), ts.state_name(b).to_string()])
                .collect(),
        }
    }

    pub fn into_system(self) -> Result<TransitionSystem, TsError> {
        let mut ap = BTreeSet::new();
        for p in &self.ap {
            if !ap.insert(p.clone()) {
                return Err(TsError::DuplicateProp(p.clone()));
            }
        }
        let mut labels = self.labels;
        let mut label_vec: Vec<BTreeSet<String>> = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let l = labels.remove(s).ok_or_else(|| TsError::MissingLabel(s.clone()))?;
            label_vec.push(l.into_iter().collect());
        }
        if let Some((extra, _)) = labels.into_iter().next() {
            return Err(TsError::UnknownState(extra));
        }
        let mut b = TransitionSystem::builder();
        for (s, l) in self.states.into_iter().zip(label_vec) {
            b.add_state(s, l);
        }
        for p in ap {
            b.add_ap(p);
        }
        for i in self.initial {
            b.add_initial(i);
        }
        for [a, c] in self.transitions {
            b.add_edge(a, c);
        }
        b.build()
    }
}

/// Parses the JSON transition-system format. Unknown keys are rejected.
pub fn ts_from_json(text: &str) -> Result<TransitionSystem, TsError> {
    let file: TsFile = serde_json::from_str(text)?;
    let ts = file.into_system()?;
    Ok(ts)
}

pub fn ts_to_json(ts: &TransitionSystem) -> String {
    serde_json::to_string_pretty(&TsFile::from_system(ts)).expect("serializable")
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: initial states get an edge from an invisible point node.
pub fn ts_to_dot(ts: &TransitionSystem) -> String {
    let mut out = String::from("digraph ts {\n  rankdir=LR;\n");
    for i in 0..ts.num_states() {
        let props: Vec<&str> = ts.label(i).iter().map(String::as_str).collect();
        let label = format!("{}\\n{{{}}}", dot_escape(ts.state_name(i)), dot_escape(&props.join(", ")));
        let _ = writeln!(out, "  s{i} [label=\"{label}\"];");
    }
    for &i in ts.initial() {
        let _ = writeln!(out, "  init{i} [shape=point, style=invis];");
        let _ = writeln!(out, "  init{i} -> s{i};");
    }
    for (a, b) in ts.transitions() {
        let _ = writeln!(out, "  s{a} -> s{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "states": ["a", "b"],
        "initial": ["a"],
        "ap": ["p", "q"],
        "labels": {"a": ["p"], "b": []},
        "transitions": [["a", "b"], ["b", "b"]]
    }"#;

    #[test]
    fn round_trip() {
        let ts = ts_from_json(SAMPLE).unwrap();
        assert_eq!(ts.num_states(), 2);
        assert_eq!(ts.ap().len(), 2);
        let again = ts_from_json(&ts_to_json(&ts)).unwrap();
        assert_eq!(ts, again);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = SAMPLE.replace("\"initial\"", "\"extra\": 1, \"initial\"");
        assert!(matches!(ts_from_json(&bad), Err(TsError::Json(_))));
    }

    #[test]
    fn every_state_needs_a_label_entry() {
        let bad = SAMPLE.replace(r#""b": []"#, r#""c": []"#);
        assert!(matches!(ts_from_json(&bad), Err(TsError::MissingLabel(s)) if s == "b"));
    }

    #[test]
    fn dot_marks_initial_states() {
        let ts = ts_from_json(SAMPLE).unwrap();
        let dot = ts_to_dot(&ts);
        assert!(dot.contains("init0 [shape=point, style=invis]"));
        assert!(dot.contains("init0 -> s0"));
        assert!(dot.contains("label=\"a\\n{p}\""));
    }
}
