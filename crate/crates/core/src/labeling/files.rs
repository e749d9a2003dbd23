use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteCountermodel, Labeling, LabelingError};
use crate::ctl::{parse_ctl, CtlError};
use crate::general::GeneralError;
use crate::modal::{parse_modal, valuation_from_names, valuation_to_names, FrameFile, ModalError};

/// On-disk labeling: an embedded frame, the root node and one CTL formula per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingFile {
    pub frame: FrameFile,
    pub root: String,
    pub phi: BTreeMap<String, String>,
}

/// On-disk countermodel: frame, valuation by node names, root and modal formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountermodelFile {
    pub frame: FrameFile,
    pub valuation: BTreeMap<String, Vec<String>>,
    pub root: String,
    pub formula: String,
}

fn ctl_err(e: crate::syntax::ParseError) -> LabelingError {
    LabelingError::General(GeneralError::Ctl(CtlError::from(e)))
}

impl LabelingFile {
    pub fn from_labeling(l: &Labeling) -> Self {
        LabelingFile {
            frame: l.frame.to_file(),
            root: l.frame.name(l.root).to_string(),
            phi: l
                .phi
                .iter()
                .enumerate()
                .map(|(i, f)| (l.frame.name(i).to_string(), f.to_string()))
                .collect(),
        }
    }

    pub fn into_labeling(self) -> Result<Labeling, LabelingError> {
        let frame = self.frame.into_frame()?;
        let root = frame.world(&self.root)?;
        if let Some(name) = self.phi.keys().find(|k| frame.index_of(k).is_none()) {
            return Err(ModalError::UnknownWorld(name.clone()).into());
        }
        let phi = frame
            .worlds()
            .iter()
            .map(|w| {
                let text = self.phi.get(w).ok_or_else(|| LabelingError::Arity {
                    phi: self.phi.len(),
                    nodes: frame.len(),
                })?;
                parse_ctl(text).map_err(ctl_err)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Labeling::new(frame, root, phi)
    }

    pub fn from_json(text: &str) -> Result<Labeling, LabelingError> {
        serde_json::from_str::<LabelingFile>(text)?.into_labeling()
    }
}

impl CountermodelFile {
    pub fn from_countermodel(cm: &FiniteCountermodel) -> Self {
        CountermodelFile {
            frame: cm.frame.to_file(),
            valuation: valuation_to_names(&cm.frame, &cm.valuation),
            root: cm.frame.name(cm.root).to_string(),
            formula: cm.formula.to_string(),
        }
    }

    pub fn into_countermodel(self) -> Result<FiniteCountermodel, LabelingError> {
        let frame = self.frame.into_frame()?;
        let valuation = valuation_from_names(&frame, &self.valuation)?;
        let root = frame.world(&self.root)?;
        let formula = parse_modal(&self.formula).map_err(ModalError::from)?;
        FiniteCountermodel::new(frame, valuation, root, formula)
    }

    pub fn from_json(text: &str) -> Result<FiniteCountermodel, LabelingError> {
        serde_json::from_str::<CountermodelFile>(text)?.into_countermodel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::beta;
    use crate::labeling::build_preboolean_labeling;

    #[test]
    fn labeling_round_trip() {
        let l = build_preboolean_labeling(&[beta(1)], &[]);
        let text = serde_json::to_string(&LabelingFile::from_labeling(&l)).unwrap();
        assert_eq!(LabelingFile::from_json(&text).unwrap(), l);
    }

    #[test]
    fn countermodel_must_falsify() {
        let text = r#"{"frame": {"worlds": ["a"], "access": [["a", "a"]]},
                       "valuation": {"p": ["a"]}, "root": "a", "formula": "p"}"#;
        assert!(matches!(
            CountermodelFile::from_json(text),
            Err(LabelingError::NotACountermodel { .. })
        ));
        let ok = text.replace("\"p\": [\"a\"]", "\"p\": []");
        let cm = CountermodelFile::from_json(&ok).unwrap();
        let back = serde_json::to_string(&CountermodelFile::from_countermodel(&cm)).unwrap();
        assert_eq!(CountermodelFile::from_json(&back).unwrap(), cm);
    }
}
