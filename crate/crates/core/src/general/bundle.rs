use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{GeneralError, GeneralFrame, World};
use crate::ctl::parse_ctl;
use crate::modal::hasse_edges;
use crate::ts::{dot_escape, Partition, TsFile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleWorld {
    pub id: String,
    pub system: TsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<String>>>,
}

/// On-disk form of a general frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub worlds: Vec<BundleWorld>,
    pub access: Vec<[String; 2]>,
    pub blocks: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_formulas: Option<BTreeMap<String, String>>,
}

const PALETTE: [&str; 8] = [
    "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f", "#cab2d6", "#ffff99", "#1f78b4", "#33a02c",
];

impl GeneralFrame {
    pub fn to_bundle(&self, seed_names: Option<&[String]>) -> BundleFile {
        let worlds = self
            .worlds()
            .iter()
            .map(|w| BundleWorld {
                id: w.id.clone(),
                system: TsFile::from_system(&w.system),
                partition: match (&w.partition, seed_names) {
                    (Some(p), Some(names)) => Some(
                        p.blocks()
                            .iter()
                            .map(|b| b.iter().map(|s| names[*s].clone()).collect())
                            .collect(),
                    ),
                    _ => None,
                },
            })
            .collect();
        let id = |w: usize| self.world(w).id.clone();
        BundleFile {
            worlds,
            access: self.kripke().edges().map(|(a, b)| [id(a), id(b)]).collect(),
            blocks: self.blocks().iter().map(|b| b.iter().map(|w| id(*w)).collect()).collect(),
            block_formulas: Some(
                self.block_formulas()
                    .iter()
                    .map(|(b, f)| (b.to_string(), f.to_string()))
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self, seed_names: Option<&[String]>) -> String {
        serde_json::to_string_pretty(&self.to_bundle(seed_names)).expect("serializable")
    }

    /// Loads a bundle. Blocks are recomputed and must agree with the file;
    /// stored block formulas must define their block.
    pub fn from_bundle(file: BundleFile) -> Result<Self, GeneralError> {
        // seed state names are only known through the partitions themselves
        let seed: BTreeSet<&String> = file
            .worlds
            .iter()
            .filter_map(|w| w.partition.as_ref())
            .flatten()
            .flatten()
            .collect();
        let seed_index: BTreeMap<&String, usize> = seed.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut worlds = Vec::with_capacity(file.worlds.len());
        for bw in &file.worlds {
            let system = bw.system.clone().into_system()?;
            let partition = match &bw.partition {
                None => None,
                Some(blocks) => {
                    let idx = blocks
                        .iter()
                        .map(|b| b.iter().map(|s| seed_index[s]).collect())
                        .collect();
                    Some(Partition::new(seed.len(), idx)?)
                }
            };
            worlds.push(World {
                id: bw.id.clone(),
                class: partition.iter().cloned().collect(),
                partition,
                system,
            });
        }
        let index: BTreeMap<&str, usize> = file.worlds.iter().enumerate().map(|(i, w)| (w.id.as_str(), i)).collect();
        let look = |id: &str| index.get(id).copied().ok_or_else(|| GeneralError::UnknownWorld(id.to_string()));
        let edges = file
            .access
            .iter()
            .map(|[a, b]| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, GeneralError>>()?;
        let g = GeneralFrame::from_parts(worlds, edges)?;

        let mut stated: Vec<BTreeSet<usize>> = file
            .blocks
            .iter()
            .map(|b| b.iter().map(|w| look(w)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let mut computed: Vec<BTreeSet<usize>> = g.blocks().iter().map(|b| b.iter().copied().collect()).collect();
        stated.sort();
        computed.sort();
        if stated != computed {
            return Err(GeneralError::BlockMismatch);
        }
        for (b, text) in file.block_formulas.iter().flatten() {
            let i: usize = b.parse().map_err(|_| GeneralError::Internal(format!("bad block index `{b}`")))?;
            if i >= g.num_blocks() {
                return Err(GeneralError::UnknownBlock(i));
            }
            let f = parse_ctl(text).map_err(crate::ctl::CtlError::from)?;
            let truth = g.truth(&f)?;
            // block numbering in the file follows its own block list
            let members: BTreeSet<usize> = file.blocks[i].iter().map(|w| look(w)).collect::<Result<_, _>>()?;
            if truth.iter().collect::<BTreeSet<_>>() != members {
                return Err(GeneralError::BadBlockFormula { block: i, formula: text.clone() });
            }
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, GeneralError> {
        Self::from_bundle(serde_json::from_str(text)?)
    }

    /// Graphviz rendering: boxes filled by block, Hasse edges only.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph general {\n  rankdir=BT;\n  node [shape=box, style=filled];\n");
        for (i, w) in self.worlds().iter().enumerate() {
            let b = self.block_of(i);
            let _ = writeln!(
                out,
                "  w{i} [label=\"{}\\nblock {b}\", fillcolor=\"{}\"];",
                dot_escape(&w.id),
                PALETTE[b % PALETTE.len()]
            );
        }
        for (a, b) in hasse_edges(self.len(), |x, y| self.access(x, y)) {
            let _ = writeln!(out, "  w{a} -> w{b};");
        }
        out.push_str("}\n");
        out
    }
}
