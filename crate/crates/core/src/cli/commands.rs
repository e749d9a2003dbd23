use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{Cli, CliError, Command, Failure, LabelingCommand};
use crate::control::{Checker, ControlError, ControlKind};
use crate::corpus::{self, CorpusError, Generated};
use crate::ctl::{holds, parse_ctl, Ctl, CtlError};
use crate::general::{build_general_frame, enumerate_abstractions, Caps, GeneralError, GeneralFrame, GeneralValidity};
use crate::labeling::{transfer_countermodel, verify_labeling, CountermodelFile, LabelingError, LabelingFile};
use crate::modal::{
    axioms, eval_modal, frame_properties, gen_fpf, gen_lollipop, gen_preboolean, parse_modal, valid_on_frame, valuation_to_names,
    KripkeFrame, Modal, ModalError, Validity,
};
use crate::ts::{find_abstraction, quotient, ts_from_json, ts_to_json, Partition, SearchOutcome, TransitionSystem, TsError};

type Res<T> = Result<T, Failure>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

impl From<TsError> for CliError {
    fn from(e: TsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CtlError> for CliError {
    fn from(e: CtlError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ModalError> for CliError {
    fn from(e: ModalError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GeneralError> for CliError {
    fn from(e: GeneralError) -> Self {
        match e {
            GeneralError::WitnessFailed(_) | GeneralError::Internal(_) => CliError::Internal(e.to_string()),
            GeneralError::TooManyStates { .. } => CliError::Inconclusive(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::General(g) => g.into(),
            CorpusError::Cap { .. } => CliError::Inconclusive(e.to_string()),
            CorpusError::Construction(_) => CliError::Internal(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ControlError> for CliError {
    fn from(e: ControlError) -> Self {
        match e {
            ControlError::General(g) => g.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<LabelingError> for CliError {
    fn from(e: LabelingError) -> Self {
        match e {
            LabelingError::General(g) => g.into(),
            LabelingError::TransferFailed => CliError::Internal(e.to_string()),
            LabelingError::Budget(_) => CliError::Inconclusive(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn ctl(text: &str) -> Result<Ctl, CliError> {
    parse_ctl(text).map_err(|e| CliError::Usage(format!("CTL formula `{text}`: {e}")))
}

/// A modal formula, or an axiom name with or without parentheses.
fn modal(text: &str) -> Result<Modal, CliError> {
    let bare = text.trim().trim_start_matches('(').trim_end_matches(')');
    if let Some(f) = axioms::by_name(bare) {
        return Ok(f);
    }
    parse_modal(text).map_err(|e| CliError::Usage(format!("modal formula `{text}`: {e}")))
}

/// A system file if the path exists, else a built-in system.
fn load_system(spec: &str) -> Result<TransitionSystem, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(ts_from_json(&read(path)?)?);
    }
    corpus::builtin_system(spec).map_err(|e| match e {
        CorpusError::UnknownFamily(_) => CliError::Usage(format!("`{spec}` is neither a file nor a built-in system")),
        other => other.into(),
    })
}

/// A frame bundle file if the path exists, else a built-in frame; a
/// `.frame` suffix on a built-in name is ignored.
fn load_frame(spec: &str, caps: &Caps) -> Result<GeneralFrame, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(GeneralFrame::from_json(&read(path)?)?);
    }
    let name = spec.strip_suffix(".frame").unwrap_or(spec);
    corpus::builtin_frame(name, caps).map_err(|e| match e {
        CorpusError::UnknownFamily(_) => CliError::Usage(format!("`{spec}` is neither a file nor a built-in frame")),
        other => other.into(),
    })
}

/// A finite frame from a family spec or a frame file.
fn load_kripke(spec: &str) -> Result<KripkeFrame, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(KripkeFrame::from_json(&read(path)?)?);
    }
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<usize> = args
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("bad parameter `{s}`"))))
        .collect::<Result<_, _>>()?;
    let bad = || CliError::Usage(format!("`{spec}`: expected preboolean:n,c | lollipop:n,m | fpf:n or a frame file"));
    let limit = |x: usize, cap: usize| if x > cap { Err(CliError::Inconclusive(format!("`{spec}` exceeds the frame size cap"))) } else { Ok(x) };
    match (name, nums.as_slice()) {
        ("preboolean", [n, c]) if *c >= 1 => {
            limit(*n, 12)?;
            limit(*c, 64)?;
            Ok(gen_preboolean(*n, *c))
        }
        ("lollipop", [n, m]) => {
            limit(n + m, 12)?;
            Ok(gen_lollipop(*n, *m))
        }
        ("fpf", [n]) => Ok(gen_fpf(limit(*n, 7)?)),
        _ => Err(bad()),
    }
}

fn world_arg(g: &GeneralFrame, world: &Option<String>) -> Result<usize, CliError> {
    match world {
        Some(w) => Ok(g.world_index(w)?),
        None => g
            .root()
            .ok_or_else(|| CliError::Usage("the frame has no least world; pass --world".into())),
    }
}

fn names(g: &GeneralFrame, ws: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<&str> = ws.into_iter().map(|w| g.world(w).id.as_str()).collect();
    format!("{{{}}}", v.join(", "))
}

fn emit(path: Option<&PathBuf>, text: &str, report: &mut String) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            report.push_str(text);
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

pub(crate) fn execute(cli: &Cli) -> Res<String> {
    let caps = cli.budgets.caps();
    let json = cli.json;
    match &cli.command {
        Command::CheckCtl { ts, formula } => {
            let sys = load_system(ts)?;
            let f = ctl(formula)?;
            let v = holds(&sys, &f)?;
            Ok(if json {
                pretty(&json!({"formula": f.to_string(), "holds": v}))
            } else {
                v.to_string()
            })
        }
        Command::Lattice { ts, mode, relation, out, dot } => {
            let seed = load_system(ts)?;
            let e = enumerate_abstractions(&seed, (*mode).into(), &caps)?;
            let complete = e.complete;
            let g = build_general_frame(e.worlds, (*relation).into(), &caps)?;
            if let Some(p) = out {
                write_file(p, &g.to_json(Some(seed.states())))?;
            }
            if let Some(p) = dot {
                write_file(p, &g.to_dot())?;
            }
            let report = lattice_report(&g, complete, json);
            if !complete || !g.inconclusive_edges().is_empty() {
                return Err(Failure {
                    report,
                    error: CliError::Inconclusive("a cap cut the enumeration or an abstraction search short".into()),
                });
            }
            Ok(report)
        }
        Command::Modal { frame, formula, world, witness } => {
            let g = load_frame(frame, &caps)?;
            let f = modal(formula)?;
            let at = world.as_ref().map(|w| g.world_index(w)).transpose()?;
            modal_report(&g, &f, at, *witness, json, caps.valuation_budget)
        }
        Command::FrameGen { family, out } => {
            let k = load_kripke(family)?;
            let mut report = String::new();
            emit(out.as_ref(), &k.to_json(), &mut report)?;
            Ok(report)
        }
        Command::FrameCheck { frame, formula, props } => {
            let k = load_kripke(frame)?;
            if *props {
                let r = frame_properties(&k);
                return Ok(if json { pretty(&serde_json::to_value(&r)?) } else { r.to_string() });
            }
            let f = modal(formula.as_deref().expect("clap requires a formula"))?;
            match valid_on_frame(&k, &f, caps.valuation_budget)? {
                Validity::Valid => Ok(if json { pretty(&json!({"formula": f.to_string(), "valid": true})) } else { "valid".into() }),
                Validity::Falsified { valuation, world } => {
                    if eval_modal(&k, &valuation, world, &f)? {
                        return Err(CliError::Internal("countermodel does not re-verify".into()).into());
                    }
                    let v = valuation_to_names(&k, &valuation);
                    if json {
                        return Ok(pretty(&json!({"formula": f.to_string(), "valid": false, "world": k.name(world), "valuation": v})));
                    }
                    let sets: Vec<String> = v.iter().map(|(p, ws)| format!("V({p}) = {{{}}}", ws.join(", "))).collect();
                    Ok(format!("falsified at {}; {}", k.name(world), sets.join("; ")))
                }
                Validity::Inconclusive { required } => Err(CliError::Inconclusive(format!("{required} valuations exceed the budget")).into()),
            }
        }
        Command::Control { frame, world, kind, ctl: formula, restrictor, partner } => {
            let g = load_frame(frame, &caps)?;
            let c = world_arg(&g, world)?;
            let kind: ControlKind = kind.parse()?;
            let f = ctl(formula)?;
            let second = match kind {
                ControlKind::RestrictedSwitch => restrictor.as_deref().map(ctl).transpose()?,
                ControlKind::Decision => partner.as_deref().map(ctl).transpose()?,
                _ => None,
            };
            let r = Checker::new(&g, c)?.check(kind, &f, second.as_ref())?;
            Ok(if json { pretty(&serde_json::to_value(&r)?) } else { r.to_string() })
        }
        Command::Independence { frame, world, buttons, switches, until, decisions } => {
            let g = load_frame(frame, &caps)?;
            let c = world_arg(&g, world)?;
            let ch = Checker::new(&g, c)?;
            let budget = caps.valuation_budget;
            let r = if !decisions.is_empty() {
                let pairs = decisions
                    .chunks(2)
                    .map(|p| Ok((ctl(&p[0])?, ctl(&p[1])?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                ch.decision_independence(&pairs, budget)?
            } else {
                let bs = buttons.iter().map(|s| ctl(s)).collect::<Result<Vec<_>, _>>()?;
                let ss = switches.iter().map(|s| ctl(s)).collect::<Result<Vec<_>, _>>()?;
                match until {
                    Some(b) => ch.independence_until(&bs, &ctl(b)?, &ss, budget)?,
                    None => ch.independence(&bs, &ss, budget)?,
                }
            };
            let report = if json { pretty(&serde_json::to_value(&r)?) } else { r.to_string() };
            if r.is_inconclusive() {
                return Err(Failure { report, error: CliError::Inconclusive("pattern budget exceeded".into()) });
            }
            Ok(report)
        }
        Command::Labeling(LabelingCommand::Verify { labeling, frame, world }) => {
            let l = LabelingFile::from_json(&read(labeling)?)?;
            let g = load_frame(frame, &caps)?;
            let c = world_arg(&g, world)?;
            let v = verify_labeling(&l, &g, c)?;
            Ok(if json {
                pretty(&json!({"valid": v.is_none(), "violation": v.as_ref().map(|x| x.to_string())}))
            } else {
                match v {
                    None => format!("valid labeling at {}", g.world(c).id),
                    Some(x) => format!("invalid labeling: {x}"),
                }
            })
        }
        Command::Labeling(LabelingCommand::Transfer { labeling, countermodel, frame, world }) => {
            let l = LabelingFile::from_json(&read(labeling)?)?;
            let cm = CountermodelFile::from_json(&read(countermodel)?)?;
            let g = load_frame(frame, &caps)?;
            let c = world_arg(&g, world)?;
            let t = transfer_countermodel(&l, &g, c, &cm)?;
            if json {
                let props: BTreeMap<&String, Value> = t
                    .ctl
                    .iter()
                    .map(|(p, f)| {
                        let ws: Vec<&str> = t.world_sets[p].iter().map(|w| g.world(*w).id.as_str()).collect();
                        (p, json!({"ctl": f.to_string(), "worlds": ws}))
                    })
                    .collect();
                return Ok(pretty(&json!({"falsified_at": g.world(c).id, "formula": cm.formula.to_string(), "valuation": props})));
            }
            let mut out = format!("`{}` falsified at {}", cm.formula, g.world(c).id);
            for (p, f) in &t.ctl {
                let _ = write!(out, "; {p} := {f}; V({p}) = {}", names(&g, t.world_sets[p].iter().copied()));
            }
            Ok(out)
        }
        Command::Gen { name, out } => {
            let params: corpus::GadgetParams = name.parse().map_err(CliError::from)?;
            let text = match corpus::gen(params, &caps)? {
                Generated::System(ts) => ts_to_json(&ts),
                Generated::Frame(g) => g.to_json(None),
            };
            let mut report = String::new();
            emit(out.as_ref(), &text, &mut report)?;
            Ok(report)
        }
        Command::Abstract { ts, partition_file, out } => {
            let sys = load_system(ts)?;
            let blocks: Vec<Vec<String>> = serde_json::from_str(&read(partition_file)?).map_err(CliError::from)?;
            let p = Partition::from_names(&sys, &blocks)?;
            let (q, _) = quotient(&sys, &p)?;
            let mut report = String::new();
            emit(out.as_ref(), &ts_to_json(&q), &mut report)?;
            Ok(report)
        }
        Command::Refines { coarse, fine } => {
            let c = load_system(coarse)?;
            let f = load_system(fine)?;
            match find_abstraction(&c, &f, caps.search_nodes)? {
                SearchOutcome::Found(w) => {
                    if json {
                        let map: BTreeMap<String, String> = w.named_map().into_iter().collect();
                        return Ok(pretty(&json!({"refines": true, "map": map})));
                    }
                    let mut out = String::from("yes");
                    for (a, b) in w.named_map() {
                        let _ = write!(out, "\n  {a} -> {b}");
                    }
                    Ok(out)
                }
                SearchOutcome::NoWitness => Ok(if json { pretty(&json!({"refines": false})) } else { "no".into() }),
                SearchOutcome::Inconclusive { nodes } => {
                    Err(CliError::Inconclusive(format!("abstraction search stopped after {nodes} nodes")).into())
                }
            }
        }
    }
}

fn lattice_report(g: &GeneralFrame, complete: bool, json: bool) -> String {
    let edges: Vec<[String; 2]> = crate::modal::hasse_edges(g.len(), |a, b| g.access(a, b))
        .into_iter()
        .map(|(a, b)| [g.world(a).id.clone(), g.world(b).id.clone()])
        .collect();
    if json {
        let worlds: Vec<Value> = g
            .worlds()
            .iter()
            .enumerate()
            .map(|(i, w)| json!({"id": w.id, "states": w.system.num_states(), "block": g.block_of(i)}))
            .collect();
        let formulas: BTreeMap<String, String> =
            g.block_formulas().iter().map(|(b, f)| (b.to_string(), f.to_string())).collect();
        return pretty(&json!({
            "worlds": worlds,
            "blocks": g.num_blocks(),
            "complete": complete,
            "hasse": edges,
            "block_formulas": formulas,
        }));
    }
    let mut out = format!("{} worlds, {} CTL-blocks\n", g.len(), g.num_blocks());
    if !complete {
        out.push_str("enumeration incomplete: a cap was reached\n");
    }
    for (i, w) in g.worlds().iter().enumerate() {
        let _ = writeln!(out, "  world {}: {} states, block {}", w.id, w.system.num_states(), g.block_of(i));
    }
    for [a, b] in &edges {
        let _ = writeln!(out, "  {a} -> {b}");
    }
    for (b, f) in g.block_formulas() {
        let _ = writeln!(out, "  block {b}: {f}");
    }
    if !g.inconclusive_edges().is_empty() {
        let _ = writeln!(out, "  {} world pairs left undecided by the search budget", g.inconclusive_edges().len());
    }
    out
}

fn modal_report(g: &GeneralFrame, f: &Modal, at: Option<usize>, witness: bool, json: bool, budget: u128) -> Res<String> {
    let scope = at.map(|w| format!(" at {}", g.world(w).id)).unwrap_or_default();
    match crate::general::valid_on_general(g, f, at, budget)? {
        GeneralValidity::Valid => Ok(if json {
            pretty(&json!({"formula": f.to_string(), "valid": true}))
        } else {
            format!("valid{scope}")
        }),
        GeneralValidity::Inconclusive { required } => {
            Err(CliError::Inconclusive(format!("{required} admissible valuations exceed the budget")).into())
        }
        GeneralValidity::Falsified(w) => {
            let world = &g.world(w.world).id;
            if json {
                let props: BTreeMap<&String, Value> = w
                    .world_sets
                    .iter()
                    .map(|(p, ws)| {
                        let ids: Vec<&str> = ws.iter().map(|x| g.world(*x).id.as_str()).collect();
                        let c = w.ctl.as_ref().map(|m| m[p].to_string());
                        let blocks: BTreeSet<usize> = w.valuation[p].clone();
                        (p, json!({"worlds": ids, "blocks": blocks, "ctl": c}))
                    })
                    .collect();
                return Ok(pretty(&json!({"formula": f.to_string(), "valid": false, "world": world, "valuation": props})));
            }
            let mut out = format!("falsified at {world}");
            if witness {
                for (p, ws) in &w.world_sets {
                    match w.ctl.as_ref().map(|m| &m[p]) {
                        Some(c) => {
                            let _ = write!(out, "; {p} := {c}");
                        }
                        None => {
                            let _ = write!(out, "; {p} := (no CTL realisation found)");
                        }
                    }
                    let _ = write!(out, "; V({p}) = {}", names(g, ws.iter().copied()));
                }
            }
            Ok(out)
        }
    }
}
