//! The command-line front end, driven in-process.

use std::path::Path;

use refmodal::cli::{run, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use refmodal::corpus::{beta, button_lattice};
use refmodal::general::Caps;
use refmodal::labeling::{build_preboolean_labeling, CountermodelFile, FiniteCountermodel, LabelingFile};
use refmodal::modal::parse_modal;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("refmodal").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = cli(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counter_formula() {
    assert_eq!(ok(&["check-ctl", "--ts", "fig1_t1", "--formula", "EX EX EX x0"]), "true\n");
    assert_eq!(ok(&["check-ctl", "--ts", "fig1_t2", "--formula", "EX EX EX x0"]), "false\n");
}

#[test]
fn lattice_report_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("fig2.json");
    let dot = dir.path().join("fig2.dot");
    let out = ok(&["lattice", "--ts", "fig2_s", "--mode", "iso", "--out", path(&bundle), "--dot", path(&dot)]);
    assert_eq!(out.lines().next(), Some("4 worlds, 3 CTL-blocks"));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let out = ok(&["modal", "--frame", path(&bundle), "--formula", "[]<>p -> <>[]p"]);
    assert_eq!(out, "valid\n");
    let part = ok(&["lattice", "--ts", "fig2_s", "--mode", "partition", "--relation", "coarsen"]);
    assert_eq!(part.lines().next(), Some("5 worlds, 3 CTL-blocks"));
}

#[test]
fn modal_witness() {
    let out = ok(&["modal", "--frame", "fig2.frame", "--formula", "p -> []p", "--witness"]);
    assert_eq!(out, "falsified at T₁; p := EX b; V(p) = {T₁, T₃}\n");
    assert_eq!(ok(&["modal", "--frame", "fig2", "--formula", "(.2)"]), "valid\n");
    assert_eq!(ok(&["modal", "--frame", "fig2", "--formula", "p -> <>p", "--world", "T₃"]), "valid at T₃\n");
    let json = ok(&["--json", "modal", "--frame", "fig2", "--formula", "p -> []p"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["world"], "T₁");
    assert_eq!(v["valuation"]["p"]["worlds"], serde_json::json!(["T₁", "T₃"]));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["lattice", "--ts", "buttons:3"][..],
        &["--json", "lattice", "--ts", "buttons:2"][..],
        &["modal", "--frame", "button_lattice:2", "--formula", "<>[]p -> []<>p", "--witness"][..],
        &["gen", "--name", "pruned_subframe:2"][..],
    ] {
        assert_eq!(ok(args), ok(args), "{args:?}");
    }
}

#[test]
fn finite_frames() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fpf2.json");
    ok(&["frame-gen", "--family", "fpf:2", "--out", path(&file)]);
    let out = ok(&["frame-check", "--frame", path(&file), "--props"]);
    assert!(out.contains("directed: no"), "{out}");
    assert!(ok(&["frame-check", "--frame", "fpf:1", "--formula", "(.2)"]).starts_with("falsified at ?"));
    assert_eq!(ok(&["frame-check", "--frame", "lollipop:1,1", "--formula", ".1"]), "valid\n");
    assert!(ok(&["frame-check", "--frame", "preboolean:0,2", "--formula", "(.1)"]).starts_with("falsified"));
}

#[test]
fn control_and_independence() {
    let b1 = beta(1).to_string();
    let b2 = beta(2).to_string();
    let out = ok(&["control", "--frame", "button_lattice:2", "--kind", "pure-button", "--ctl", &b1]);
    assert!(out.contains("yes"), "{out}");
    let out = ok(&["control", "--frame", "button_lattice:2", "--kind", "switch", "--ctl", &b1]);
    assert!(out.contains("no"), "{out}");
    let out = ok(&["independence", "--frame", "button_lattice:2", "--buttons", &b1, &b2]);
    assert!(out.contains("yes"), "{out}");
    let out = ok(&["independence", "--frame", "button_lattice:2", "--buttons", &b1, &b1]);
    assert!(out.contains("no"), "{out}");
    let out = ok(&[
        "independence",
        "--frame",
        "pruned_subframe:2",
        "--decisions",
        "AG !a0",
        "AG !b0",
        "--decisions",
        "AG !a1",
        "AG !b1",
    ]);
    assert!(out.contains("yes"), "{out}");
    let json = ok(&["--json", "control", "--frame", "pruned_subframe:1", "--kind", "decision", "--ctl", "AG !a0", "--partner", "AG !b0"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verdict"], true);
}

#[test]
fn labeling_files() {
    let dir = tempfile::tempdir().unwrap();
    let l = build_preboolean_labeling(&[beta(1)], &[]);
    let lf = dir.path().join("labeling.json");
    std::fs::write(&lf, serde_json::to_string(&LabelingFile::from_labeling(&l)).unwrap()).unwrap();
    let g = button_lattice(1, &Caps::default()).unwrap();
    let bundle = dir.path().join("b1.json");
    std::fs::write(&bundle, g.to_json(None)).unwrap();
    let out = ok(&["labeling", "verify", "--labeling", path(&lf), "--frame", path(&bundle)]);
    assert!(out.starts_with("valid labeling"), "{out}");

    let top = 1 - l.root;
    let f = parse_modal("<>p -> p").unwrap();
    let cm = FiniteCountermodel::new(l.frame.clone(), [("p".to_string(), [top].into())].into(), l.root, f).unwrap();
    let cf = dir.path().join("cm.json");
    std::fs::write(&cf, serde_json::to_string(&CountermodelFile::from_countermodel(&cm)).unwrap()).unwrap();
    let out = ok(&["labeling", "transfer", "--labeling", path(&lf), "--countermodel", path(&cf), "--frame", "button_lattice:1"]);
    assert!(out.contains("V(p) = {{1}}"), "{out}");
}

#[test]
fn systems_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    ok(&["gen", "--name", "fig2_s", "--out", path(&s)]);
    let part = dir.path().join("p.json");
    std::fs::write(&part, r#"[["a0", "a1", "a2"], ["b"]]"#).unwrap();
    let t3 = dir.path().join("t3.json");
    ok(&["abstract", "--ts", path(&s), "--partition-file", path(&part), "--out", path(&t3)]);
    assert!(ok(&["refines", "--coarse", path(&t3), "--fine", path(&s)]).starts_with("yes"));
    assert_eq!(ok(&["refines", "--coarse", path(&s), "--fine", path(&t3)]), "no\n");
    assert_eq!(ok(&["check-ctl", "--ts", path(&t3), "--formula", "EX b"]), "true\n");
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(cli(&["check-ctl", "--ts", "nope", "--formula", "true"]).0, EXIT_USAGE);
    assert_eq!(cli(&["check-ctl", "--ts", "fig2_s", "--formula", "EX ("]).0, EXIT_USAGE);
    assert_eq!(cli(&["check-ctl", "--ts", "fig2_s", "--formula", "zzz"]).0, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).0, EXIT_OK);
    let (code, _, err) = cli(&["lattice", "--ts", "fig1_s_trunc", "--max-states", "3"]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{err}");
    let (code, _, _) = cli(&["modal", "--frame", "fig2", "--formula", "p -> []p", "--valuation-budget", "2"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    let b1 = beta(1).to_string();
    let (code, _, _) = cli(&["independence", "--frame", "button_lattice:2", "--buttons", &b1, &b1, "--valuation-budget", "1"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    assert_eq!(cli(&["gen", "--name", "buttons:6000"]).0, EXIT_INCONCLUSIVE);
}
