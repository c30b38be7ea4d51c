//! End-to-end runs of the `chronon` binary.

use std::path::Path;
use std::process::{Command, Output};

fn chronon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chronon")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compile_writes_grid_and_netlist() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.circ");
    std::fs::write(&circuit, "wires 3\nCNOT 2 1\n").unwrap();
    let out = dir.path().join("run");
    let o = chronon(&["compile", "--circuit", circuit.to_str().unwrap(), "--m", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    for f in ["grid.json", "netlist.json", "netlist.csv", "report.json"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS ")));
}

#[test]
fn config_kind_is_replaced_by_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "kind = \"spectrum\"\nm = 2\nout = \"toy\"\n\n[params]\ndelta = 1.0\ng = 0.1\n").unwrap();
    let o = chronon(&["demo-toy", "--config", cfg.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let toy = Path::new(dir.path()).join("toy");
    assert!(toy.join("toy.csv").is_file());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(toy.join("report.json")).unwrap()).unwrap();
    assert!(report.to_string().contains("demo_toy"));
}

#[test]
fn bad_input_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.circ");
    let o = chronon(&["spectrum", "--circuit", missing.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
