//! End-to-end checks of the command-line surface: exit codes, schemas,
//! determinism, and the negative-control hook.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_poincare"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("poincare-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn verify_quick_passes_and_is_deterministic() {
    let out1 = run(&["verify", "--quick", "--seed", "3"]);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let out2 = run(&["verify", "--quick", "--seed", "3"]);
    assert_eq!(out1.stdout, out2.stdout, "reports must be byte-identical");
    let report: serde_json::Value = serde_json::from_slice(&out1.stdout).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["pass"], true);
    assert!(report["results"].as_array().unwrap().len() > 20);
}

#[test]
fn corrupted_epsilon_fails_with_named_invariant() {
    let out = run(&["verify", "--quick", "--corrupt-epsilon"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<&serde_json::Value> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["name"], "hat_is_adjoint_inverse");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("hat_is_adjoint_inverse"));
}

#[test]
fn verify_csv_format() {
    let out = run(&["verify", "--quick", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("module,name,tolerance,residual,pass"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn table_identity_spin_rep() {
    let out = run(&["table", "--what", "spin-rep", "--twice-spin", "1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &doc["matrices"][0]["matrix"];
    assert_eq!(m["rows"], 2);
    let entries = m["entries"].as_array().unwrap();
    assert_eq!(entries[0][0], 1.0);
    assert_eq!(entries[1][0], 0.0);
    assert_eq!(entries[3][0], 1.0);
}

#[test]
fn table_gamma_structure_and_sigma_count() {
    let out = run(&["table", "--what", "gamma", "--twice-spin", "1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mats = doc["matrices"].as_array().unwrap();
    assert_eq!(mats.len(), 4);
    for entry in mats {
        let m = &entry["matrix"];
        assert_eq!(m["rows"], 4);
        let e = m["entries"].as_array().unwrap();
        // diagonal blocks vanish exactly
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let v = &e[i * 4 + j];
            assert_eq!(v[0], 0.0);
            assert_eq!(v[1], 0.0);
        }
    }
    // sigma family for twice-spin 2 has C(5,3) = 10 symmetric entries x 2 families
    let out = run(&["table", "--what", "sigma", "--twice-spin", "2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["matrices"].as_array().unwrap().len(), 20);
    // invalid spin is a configuration error
    let bad = run(&["table", "--what", "sigma", "--twice-spin", "99"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bracket_emits_csv_and_verdict() {
    let base = tmp("bracket");
    let out = run(&[
        "bracket",
        "--twice-spin",
        "0",
        "--xi",
        "0.0,0.0,0.0,2.0",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    assert!(csv.starts_with("sign,eps,k00_re,k00_im"));
    assert!(csv.lines().count() >= 11); // header + 2 signs x (4 eps + extrapolated)
    let verdict: serde_json::Value =
        serde_json::from_slice(&std::fs::read(base.with_extension("json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"]["pass"], true);
    assert_eq!(
        verdict["verdict"]["rows"][0]["local_sign"],
        "commutator"
    );
    std::fs::remove_file(base.with_extension("csv")).ok();
    std::fs::remove_file(base.with_extension("json")).ok();
}

#[test]
fn bracket_near_light_cone_warns_without_verdict() {
    let out = run(&["bracket", "--twice-spin", "0", "--xi", "1.0,0.0,0.0,1.001"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let json_start = text.find("{\n").unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert!(doc["light_cone_warning"].is_string());
    assert!(doc["verdict"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("light cone"));
}

#[test]
fn mackey_builtin_reports() {
    for (name, order) in [("S3", 6u64), ("D4", 8)] {
        let out = run(&["mackey", "--group", name]);
        assert!(out.status.success());
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["pass"], true);
        assert_eq!(doc["order"], order);
        assert_eq!(doc["exact_mode"], true);
        let dims: u64 = doc["orbits"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|o| o["induced_dims"].as_array().unwrap().iter())
            .map(|d| {
                let v = d.as_u64().unwrap();
                v * v
            })
            .sum();
        assert_eq!(dims, order);
    }
}

#[test]
fn mackey_group_file_and_malformed_input() {
    // Z3 x| Z2 by inversion, written out as explicit tables
    let path = tmp("group.json");
    let tables = serde_json::json!({
        "A": [[0, 1, 2], [1, 2, 0], [2, 0, 1]],
        "H": [[0, 1], [1, 0]],
        "action": [[0, 1, 2], [0, 2, 1]],
    });
    std::fs::write(&path, serde_json::to_string(&tables).unwrap()).unwrap();
    let out = run(&["mackey", "--group-file", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["order"], 6);

    // malformed multiplication table: exit code 2 with a validation message
    let bad = serde_json::json!({
        "A": [[0, 1], [1, 1]],
        "H": [[0]],
        "action": [[0, 1]],
    });
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = run(&["mackey", "--group-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A table"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_builtin_group_is_a_config_error() {
    let out = run(&["mackey", "--group", "E8"]);
    assert_eq!(out.status.code(), Some(2));
}
