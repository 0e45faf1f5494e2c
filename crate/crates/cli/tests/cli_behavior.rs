//! End-to-end checks of the command line: report schema, exit codes, and
//! the worked outputs, all through the real binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclink"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn base_config() -> &'static str {
    concat!(
        "seed = 42\n",
        "[spec]\n",
        "a = [2, 2, 2]\n",
        "b = [1, 1, 1]\n",
        "[grid]\n",
        "t = [0.0, 0.5, 1.0]\n",
        "r = [1.0]\n",
        "eta = [0.001, 0.01, 1e6]\n",
        "s = [-0.05, 0.0, 0.05, 0.1]\n",
        "samples_per_cell = 10\n",
    )
}

fn read_report(path: &Path) -> (String, Value) {
    let text = std::fs::read_to_string(path).unwrap();
    let value = serde_json::from_str(&text).unwrap();
    (text, value)
}

#[test]
fn weights_report_matches_the_hand_worked_system() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = dir.path().join("weights.json");
    let status = bin().arg("weights").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let (text, rep) = read_report(&out);
    // Top-level field order is part of the report contract.
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("version") < pos("config"));
    assert!(pos("config") < pos("command"));
    assert!(pos("command") < pos("results"));
    assert!(pos("results") < pos("summary"));

    assert_eq!(rep["command"], "weights");
    assert_eq!(rep["config"]["seed"], 42);
    let rows = rep["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["polar"]["weights"], json!([1, 1, 1]));
        assert_eq!(row["polar"]["degree"], 3);
    }
    // Radial systems only exist at the endpoints, with different degrees.
    assert_eq!(rows[0]["radial"]["weights"], json!([1, 1, 1]));
    assert_eq!(rows[0]["radial"]["degree"], 5);
    assert!(rows[1].get("radial").is_none());
    assert_eq!(rows[2]["radial"]["degree"], 3);
    assert_eq!(rows[1]["simplicial"], false);
    assert_eq!(rows[2]["full"], true);

    assert_eq!(rep["summary"]["det_nm"], 9);
    assert_eq!(rep["summary"]["graph"], json!(["cycle[0,1,2]"]));
    assert_eq!(rep["summary"]["violations"], json!([]));
    assert_eq!(rep["summary"]["pass"], true);
}

#[test]
fn assumption_violations_are_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.toml",
        "seed = 1\n[spec]\na = [1, 1]\nb = [1, 1]\n[grid]\nt = [0.5]\n",
    );
    let out = dir.path().join("weights.json");
    let status = bin().arg("weights").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(1), "a failed check is a math failure, not a usage error");

    let (_, rep) = read_report(&out);
    let violations = rep["summary"]["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert!(violations[0].as_str().unwrap().contains("assumption (b)"));
    assert_eq!(rep["summary"]["pass"], false);
}

#[test]
fn config_problems_exit_with_the_usage_code() {
    let dir = tempfile::tempdir().unwrap();

    // Malformed TOML.
    let broken = write_config(dir.path(), "broken.toml", "seed = [not toml\n");
    let out = bin().arg("weights").arg("--config").arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "parse diagnostics should name the line: {err}");

    // Unknown key.
    let unknown = write_config(dir.path(), "unknown.toml", "seed = 1\nbogus = 3\n[spec]\na = [2, 2]\nb = [1, 1]\n");
    let status = bin().arg("weights").arg("--config").arg(&unknown).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Missing --config entirely.
    let status = bin().arg("weights").status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Invalid spec under strict validation.
    let bad = write_config(dir.path(), "bad.toml", "seed = 1\n[spec]\na = [1, 1]\nb = [0, 0]\n[grid]\nt = [0.0]\nr = [1.0]\n");
    let status = bin().arg("certify").arg("--config").arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Empty grid for a command that needs one.
    let empty = write_config(dir.path(), "empty.toml", "seed = 1\n[spec]\na = [2, 2, 2]\nb = [1, 1, 1]\n");
    let status = bin().arg("certify").arg("--config").arg(&empty).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn seed_override_is_echoed_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = bin().arg("weights").arg("--config").arg(&cfg).arg("--seed").arg("7").output().unwrap();
    assert!(out.status.success());
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["config"]["seed"], 7);
}

#[test]
fn the_out_flag_wins_without_changing_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_out = dir.path().join("from-config.json");
    let body = format!("out = \"{}\"\n{}", cfg_out.display(), base_config());
    let cfg = write_config(dir.path(), "run.toml", &body);

    let status = bin().arg("weights").arg("--config").arg(&cfg).status().unwrap();
    assert!(status.success());
    let via_config = std::fs::read(&cfg_out).unwrap();
    std::fs::remove_file(&cfg_out).unwrap();

    let flag_out = dir.path().join("from-flag.json");
    let status = bin().arg("weights").arg("--config").arg(&cfg).arg("--out").arg(&flag_out).status().unwrap();
    assert!(status.success());
    assert!(!cfg_out.exists(), "--out must fully replace the config path");
    let via_flag = std::fs::read(&flag_out).unwrap();

    // The destination is not echoed, so the bytes cannot depend on it.
    assert_eq!(via_config, via_flag);
}

#[test]
fn certify_emits_the_record_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = dir.path().join("certify.json");
    let status = bin().arg("certify").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let (_, rep) = read_report(&out);
    let cells = rep["results"].as_array().unwrap();
    assert_eq!(cells.len(), 3);
    let rec = cells[0]["records"][0].as_object().unwrap();
    let mut keys: Vec<&str> = rec.keys().map(|s| s.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        vec!["dr_ds", "nullity", "pass", "r", "radial_derivative", "sigma_min", "t", "w_im", "w_re"]
    );
    assert_eq!(rec["w_re"].as_array().unwrap().len(), 3);
    assert!(rec["sigma_min"].as_f64().unwrap() > 0.0);
    assert!(rec["radial_derivative"].as_f64().unwrap() > 0.0);
    assert_eq!(rec["pass"], true);

    let summary = &rep["summary"];
    assert_eq!(summary["all_pass"], true);
    assert_eq!(summary["vacuous"], false);
    assert_eq!(summary["disagreements"], 0);
    assert!(summary["records"].as_u64().unwrap() > 0);
}

#[test]
fn trace_rows_satisfy_the_scaling_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = dir.path().join("trace.json");
    let status = bin()
        .arg("trace")
        .arg("--config")
        .arg(&cfg)
        .arg("--t")
        .arg("0.5")
        .arg("--r")
        .arg("1.2")
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let (_, rep) = read_report(&out);
    let rows = rep["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["converged"], true);
        assert!(row["residual"].as_f64().unwrap() < 1e-8);
    }
    // s = 0 is the base point itself: all scaling radii are 1.
    let base = &rows[1];
    assert_eq!(base["s"], 0.0);
    for radius in base["radii"].as_array().unwrap() {
        assert!((radius.as_f64().unwrap() - 1.0).abs() <= 1e-12);
    }
    assert_eq!(rep["summary"]["all_converged"], true);
    assert_eq!(rep["summary"]["points"], 4);
}

#[test]
fn trace_with_an_empty_grid_emits_an_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.toml",
        "seed = 3\n[spec]\na = [2, 2, 2]\nb = [1, 1, 1]\n[grid]\ns = []\n",
    );
    let out = bin().arg("trace").arg("--config").arg(&cfg).arg("--t").arg("0.3").arg("--r").arg("1.0").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["results"], json!([]));
    assert_eq!(rep["summary"]["points"], 0);
}

#[test]
fn torus_map_reproduces_the_worked_example_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = dir.path().join("tm.json");
    let status = bin().arg("torus-map").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let (_, rep) = read_report(&out);
    let rows = rep["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);

    let mixed = &rows[0];
    assert_eq!(mixed["t"], 0.0);
    assert_eq!(
        mixed["exponents"],
        json!([["17/9", "-4/9", "2/9"], ["2/9", "17/9", "-4/9"], ["-4/9", "2/9", "17/9"]])
    );
    assert_eq!(mixed["verdict"], "non-extendable");
    let negatives = mixed["negatives"].as_array().unwrap();
    assert_eq!(negatives.len(), 3);
    for neg in negatives {
        assert_eq!(neg["value"], "-4/9");
    }
    assert!(mixed["fiber_residual"].as_f64().unwrap() <= 1e-10);

    let holo = &rows[1];
    assert_eq!(holo["t"], 1.0);
    assert_eq!(holo["exponents"], json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]));
    assert_eq!(holo["verdict"], "extendable");
    assert_eq!(holo["negatives"], json!([]));

    assert_eq!(rep["summary"]["pass"], true);
}

#[test]
fn torus_map_surfaces_construction_failures() {
    let dir = tempfile::tempdir().unwrap();
    // Relaxed so the spec loads; the mixed member is then rank deficient.
    let cfg = write_config(
        dir.path(),
        "run.toml",
        "seed = 1\n[spec]\na = [1, 1]\nb = [1, 1]\nrelaxed = true\n",
    );
    let out = bin().arg("torus-map").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rank deficient"), "stderr: {err}");
}

#[test]
fn eta0_keeps_the_passing_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", base_config());
    let out = dir.path().join("eta0.json");
    let status = bin().arg("eta0").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let (_, rep) = read_report(&out);
    let rows = rep["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        // The absurd top level is unattainable on the unit sphere, so it
        // passes vacuously and the whole grid is a passing prefix.
        let probes = row["probes"].as_array().unwrap();
        assert_eq!(probes.len(), 3);
        assert_eq!(probes[0]["vacuous"], false);
        assert!(probes[0]["converged"].as_u64().unwrap() > 0);
        assert_eq!(probes[2]["vacuous"], true);
        assert_eq!(row["eta0"], 1e6);
    }
    assert_eq!(rep["summary"]["all_pass"], true);
    assert_eq!(rep["summary"]["min_eta0"], 1e6);
}
