use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn branchwise(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchwise"))
        .args(args)
        .env("BRANCHWISE_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn run_config(out: &Path, name: &str) -> Output {
    let path = config(name);
    branchwise(out, &["run", "--config", path.to_str().unwrap()])
}

fn results(out: &Path, scenario: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{scenario}_results.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn canonical_photon_config_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "photon.json");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("photon_report.txt")).unwrap();
    assert_eq!(report, String::from_utf8(o.stdout).unwrap());
    assert!(report.contains("verdict            EXACT"));
    let r = results(dir.path(), "photon");
    assert_eq!(r["schema_version"], 1);
    let branches = r["results"]["final_branches"].as_array().unwrap();
    assert_eq!(branches.len(), 2);
    assert_eq!(branches[0]["energy"], 2.0);
    assert_eq!(branches[1]["energy"], 12.0);
    assert_eq!(branches[1]["apparatus_excitations"], 10.0);
}

#[test]
fn counterexample_fuzz_with_exact_assertion_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "fuzz_counterexample.json");
    assert_eq!(o.status.code(), Some(1));
    let r = results(dir.path(), "fuzz");
    let cat = &r["results"]["categories"]["AVERAGE_ONLY"];
    assert_eq!(cat["count"], 100);
    assert!(cat["min_max_leakage"].as_f64().unwrap() >= 0.1);
    assert_eq!(r["assertion"]["passed"], false);
}

#[test]
fn conserving_fuzz_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = branchwise(dir.path(), &["fuzz", "--dims", "2..=12", "--seeds", "0..100", "--family", "conserving", "--assert", "EXACT"]);
    assert_eq!(o.status.code(), Some(0));
    let cat = &results(dir.path(), "fuzz")["results"]["categories"]["EXACT"];
    assert_eq!(cat["count"], 100);
    assert!(cat["max_commutator_defect"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn negative_length_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "bad_box.json");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("parameters.box_length"), "{err}");
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn empty_seed_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = branchwise(dir.path(), &["fuzz", "--dims", "2..4", "--seeds", "5..5", "--family", "conserving"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("empty"));
}

#[test]
fn bad_arguments_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(branchwise(dir.path(), &["fuzz", "--family", "sideways"]).status.code(), Some(2));
    assert_eq!(branchwise(dir.path(), &["run", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn box_csv_override_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweeps/box.csv");
    let cfg = config("box.json");
    let o = branchwise(dir.path(), &["run", "--config", cfg.to_str().unwrap(), "--csv", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["m", "probability", "energy"]);
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2000);
    let total: f64 = rows.iter().map(|r| r[1]).sum();
    assert!((total - 1.0).abs() < 1e-6);
}

#[test]
fn tolerance_flags_reach_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("equivalence.json");
    let o = branchwise(dir.path(), &["run", "--config", cfg.to_str().unwrap(), "--tol-exact", "1e-6", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let r = results(dir.path(), "equivalence");
    assert_eq!(r["tolerances"]["exact_tol"], 1e-6);
    assert_eq!(r["seed"], 9);
}

/// Every number in the human report's key/value lines matches the machine
/// output to six significant digits.
#[test]
fn report_agrees_with_results() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_config(dir.path(), "box.json").status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("box_report.txt")).unwrap();
    let r = &results(dir.path(), "box")["results"];
    let field = |label: &str| -> f64 {
        let line = report.lines().find(|l| l.trim_start().starts_with(label)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    for (label, key) in [
        ("mean energy before", "mean_energy_before"),
        ("mean energy after", "mean_energy_after"),
        ("relative error", "energy_relative_error"),
        ("tail mass", "tail_mass"),
    ] {
        let machine = r[key].as_f64().unwrap();
        let human = field(label);
        assert!((machine - human).abs() <= 5e-6 * machine.abs(), "{label}: {human} vs {machine}");
    }
    assert_eq!(field("most probable m"), r["most_probable_m"].as_f64().unwrap());

    assert_eq!(run_config(dir.path(), "beamsplitter.json").status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("beamsplitter_report.txt")).unwrap();
    let r = results(dir.path(), "beamsplitter");
    let verdict = r["results"]["path_conservation"]["verdict"].as_str().unwrap();
    assert!(report.contains(&format!("verdict            {verdict}")));
}
