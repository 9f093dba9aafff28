mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use mfglab::cli::{load_instance, load_profile};

const FIG1A: &str = r#"{"K1_over_rho": 1, "barL": 0.08, "L1K1_over_rho": 0.04, "beta": 0.9, "barK": 0.2}"#;

fn mfglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfglab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn spectrum_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("fig1a.json");
    std::fs::write(&prof, FIG1A).unwrap();
    let out = dir.path().join("out");
    let o = mfglab(&["spectrum", "--profile", p(&prof), "--tmin", "5", "--tmax", "50", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("T,rho_det,rho_power,gershgorin,asym_lower,asym_upper\n5,"));
    assert_eq!(csv.lines().count(), 11);
    assert!(out.join("spectrum.json").exists());

    // a rerun gives the same bytes
    let again = dir.path().join("again");
    let o = mfglab(&["spectrum", "--profile", p(&prof), "--tmin", "5", "--tmax", "50", "--out", p(&again)]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(out.join("spectrum.csv")).unwrap(), std::fs::read(again.join("spectrum.csv")).unwrap());

    let prof = load_profile(&prof).unwrap();
    assert!((mfglab::contraction::horizon_independent_bound(&prof) - 1.0).abs() < 1e-12);
}

#[test]
fn generate_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let o = mfglab(&["generate", "--states", "4", "--actions", "3", "--seed", "1", "--out", p(&inst)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let loaded = load_instance(&inst).unwrap();
    assert_eq!((loaded.n_states, loaded.n_actions), (4, 3));

    let o = mfglab(&["solve-finite", "--instance", p(&inst), "--T", "8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sol = mfglab::equilibrium::MfeSolution::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(sol.measures.len(), 9);

    let out = dir.path().join("sol");
    let o = mfglab(&["solve-stationary", "--instance", p(&inst), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("solution_stationary.json").exists());

    let o = mfglab(&["solve-finite", "--instance", p(&inst), "--T", "8", "--method", "q-iteration", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("solution_finite.json").exists());
}

#[test]
fn nonconvergence_names_the_radius() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("congestion.json");
    congestion(0.02).save(&inst).unwrap();
    let o = mfglab(&["solve-stationary", "--instance", p(&inst), "--max-iter", "500"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("infinite radius"), "{}", stderr(&o));

    let o = mfglab(&["stationary-study", "--instance", p(&inst), "--T-ref", "40", "--out", p(dir.path())]);
    assert_eq!(code(&o), 4);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_states": 1}"#).unwrap();
    let o = mfglab(&["solve-finite", "--instance", p(&bad), "--T", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.json"));

    let o = mfglab(&["solve-finite", "--instance", p(&dir.path().join("missing.json")), "--T", "3"]);
    assert_eq!(code(&o), 2);

    let prof = dir.path().join("prof.json");
    std::fs::write(&prof, r#"{"K1_over_rho": 1, "barL": 0.08}"#).unwrap();
    let o = mfglab(&["spectrum", "--profile", p(&prof), "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);

    assert_eq!(code(&mfglab(&["frobnicate"])), 2);
    assert_eq!(code(&mfglab(&[])), 2);
    assert_eq!(code(&mfglab(&["--help"])), 0);
}

#[test]
fn analyze_and_studies_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    mfglab::model::make_contractive_instance(4, 3, 1, mfglab::model::Target::InfiniteHorizon)
        .unwrap()
        .save(&inst)
        .unwrap();
    let out = dir.path().join("out");
    let o = mfglab(&["analyze", "--instance", p(&inst), "--tmax", "20", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("report.csv").exists() && out.join("report.json").exists());

    let o = mfglab(&["stationary-study", "--instance", p(&inst), "--T-ref", "60", "--out", p(&out)]);
    assert!(out.join("stationary_study.csv").exists(), "{}", stderr(&o));

    let o = mfglab(&["perturb-study", "--instance", p(&inst), "--instance-b", p(&inst), "--T", "20", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("perturb_study.csv").exists());

    let o = mfglab(&[
        "horizon-study", "--instance", p(&inst), "--tmin", "6", "--tmax", "20", "--step", "2", "--out", p(&out),
    ]);
    assert!(out.join("horizon_study.csv").exists(), "{}", stderr(&o));
}
