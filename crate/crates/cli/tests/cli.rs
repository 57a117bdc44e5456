use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fockflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockflux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_single_suite_passes_and_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = fockflux(&["verify", "--suite", "coherent-eigen", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "verify");
    assert_eq!(m["seed"], 3);
    assert_eq!(m["passed"], true);
    assert!(m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["tag"] == "coherent-eigenrelation"));
    assert!(out.join("coherent_eigen.csv").exists());
}

#[test]
fn unknown_suite_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = fockflux(&["verify", "--suite", "nope", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("suite"));
}

#[test]
fn oscillator_sweep_matches_reference() {
    let dir = TempDir::new().unwrap();
    let o = fockflux(&["discrepancy", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("discrepancy.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let (value, cf, direct) = (col("value"), col("closed_form_re"), col("direct_re"));
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let m: f64 = rec[value].parse().unwrap();
        let expected = -(m - 1.0) / 2.0;
        assert!((rec[cf].parse::<f64>().unwrap() - expected).abs() < 1e-8);
        assert!((rec[direct].parse::<f64>().unwrap() - expected).abs() < 1e-8);
        n += 1;
    }
    assert_eq!(n, 3);
}

#[test]
fn malformed_hamiltonian_reports_position() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"discrepancy","hamiltonian":"0.5*pi1^2 + * phi1","observables":["phi1*pi1"],
            "state":{"phi":[1.0],"pi":[0.0]},"cutoff":16}"#,
    );
    let o = fockflux(&["discrepancy", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("hamiltonian"), "{e}");
    assert!(e.contains("position") || e.contains("column") || e.contains("offset"), "{e}");
}

#[test]
fn empty_observables_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"iee","hamiltonian":"0.5*pi1^2 + 0.5*phi1^2","observables":[],
            "ensemble":{"circle":{"points":8,"radius":1.0}},"cutoff":16}"#,
    );
    let o = fockflux(&["iee", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("observables"));
}

#[test]
fn config_for_another_subcommand_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment":"reify"}"#);
    let o = fockflux(&["project", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("experiment"));
}

#[test]
fn amplitude_overflow_is_numerical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"evolve","hamiltonian":"0.5*pi1^2 + 0.5*phi1^2","observables":["phi1"],
            "state":{"phi":[6.0],"pi":[0.0]},"cutoff":16,"t":0.1,"dt":0.01}"#,
    );
    let o = fockflux(&["evolve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn iee_violation_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"iee","hamiltonian":"0.5*pi1^2 + phi1^2","observables":["phi1*pi1"],
            "ensemble":{"circle":{"points":32,"radius":1.0}},"cutoff":24}"#,
    );
    let o = fockflux(&["iee", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = fockflux(&["verify", "--suite", "discrepancy-closed-form", "--seed", "11", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let f = "discrepancy_closed_form.csv";
    assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    let other = TempDir::new().unwrap();
    fockflux(&["verify", "--suite", "discrepancy-closed-form", "--seed", "12", "--out", other.path().to_str().unwrap()]);
    assert_ne!(fs::read(a.path().join(f)).unwrap(), fs::read(other.path().join(f)).unwrap());
}

#[test]
fn reify_writes_trace_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"reify","state":{"phi":[0.0],"pi":[1.4142135623730951]},"cutoffs":[16,24],
            "alpha_points":8,"threshold":10.0,"eps":[0.1]}"#,
    );
    let o = fockflux(&["reify", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("reify_trace.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "alpha,norm,cutoff,residual_A7,residual_A8,c,d");
    assert_eq!(text.lines().count(), 1 + 16);
    assert!(dir.path().join("paradox.csv").exists());
}
