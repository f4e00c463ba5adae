use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ikwave_core::diagnostics::read_csv;
use ikwave_core::io::read_snapshot;
use ikwave_core::scenario::preset;
use ikwave_core::{BottomProfile, FieldSpec};

fn ikwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ikwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_scenario(dir: &Path, name: &str, edit: impl FnOnce(&mut ikwave_core::Scenario)) -> String {
    let mut s = preset("variable-bottom").unwrap();
    edit(&mut s);
    let file = dir.join(name);
    fs::write(&file, s.to_json()).unwrap();
    file.to_str().unwrap().to_string()
}

#[test]
fn dispersion_table_matches_the_closed_form() {
    let o = ikwave(&["dispersion", "--p", "0,2", "--mu-max", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["mu", "c2_ik", "c2_ww", "c2_pade", "abs_error"]
    );
    let mut rows = 0;
    for rec in rd.records() {
        let v: Vec<f64> = rec.unwrap().iter().map(|s| s.parse().unwrap()).collect();
        let s = v[0] * v[0];
        let want = (1.0 + s / 15.0) / (1.0 + 2.0 * s / 5.0);
        assert!((v[1] - want).abs() <= 1e-13, "mu = {}", v[0]);
        assert!((v[3] - want).abs() <= 1e-13);
        assert!((v[4] - (v[1] - v[2]).abs()).abs() <= 1e-15);
        rows += 1;
    }
    assert_eq!(rows, 201);
}

#[test]
fn single_exponent_is_a_config_error() {
    let o = ikwave(&["dispersion", "--p", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exponent"));
    assert_eq!(ikwave(&["dispersion", "--p", "1,2"]).status.code(), Some(2));
    assert_eq!(
        ikwave(&["dispersion", "--p", "0,2", "--mu-max", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fit_summary_reports_slope_six() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&["dispersion", "--p", "0,2", "--fit", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    let slope: f64 = line
        .split("fitted error exponent: ")
        .nth(1)
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 6.0).abs() <= 0.3, "{line}");
    for f in ["dispersion.csv", "summary.txt", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn zero_surface_trace_gives_zero_potentials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "zero.json", |s| s.init.phi_surface = FieldSpec::Zero);
    let out = dir.path().join("init");
    let o = ikwave(&["init", "--config", &cfg, "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let snap = read_snapshot(fs::File::open(out.join("state.ikfd")).unwrap()).unwrap();
    assert_eq!(snap.fields.len(), 4);
    assert!(snap.fields[0].iter().any(|&v| v != 0.0));
    assert!(snap.fields[1..].iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn init_report_is_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&["init", "--preset", "gaussian-hump", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("init_report.json")).unwrap()).unwrap();
    let tol = report["tolerance"].as_f64().unwrap();
    let compat = report["compatibility"].as_array().unwrap();
    assert!(!compat.is_empty());
    assert!(compat.iter().all(|c| c.as_f64().unwrap() <= tol));
    assert_eq!(report["compatible"], true);
}

#[test]
fn negative_depth_is_rejected_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "deep.json", |s| {
        s.bottom = BottomProfile::Sinusoidal {
            amplitude: 1.5,
            mode: vec![1],
            phase: 0.0,
        }
    });
    let out = dir.path().join("init");
    let o = ikwave(&["init", "--config", &cfg, "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"physics\": 1}").unwrap();
    assert_eq!(ikwave(&["run", "--config", path(&bad)]).status.code(), Some(2));
    assert_eq!(ikwave(&["run"]).status.code(), Some(2));
}

#[test]
fn rest_run_has_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&["run", "--preset", "flat-rest", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = read_csv(fs::File::open(dir.path().join("diagnostics.csv")).unwrap()).unwrap();
    assert!(recs.len() > 1);
    for r in &recs {
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.drift, 0.0);
        assert!(r.r.iter().chain(&r.r_tilde).all(|&v| v == 0.0));
    }
}

#[test]
fn standing_wave_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&["run", "--preset", "standing-wave", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = read_csv(fs::File::open(dir.path().join("diagnostics.csv")).unwrap()).unwrap();
    let drift = recs.iter().map(|r| r.drift.abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-6, "{drift:e}");
}

#[test]
fn guard_abort_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&["run", "--preset", "adversarial-sign", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("min a = -"), "{}", stderr(&o));
    let recs = read_csv(fs::File::open(dir.path().join("diagnostics.csv")).unwrap()).unwrap();
    assert!(recs.last().unwrap().min_a < 0.0);

    let o = ikwave(&[
        "run",
        "--preset",
        "adversarial-collapse",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("depth collapsed"));
}

#[test]
fn identical_manifests_reproduce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "short.json", |s| {
        s.evolution.t_end = 0.2;
        s.evolution.output_stride = 4;
    });
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for out in [&a, &b] {
        let o = ikwave(&["run", "--config", &cfg, "--out", path(out), "--snapshots"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let manifest_a = fs::read(a.join("manifest.json")).unwrap();
    assert_eq!(manifest_a, fs::read(b.join("manifest.json")).unwrap());
    let o = ikwave(&[
        "run",
        "--config",
        path(&a.join("manifest.json")),
        "--out",
        path(&c),
        "--snapshots",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let manifest: serde_json::Value = serde_json::from_slice(&manifest_a).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    let snaps = outputs
        .iter()
        .filter(|e| e["file"].as_str().unwrap().starts_with("snapshot_"))
        .count();
    let recs = read_csv(fs::File::open(a.join("diagnostics.csv")).unwrap()).unwrap();
    assert_eq!(snaps, recs.len());
    for entry in outputs {
        let file = entry["file"].as_str().unwrap();
        let bytes = fs::read(a.join(file)).unwrap();
        assert_eq!(bytes, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(bytes, fs::read(c.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn seed_and_epsilon_overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = ikwave(&[
        "init",
        "--preset",
        "variable-bottom",
        "--seed",
        "7",
        "--epsilon",
        "0.001",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "init");
    assert_eq!(m["config"]["evolution"]["epsilon"], 0.001);
    assert_eq!(m["config"]["init"]["phi_surface"]["seed"], 7);
    assert_eq!(m["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_reads_back_the_run_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "short.json", |s| s.evolution.t_end = 0.1);
    let run = dir.path().join("run");
    assert!(ikwave(&["run", "--config", &cfg, "--out", path(&run)])
        .status
        .success());
    let csv = run.join("diagnostics.csv");
    let recs = read_csv(fs::File::open(&csv).unwrap()).unwrap();

    let out = dir.path().join("analysis");
    let o = ikwave(&["analyze", path(&csv), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(a["records"].as_u64().unwrap() as usize, recs.len());
    assert_eq!(a["t_end"].as_f64().unwrap(), recs.last().unwrap().t);
    assert_eq!(a["energy_initial"].as_f64().unwrap(), recs[0].energy);
    let drift = recs.iter().map(|r| r.drift.abs()).fold(0.0, f64::max);
    assert_eq!(a["max_abs_drift"].as_f64().unwrap(), drift);
    assert_eq!(a["max_r_tilde"].as_array().unwrap().len(), 2);
    assert!(out.join("analysis.json").exists());

    let junk = dir.path().join("junk.csv");
    fs::write(&junk, "t,E\n1,2\n").unwrap();
    assert_eq!(ikwave(&["analyze", path(&junk)]).status.code(), Some(2));
}
