use std::fs;
use std::path::{Path, PathBuf};

use ikwave_core::diagnostics::{fmt_f64, read_csv, write_csv, DiagnosticsRecord, DiagnosticsSeries};
use ikwave_core::dispersion::{
    expected_error_exponent, geomspace, linspace, pade_reference, tanh_over_x, DispersionMatrices,
    PhaseSpeedCurve,
};
use ikwave_core::evolution::{construct_initial_data, run_simulation, InitialDataReport};
use ikwave_core::io::write_state;
use ikwave_core::{ExecPolicy, Exponents, Model, Scenario, State};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Relative tolerance for the initial-data elliptic solve.
pub const INIT_TOL: f64 = 1e-10;

pub struct ScenarioArgs<'a> {
    pub config: Option<&'a Path>,
    pub preset: Option<&'a str>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
}

/// Resolves the scenario and the bytes its hash is taken over.
///
/// A previous `manifest.json` is accepted as a config file and replays its
/// resolved configuration.
pub fn load_scenario(args: &ScenarioArgs) -> CliResult<(Scenario, Vec<u8>)> {
    let (mut scenario, input) = match (args.config, args.preset) {
        (Some(path), None) => {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            let value: serde_json::Value = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let body = match value.get("config") {
                Some(cfg) if value.get("tool").is_some() => cfg.clone(),
                _ => value,
            };
            let s: Scenario = serde_json::from_value(body)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            (s, bytes)
        }
        (None, Some(name)) => {
            let s = Scenario::preset(name)?;
            let bytes = s.to_json().into_bytes();
            (s, bytes)
        }
        (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
        (Some(_), Some(_)) => return Err(CliError::Config("--config and --preset are exclusive".into())),
    };
    if let Some(seed) = args.seed {
        scenario.reseed(seed);
    }
    if let Some(eps) = args.epsilon {
        scenario.evolution.epsilon = eps;
    }
    scenario.validate()?;
    Ok((scenario, input))
}

fn prepare_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn scenario_value(s: &Scenario) -> serde_json::Value {
    serde_json::to_value(s).expect("scenario serializes")
}

fn state_bytes(state: &State) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_state(&mut buf, state)?;
    Ok(buf)
}

fn initial_state(scenario: &Scenario) -> CliResult<(Model, State, InitialDataReport)> {
    let model = scenario.build_model()?;
    let (eta, surf) = scenario.initial_fields(&model)?;
    let (state, report) = construct_initial_data(&model, eta, &surf, INIT_TOL)?;
    Ok((model, state, report))
}

pub struct DispersionArgs<'a> {
    pub p: &'a [u32],
    pub mu_max: f64,
    pub points: usize,
    pub fit: bool,
    pub out: Option<&'a Path>,
}

#[derive(Serialize)]
struct DispersionConfig<'a> {
    p: &'a [u32],
    mu_max: f64,
    points: usize,
    fit: bool,
}

/// `c²/(gh)` columns against `μ = kh`, plus an optional error-exponent fit.
pub fn dispersion(args: &DispersionArgs) -> CliResult<String> {
    let p = Exponents::new(args.p.to_vec())?;
    if !(args.mu_max.is_finite() && args.mu_max > 0.0) {
        return Err(CliError::Config(format!(
            "--mu-max must be positive, got {}",
            args.mu_max
        )));
    }
    if args.points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let mats = DispersionMatrices::new(&p);
    let pade = pade_reference(p.n()).ok();

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(["mu", "c2_ik", "c2_ww", "c2_pade", "abs_error"])
        .map_err(csv_err)?;
    for mu in linspace(0.0, args.mu_max, args.points) {
        let ik = mats.normalized_speed_sq(mu);
        let ww = tanh_over_x(mu);
        let pd = pade.as_ref().map_or(f64::NAN, |r| r.eval_mu(mu));
        let row = [mu, ik, ww, pd, (ik - ww).abs()].map(fmt_f64);
        w.write_record(&row).map_err(csv_err)?;
    }
    let csv_bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;

    let mut summary = Vec::new();
    if pade.is_none() {
        summary.push(format!("pade reference unavailable for N = {}", p.n()));
    }
    if args.fit {
        let hi = args.mu_max.min(0.2);
        let curve = PhaseSpeedCurve::sample(&p, geomspace(hi / 10.0, hi, 40), ExecPolicy::default());
        let expected = expected_error_exponent(&p).map_or("n/a".to_string(), |e| format!("{e}"));
        let max_err = curve
            .model
            .iter()
            .zip(&curve.reference)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        match curve.error_exponent((hi / 10.0, hi)) {
            Ok(slope) => summary.push(format!(
                "fitted error exponent: {slope:.4} (expected {expected}, max |error| in window {})",
                fmt_f64(max_err)
            )),
            Err(e) => summary.push(format!("fitted error exponent: unavailable ({e})")),
        }
    }

    if let Some(out) = args.out {
        prepare_out(out)?;
        let cfg = DispersionConfig {
            p: args.p,
            mu_max: args.mu_max,
            points: args.points,
            fit: args.fit,
        };
        let value = serde_json::to_value(&cfg).expect("config serializes");
        let input = serde_json::to_vec(&value).expect("config serializes");
        let mut manifest = RunManifest::new("dispersion", &input, value);
        manifest.emit(out, "dispersion.csv", &csv_bytes)?;
        if !summary.is_empty() {
            manifest.emit(out, "summary.txt", (summary.join("\n") + "\n").as_bytes())?;
        }
        manifest.write(out)?;
        Ok(summary.join("\n"))
    } else {
        let mut text = String::from_utf8(csv_bytes).expect("csv is utf-8");
        for line in &summary {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        Ok(text)
    }
}

#[derive(Serialize)]
struct InitReportFile<'a> {
    tolerance: f64,
    compatible: bool,
    #[serde(flatten)]
    report: &'a InitialDataReport,
}

pub fn init(args: &ScenarioArgs, out: &Path) -> CliResult<String> {
    let (scenario, input) = load_scenario(args)?;
    let (_, state, report) = initial_state(&scenario)?;
    prepare_out(out)?;
    let compatible = report.compatibility.iter().all(|&c| c <= INIT_TOL);
    let file = InitReportFile {
        tolerance: INIT_TOL,
        compatible,
        report: &report,
    };
    let mut manifest = RunManifest::new("init", &input, scenario_value(&scenario));
    manifest.emit(out, "state.ikfd", &state_bytes(&state)?)?;
    let text = serde_json::to_string_pretty(&file).expect("report serializes") + "\n";
    manifest.emit(out, "init_report.json", text.as_bytes())?;
    manifest.write(out)?;
    let worst = report.compatibility.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(format!(
        "initial data: {} iterations, max compatibility residual {}, trace defect {}",
        report.solve.iterations,
        fmt_f64(worst),
        fmt_f64(report.trace_defect)
    ))
}

pub struct RunArgs<'a> {
    pub scenario: ScenarioArgs<'a>,
    pub out: &'a Path,
    pub snapshots: bool,
}

fn series_summary(series: &DiagnosticsSeries) -> String {
    format!(
        "records {}, max |drift| {}, max R~ {}, min a {}",
        series.records.len(),
        fmt_f64(series.max_abs_drift()),
        fmt_f64(series.max_r_tilde()),
        fmt_f64(series.min_a())
    )
}

pub fn run(args: &RunArgs) -> CliResult<String> {
    let (scenario, input) = load_scenario(&args.scenario)?;
    let (model, state, _) = initial_state(&scenario)?;
    prepare_out(args.out)?;

    let mut snapshots: Vec<Vec<u8>> = Vec::new();
    let take = args.snapshots;
    let mut sink = |_: &DiagnosticsRecord, s: &State| -> ikwave_core::Result<()> {
        if take {
            let mut buf = Vec::new();
            write_state(&mut buf, s)?;
            snapshots.push(buf);
        }
        Ok(())
    };
    let result = run_simulation(&model, &state, &scenario.evolution, &mut sink);
    let (series, last, steps) = match &result {
        Ok(sum) => (&sum.series, &sum.final_state, Some(sum.steps)),
        Err(abort) => (&abort.series, &abort.last_state, None),
    };

    let mut manifest = RunManifest::new("run", &input, scenario_value(&scenario));
    let mut csv_bytes = Vec::new();
    write_csv(&series.records, model.n(), &mut csv_bytes)?;
    manifest.emit(args.out, "diagnostics.csv", &csv_bytes)?;
    manifest.emit(args.out, "final_state.ikfd", &state_bytes(last)?)?;
    for (k, bytes) in snapshots.iter().enumerate() {
        manifest.emit(args.out, &format!("snapshot_{k:05}.ikfd"), bytes)?;
    }
    manifest.write(args.out)?;

    let summary = series_summary(series);
    match (result, steps) {
        (Ok(_), Some(steps)) => Ok(format!("run finished after {steps} steps: {summary}")),
        (Err(abort), _) => {
            eprintln!("{summary}");
            Err(CliError::from(abort))
        }
        (Ok(_), None) => unreachable!(),
    }
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub records: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub max_abs_drift: f64,
    pub min_h: f64,
    pub min_a: f64,
    pub max_r: Vec<f64>,
    pub max_r_tilde: Vec<f64>,
}

fn column_max(records: &[DiagnosticsRecord], get: impl Fn(&DiagnosticsRecord) -> &[f64]) -> Vec<f64> {
    let width = records.first().map_or(0, |r| get(r).len());
    (0..width)
        .map(|i| records.iter().map(|r| get(r)[i]).fold(0.0, f64::max))
        .collect()
}

pub fn analyze(csv_path: &Path, out: Option<&PathBuf>) -> CliResult<String> {
    let file = fs::File::open(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let records = read_csv(file)?;
    let (first, last) = match (records.first(), records.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(CliError::Config(format!("{} has no records", csv_path.display()))),
    };
    let analysis = Analysis {
        records: records.len(),
        t_start: first.t,
        t_end: last.t,
        energy_initial: first.energy,
        energy_final: last.energy,
        max_abs_drift: records.iter().map(|r| r.drift.abs()).fold(0.0, f64::max),
        min_h: records.iter().map(|r| r.min_h).fold(f64::INFINITY, f64::min),
        min_a: records.iter().map(|r| r.min_a).fold(f64::INFINITY, f64::min),
        max_r: column_max(&records, |r| &r.r),
        max_r_tilde: column_max(&records, |r| &r.r_tilde),
    };
    let text = serde_json::to_string_pretty(&analysis).expect("analysis serializes") + "\n";
    if let Some(out) = out {
        prepare_out(out)?;
        let bytes = fs::read(csv_path).map_err(|e| CliError::io(csv_path, e))?;
        let config = serde_json::json!({ "input": csv_path.display().to_string() });
        let mut manifest = RunManifest::new("analyze", &bytes, config);
        manifest.emit(out, "analysis.json", text.as_bytes())?;
        manifest.write(out)?;
    }
    Ok(text.trim_end().to_string())
}
