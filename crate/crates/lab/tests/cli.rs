use std::path::{Path, PathBuf};
use std::process::Command;

use framelet_core::DominanceClass;
use framelet_lab::config::ThetaValue;
use framelet_lab::io::{format_signal, parse_trace};
use framelet_lab::{
    energy_report, format_sweep, run_config, run_sweep, Experiment, ExperimentConfig, LabError,
    SweepParameter,
};

const BIN: &str = env!("CARGO_BIN_EXE_framelet-lab");

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn cycle_config(lambda_w: f64) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "graph": {{"kind": "cycle", "n": 6}},
            "scheme": {{"kind": "spatial_framelet"}},
            "weights": {{"mode": "scalar", "lambda_w": {lambda_w}}},
            "init": {{"mode": "random_normal", "seed": 7, "channels": 1}},
            "run": {{"steps": 20000}}
        }}"#
    ))
    .unwrap()
}

#[test]
fn bundled_configs_validate() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg =
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        Experiment::build(&cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = cycle_config(10.0);
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn high_lambda_w_cycle_is_hfd() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&cycle_config(10.0), dir.path()).unwrap();
    let v = out.verdict.unwrap();
    assert_eq!(v.class, DominanceClass::Hfd);
    assert!((v.limit_value - 1.0).abs() <= 1e-3);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["verdict"]["class"], "HFD");
    assert_eq!(summary["regime"]["prediction"]["class"], "HFD");
    assert!((summary["rho_l"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn low_lambda_w_cycle_is_lfd() {
    let dir = tempfile::tempdir().unwrap();
    let v = run_config(&cycle_config(0.5), dir.path())
        .unwrap()
        .verdict
        .unwrap();
    assert_eq!(v.class, DominanceClass::Lfd);
    assert!(v.limit_value <= 1e-6);
}

#[test]
fn trace_file_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&cycle_config(10.0), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let records = parse_trace(&text).unwrap();
    assert_eq!(records.len(), out.trace.rows.len());
    for (rec, row) in records.iter().zip(&out.trace.rows) {
        assert_eq!(rec.dirichlet_normalized, row.dirichlet_normalized);
        assert_eq!(rec.norm, row.norm);
    }
}

#[test]
fn unnormalized_run_has_no_verdict() {
    let mut cfg = cycle_config(0.5);
    cfg.run.renormalize = false;
    cfg.run.steps = 20;
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&cfg, dir.path()).unwrap();
    assert!(out.verdict.is_none());
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("\"verdict\": null"));
}

#[test]
fn identical_configs_give_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = ExperimentConfig::load(&configs_dir().join("activated_relu.json")).unwrap();
    run_config(&cfg, a.path()).unwrap();
    run_config(&cfg, b.path()).unwrap();
    for file in ["trace.csv", "summary.json"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn sweep_rows_follow_grid_order_for_any_job_count() {
    let cfg = cycle_config(1.0);
    let grid = [10.0, 0.25, 2.0, 0.5];
    let serial = run_sweep(&cfg, SweepParameter::LambdaW, &grid, Some(1)).unwrap();
    let parallel = run_sweep(&cfg, SweepParameter::LambdaW, &grid, Some(4)).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial.iter().map(|r| r.value).collect::<Vec<_>>(), grid);
    assert_eq!(format_sweep(&serial), format_sweep(&parallel));
}

#[test]
fn identity_weight_sweep_is_a_degenerate_tie() {
    // g(λ) = 1 − λ has |g(0)| = |g(2)| on C_6.
    let rows = run_sweep(&cycle_config(1.0), SweepParameter::LambdaW, &[1.0], None).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].degenerate);
    assert_eq!(rows[0].predicted, Some(DominanceClass::Mixed));
}

#[test]
fn spectral_theta_sweep_phase_structure() {
    let cfg = ExperimentConfig::load(&configs_dir().join("spectral_theta_sweep.json")).unwrap();
    let rows = run_sweep(
        &cfg,
        SweepParameter::Theta,
        &[0.0, 0.5, 1.0, 2.0, 4.0],
        None,
    )
    .unwrap();
    let measured: Vec<_> = rows.iter().map(|r| r.measured).collect();
    use DominanceClass::*;
    assert_eq!(measured, [Lfd, Lfd, Mixed, Hfd, Hfd]);
    assert!(rows[2].degenerate);
}

#[test]
fn sweep_rejects_bad_requests() {
    let cfg = cycle_config(1.0);
    assert!(matches!(
        run_sweep(&cfg, SweepParameter::LambdaW, &[], None),
        Err(LabError::ConfigParse(_))
    ));
    assert!(matches!(
        run_sweep(&cfg, SweepParameter::Theta, &[1.0], None),
        Err(LabError::ConfigParse(_))
    ));
    assert!(matches!(
        run_sweep(&cfg, SweepParameter::Epsilon, &[1.0], None),
        Err(LabError::ConfigParse(_))
    ));
}

#[test]
fn zero_steps_is_a_config_error() {
    let mut cfg = cycle_config(1.0);
    cfg.run.steps = 0;
    assert!(matches!(cfg.validate(), Err(LabError::ConfigParse(_))));
}

#[test]
fn theta_shorthand_and_explicit_keys() {
    let mut cfg = ExperimentConfig::load(&configs_dir().join("spectral_theta_sweep.json")).unwrap();
    cfg.framelet.scales = 2.try_into().unwrap();
    let theta = cfg.theta.as_mut().unwrap();
    theta.insert("1,2".into(), ThetaValue::Vector(vec![0.5; 6]));
    let exp = Experiment::build(&cfg).unwrap();
    let t = &exp.weights.theta;
    assert_eq!(t.len(), 3);
    assert!(t.values().next().unwrap().iter().all(|&v| v == 1.0));
    assert!(t[&"1,1".parse().unwrap()].iter().all(|&v| v == 4.0));
    assert!(t[&"1,2".parse().unwrap()].iter().all(|&v| v == 0.5));
    assert!(exp.prediction().unwrap().is_none());
}

#[test]
fn energy_report_matches_dirichlet_on_identity_weights() {
    let cfg = cycle_config(1.0);
    let exp = Experiment::build(&cfg).unwrap();
    let report = energy_report(&exp, &exp.h0).unwrap();
    let bands: f64 = report.band_dirichlet.as_ref().unwrap().values().sum();
    assert!((bands - report.dirichlet).abs() <= 1e-10);
    // Ω = W = I makes the total framelet energy the Dirichlet energy.
    assert!((report.total_framelet - report.dirichlet).abs() <= 1e-9);
    let particles: f64 = report
        .particles
        .as_ref()
        .unwrap()
        .values()
        .map(|p| p.total)
        .sum();
    assert!((particles - report.total_framelet).abs() <= 1e-9);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn binary_is_deterministic_under_seed_override() {
    let config = configs_dir().join("cycle_lfd.json");
    let config = config.to_str().unwrap();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, seed) in dirs.iter().zip(["5", "5", "6"]) {
        let out = cli(&[
            "run",
            "--config",
            config,
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
    assert_ne!(read(&dirs[0]), read(&dirs[2]));
}

#[test]
fn binary_exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"graph\": 1}").unwrap();
    let missing = dir.path().join("missing.json");
    let out = dir.path().to_str().unwrap();

    let parse = cli(&["run", "--config", bad.to_str().unwrap(), "--out", out]);
    let io = cli(&["run", "--config", missing.to_str().unwrap(), "--out", out]);
    assert_eq!(parse.status.code(), Some(2));
    assert_eq!(io.status.code(), Some(3));

    let signal = dir.path().join("h.csv");
    std::fs::write(&signal, "1,2\n3\n").unwrap();
    let config = configs_dir().join("cycle_hfd.json");
    let bad_signal = cli(&[
        "energy",
        "--config",
        config.to_str().unwrap(),
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert_eq!(bad_signal.status.code(), Some(4));
    assert!(!bad_signal.stderr.is_empty());
}

#[test]
fn binary_gen_energy_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let config = configs_dir().join("cycle_hfd.json");
    let config = config.to_str().unwrap();

    assert!(cli(&["gen", "--config", config, "--out", out])
        .status
        .success());
    let edges = std::fs::read_to_string(dir.path().join("graph.txt")).unwrap();
    let graph = framelet_core::parse_edge_list(&edges).unwrap();
    assert_eq!(graph.n(), 6);

    let exp = Experiment::build(&ExperimentConfig::load(Path::new(config)).unwrap()).unwrap();
    let signal = dir.path().join("h.csv");
    std::fs::write(&signal, format_signal(&exp.h0)).unwrap();
    let energy = cli(&[
        "energy",
        "--config",
        config,
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert!(energy.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("energy.json")).unwrap())
            .unwrap();
    assert!(report["dirichlet"].as_f64().unwrap() > 0.0);

    assert!(cli(&["run", "--config", config, "--out", out])
        .status
        .success());
    let trace = dir.path().join("trace.csv");
    let classify = cli(&[
        "classify",
        "--config",
        config,
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert!(classify.status.success());
    assert_eq!(String::from_utf8_lossy(&classify.stdout).trim(), "HFD");
}

#[test]
fn binary_sweep_reads_grid_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs_dir().join("lambda_w_sweep.json");
    let out = cli(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--param",
        "lambda_w",
        "--grid",
        "-0.5,10",
        "--jobs",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("-0.5,LFD,LFD,"));
    assert!(lines[2].starts_with("10,HFD,HFD,"));
}
