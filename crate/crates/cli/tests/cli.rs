use std::fs;
use std::path::Path;

use kuramoto3::{integrate, sync_velocity, Config, Convention, State};
use kuramoto3_cli::{analytic_report, load_config, run_command, ConfigError, RunConfig};
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    run_command(std::iter::once("kuramoto3").chain(args.iter().copied()))
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn minimal_config_gets_physical_defaults() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.json", r#"{"model":{"mu":1, "gamma":0, "alpha":0}}"#);
    let cfg = load_config(Path::new(&path)).unwrap();
    let p = cfg.params();
    assert_eq!((p.m, p.epsilon, p.mu), (1.0, 0.1, 1.0));
    assert_eq!(p.convention, Convention::ExcludeSelf);
}

#[test]
fn negative_mass_names_field() {
    match RunConfig::from_json(r#"{"model":{"m":-1}}"#) {
        Err(ConfigError::Validation { path, .. }) => assert_eq!(path, "model.m"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_keys_rejected_with_path() {
    for (json, want) in [
        (r#"{"model":{"mass":1}}"#, "model"),
        (r#"{"integrator":{"steps":1}}"#, "integrator"),
        (r#"{"classifier":{"tol":1}}"#, "classifier"),
        (r#"{"extra":1}"#, ""),
    ] {
        match RunConfig::from_json(json) {
            Err(ConfigError::Validation { path, reason }) => {
                assert!(path.starts_with(want), "{json}: {path}");
                assert!(reason.contains("unknown field"), "{reason}");
            }
            other => panic!("{json}: {other:?}"),
        }
    }
}

#[test]
fn bad_config_file_exits_one() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#"{"model":{"m":-1}}"#);
    assert_eq!(run(&["analytic", "--config", &bad]), 1);
    let broken = write_config(dir.path(), "broken.json", "{");
    assert_eq!(run(&["analytic", "--config", &broken]), 1);
    assert_eq!(run(&["analytic", "--config", "/nonexistent/x.json"]), 1);
    assert_eq!(run(&["analytic", "--alpha", "4"]), 1);
    assert_eq!(run(&["nonsense"]), 1);
}

#[test]
fn literal_convention_misses_the_sync_formula() {
    let json = r#"{"model":{"mu":1, "gamma":0.5, "alpha":0.5, "convention":"Literal"}}"#;
    let cfg = RunConfig::from_json(json).unwrap();
    let p = cfg.params();
    assert_eq!(p.convention, Convention::Literal);
    let traj = integrate(&State::new([0.01, -0.02, 0.0], [0.0; 3]), &p, &Config::new(0.01, 300.0, 100.0, 10)).unwrap();
    let s = kuramoto3::classifier::summarize_all(&traj).unwrap();
    let ws = sync_velocity(&p);
    assert!((s.mean_freq[0] - ws).abs() > 0.1, "{:?} vs {ws}", s.mean_freq);
    // The same run under the default convention matches.
    let p = p.with_convention(Convention::ExcludeSelf);
    let traj = integrate(&State::new([0.01, -0.02, 0.0], [0.0; 3]), &p, &Config::new(0.01, 300.0, 100.0, 10)).unwrap();
    let s = kuramoto3::classifier::summarize_all(&traj).unwrap();
    assert!((s.mean_freq[0] - ws).abs() < 1e-6);
}

#[test]
fn analytic_zero_velocity_line() {
    let cfg = RunConfig::from_json(r#"{"model":{"mu":1, "gamma":-6, "alpha":0.3}}"#).unwrap();
    let v = analytic_report(&cfg).unwrap();
    assert!(v["sync_velocity"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["boundaries"].as_array().unwrap().len(), 3);
    // γ < −3μ here, so synchrony is unstable.
    let sync = v["eigenvalues"]["sync"].as_array().unwrap();
    assert_eq!(sync.len(), 6);
    assert!(sync[0][0].as_f64().unwrap() > 0.0);
    assert_eq!(run(&["analytic", "--mu", "1", "--gamma", "-6", "--alpha", "0.3"]), 0);
}

#[test]
fn analytic_phase_locked_branch() {
    let cfg = RunConfig::from_json(r#"{"model":{"mu":0.5, "gamma":-3}}"#).unwrap();
    let v = analytic_report(&cfg).unwrap();
    let delta = v["phase_locked"]["delta"].as_f64().unwrap();
    assert!((delta.abs() - ((9.0 * 0.5 - 3.0) / 6.0f64).acos()).abs() < 1e-9);
    let cfg = RunConfig::from_json(r#"{"model":{"mu":2, "gamma":-3}}"#).unwrap();
    assert!(analytic_report(&cfg).unwrap()["phase_locked"].is_null());
}

#[test]
fn uncoupled_simulation_decays_exponentially() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"command":{"simulate":{"theta0":[0,1,2],"omega0":[1,-0.5,0.25]}},
            "integrator":{"t_transient":0,"t_measure":20,"record_stride":10}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    assert_eq!(header, "t,theta1,theta2,theta3,omega1,omega2,omega3");
    assert_eq!(rows.len(), 201);
    for r in &rows {
        let decay = (-0.1 * r[0]).exp();
        for (k, w0) in [1.0, -0.5, 0.25].into_iter().enumerate() {
            assert!((r[4 + k] - w0 * decay).abs() < 1e-9, "t={} {}", r[0], r[4 + k]);
            // θ = θ0 + (m/ε) ω0 (1 − e^{−εt/m}), unwrapped.
            let theta = k as f64 + 10.0 * w0 * (1.0 - decay);
            assert!((r[1 + k] - theta).abs() < 1e-9);
        }
    }
}

#[test]
fn trajectory_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let code = run(&[
        "simulate", "--mu", "1", "--gamma", "-0.5", "--alpha", "0.7", "--t-transient", "3", "--t-measure", "10",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(v.to_string(), field);
        }
    }
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["simulate", "--t-transient", "0", "--t-measure", "2", "--out", out];
    assert_eq!(run(&args), 0);
    let before = fs::read(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(run(&[&args[..], &["--seed", "5"]].concat()), 1);
    assert_eq!(fs::read(dir.path().join("trajectory.csv")).unwrap(), before);
    assert_eq!(run(&[&args[..], &["--seed", "5", "--force"]].concat()), 0);
    assert_ne!(fs::read(dir.path().join("trajectory.csv")).unwrap(), before);
}

#[test]
fn stiff_run_blows_up_with_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model":{"m":0.001,"mu":1},"integrator":{"dt":0.1,"t_transient":0,"t_measure":100}}"#,
    );
    assert_eq!(run(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]), 2);
}

#[test]
fn scan_outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model":{"alpha":1.6},
            "integrator":{"t_transient":50,"t_measure":50},
            "command":{"scan":{"mu_min":-1,"mu_max":1,"gamma_min":-1,"gamma_max":1,"n_mu":4,"n_gamma":3,"n_ics":2}}}"#,
    );
    let mut outputs = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(name);
        let code = run(&["scan", "--config", &cfg, "--jobs", jobs, "--seed", "7", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        outputs.push((fs::read(out.join("scan.csv")).unwrap(), fs::read(out.join("scan.ppm")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12);
    assert!(csv.starts_with("mu,gamma,"));
    assert!(csv.lines().next().unwrap().ends_with(",blowup_count"));
    let ppm = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert!(ppm.starts_with("P3\n4 3\n255\n"));
}

#[test]
fn bifurcate_reports_hysteresis() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model":{"mu":0,"gamma":3},
            "integrator":{"t_transient":1000,"t_measure":500},
            "command":{"bifurcate":{"axis":"alpha","start":0,"end":1.8,"n_steps":37,"initial":"splay"}}}"#,
    );
    let out = dir.path().join("b");
    assert_eq!(run(&["bifurcate", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("hysteresis.json")).unwrap()).unwrap();
    let intervals = report["intervals"].as_array().unwrap();
    assert!(!intervals.is_empty());
    for iv in intervals {
        let (a, b) = (iv[0].as_f64().unwrap(), iv[1].as_f64().unwrap());
        assert!(0.0 < a && a < b && b < std::f64::consts::FRAC_PI_2);
    }
    let up = fs::read_to_string(out.join("branch_up.csv")).unwrap();
    let down = fs::read_to_string(out.join("branch_down.csv")).unwrap();
    assert_eq!(up.lines().count(), 38);
    assert_eq!(down.lines().count(), 38);
    assert!(up.contains(",RotatingWave,") && up.contains(",PhaseLocked21,"));
}

#[test]
fn verify_subset_and_unknown_criterion() {
    assert_eq!(run(&["verify", "--only", "3,11"]), 0);
    assert_eq!(run(&["verify", "--only", "12"]), 1);
}
