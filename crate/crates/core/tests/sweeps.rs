use std::f64::consts::{FRAC_PI_2, PI};

use kuramoto3::scan::ScanResult;
use kuramoto3::*;

fn small_grid(mu: (f64, f64), gamma: (f64, f64), n: usize, n_ics: usize) -> ScanGrid {
    ScanGrid {
        mu_min: mu.0,
        mu_max: mu.1,
        gamma_min: gamma.0,
        gamma_max: gamma.1,
        n_mu: n,
        n_gamma: n,
        alpha: 0.0,
        n_ics,
        seed: 3,
    }
}

fn run_scan(grid: &ScanGrid, cfg: &Config) -> ScanResult {
    scan_plane(grid, &Params::new(0.0, 0.0, grid.alpha), cfg, &ClassifierTolerances::default(), 0).unwrap()
}

#[test]
fn sync_cell_in_zero_lag_scan() {
    let res = run_scan(&small_grid((0.0, 1.0), (-1.0, 0.0), 2, 4), &Config::new(0.01, 300.0, 100.0, 10));
    let cell = res.cell(1, 1);
    assert_eq!((cell.mu, cell.gamma), (1.0, 0.0));
    assert!(cell.labels().contains(&StateTag::SyncFixedPoint));
}

#[test]
fn splay_and_sync_coexist_above_both_lines() {
    let res = run_scan(&small_grid((0.0, 0.2), (3.5, 4.0), 2, 10), &Config::new(0.01, 300.0, 100.0, 10));
    let cell = res.cell(1, 1);
    assert_eq!((cell.mu, cell.gamma), (0.2, 4.0));
    let labels = cell.labels();
    assert!(labels.contains(&StateTag::Splay) && labels.contains(&StateTag::SyncFixedPoint), "{labels:?}");
    assert!(cell.is_coexistence());
}

#[test]
fn uncoupled_cell_comes_to_rest() {
    let res = run_scan(&small_grid((0.0, 1.0), (0.0, 1.0), 2, 5), &Config::new(0.01, 300.0, 100.0, 10));
    let c = res.cell(0, 0);
    assert_eq!((c.mu, c.gamma), (0.0, 0.0));
    assert_eq!(c.total(), 5);
    // No forcing: every run freezes wherever damping leaves it.
    for tag in c.labels() {
        assert!(matches!(tag, StateTag::SyncFixedPoint | StateTag::Splay | StateTag::Antipodal21 | StateTag::Unclassified));
    }
}

#[test]
fn mu_sweep_detached_difference_falls_from_pi() {
    let spec = SweepSpec {
        n_steps: 41,
        cfg: Config::new(0.01, 300.0, 100.0, 10),
        initial: Some(State::antipodal(2)),
        ..SweepSpec::new(SweepAxis::Mu, -1.0, 1.5, Params::new(-1.0, -3.0, 0.0))
    };
    let branch = sweep(&spec).unwrap();
    let mut last = PI + 1e-9;
    for r in branch.records.iter().filter(|r| r.label.tag == StateTag::PhaseLocked21) {
        let delta = r.label.delta.unwrap().abs();
        assert!(delta < last, "delta not decreasing at mu = {}", r.param);
        assert!((delta - ((9.0 * r.param - 3.0) / 6.0).acos()).abs() < 5e-3);
        last = delta;
    }
    assert!(last < 0.5);
}

#[test]
fn alpha_sweep_loses_rotating_wave_near_quarter_turn() {
    let spec = SweepSpec {
        n_steps: 37,
        cfg: Config::new(0.01, 1000.0, 500.0, 10),
        initial: Some(State::splay()),
        ..SweepSpec::new(SweepAxis::Alpha, 0.0, 1.8, Params::new(0.0, 3.0, 0.0))
    };
    let up = sweep(&spec).unwrap();
    let first_locked = up.records.iter().find(|r| r.label.tag == StateTag::PhaseLocked21).unwrap();
    assert!((first_locked.param - FRAC_PI_2).abs() < 0.1);
    assert!((first_locked.label.delta.unwrap().abs() - 2.0 * PI / 3.0).abs() < 0.05);
    assert!(up.records[1..].iter().take_while(|r| r.param < 1.5).all(|r| r.label.tag == StateTag::RotatingWave));
}

#[test]
fn sync_rotation_steps_match_formula() {
    let spec = SweepSpec {
        n_steps: 11,
        cfg: Config::new(0.01, 300.0, 100.0, 10),
        initial: Some(State::sync(0.0)),
        ..SweepSpec::new(SweepAxis::Alpha, 0.1, 1.2, Params::new(1.0, 1.0, 0.1))
    };
    let branch = sweep(&spec).unwrap();
    for r in &branch.records {
        assert_eq!(r.label.tag, StateTag::SyncRotation);
        let ws = sync_velocity(&spec.params_at(r.param));
        assert!(r.summary.unwrap().mean_freq.iter().all(|f| (f - ws).abs() < 1e-3));
    }
    // Single attractor: the reverse sweep retraces the labels.
    let back = sweep(&SweepSpec { initial: branch.records.last().map(|r| r.state), ..spec.reversed() }).unwrap();
    let mut tags = back.tags();
    tags.reverse();
    assert_eq!(tags, branch.tags());
    assert!(detect_hysteresis(&branch, &back, &spec.tol).unwrap().is_empty());
}

#[test]
fn chimera_jumps_to_synchrony_on_down_sweep() {
    let spec = SweepSpec {
        n_steps: 65,
        cfg: Config::new(0.01, 500.0, 500.0, 10),
        seed: 1,
        ..SweepSpec::new(SweepAxis::Alpha, 1.6, 0.0, Params::new(1.0, -0.5, 1.6))
    };
    let b = sweep(&spec).unwrap();
    let tags = b.tags();
    assert!(tags[0].is_chimera());
    let first_sync = tags.iter().position(|t| t.is_sync()).unwrap();
    assert!(tags[first_sync - 1].is_chimera(), "{:?}", &tags[first_sync.saturating_sub(3)..=first_sync]);
    assert!(tags[first_sync..].iter().all(|t| t.is_sync()));
}
