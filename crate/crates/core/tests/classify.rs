use kuramoto3::scan::random_state_from_seed;
use kuramoto3::*;

fn label_from(seed: u64, p: &Params, cfg: &Config) -> StateLabel {
    let traj = integrate(&random_state_from_seed(seed), p, cfg).unwrap();
    classify(&summarize_all(&traj).unwrap(), &ClassifierTolerances::default())
}


#[test]
fn sync_rotation_matches_formula() {
    let p = Params::new(1.0, 3.0, 0.1);
    let traj = integrate(&State::new([0.1, -0.1, 0.0], [0.0; 3]), &p, &Config::new(0.01, 500.0, 200.0, 10)).unwrap();
    let s = summarize_all(&traj).unwrap();
    for f in s.mean_freq {
        assert!((f - sync_velocity(&p)).abs() < 1e-3);
    }
    assert_eq!(classify(&s, &ClassifierTolerances::default()).tag, StateTag::SyncRotation);
}

#[test]
fn attractive_pairs_at_zero_lag_rest_in_sync() {
    let p = Params::new(1.0, 0.0, 0.0);
    let cfg = Config::new(0.01, 500.0, 100.0, 10);
    for seed in 0..5 {
        assert_eq!(label_from(seed, &p, &cfg).tag, StateTag::SyncFixedPoint);
    }
}

#[test]
fn repulsive_pairs_at_zero_lag_splay() {
    let p = Params::new(-1.0, 0.0, 0.0);
    let cfg = Config::new(0.01, 500.0, 100.0, 10);
    for seed in 0..5 {
        assert_eq!(label_from(seed, &p, &cfg).tag, StateTag::Splay);
    }
}

#[test]
fn weak_repulsion_past_quarter_lag_rotates_in_sync() {
    let p = Params::new(-0.01, -0.01, 1.6);
    let cfg = Config::new(0.01, 6000.0, 200.0, 10);
    let l = label_from(1, &p, &cfg);
    assert_eq!(l.tag, StateTag::SyncRotation);
    assert!((l.mean_velocity - sync_velocity(&p)).abs() < 1e-3);
}

#[test]
fn switching_detected_at_reference_point() {
    let p = Params::new(-4.5, -3.0, 0.1);
    let traj = integrate(&random_state_from_seed(500), &p, &Config::new(0.01, 1000.0, 5000.0, 10)).unwrap();
    let r = detect_switching(&traj, &ClassifierTolerances::default()).unwrap();
    assert_eq!(r.tag, StateTag::SwitchingRotChimera);
    assert!(r.alternations >= 3);
}
