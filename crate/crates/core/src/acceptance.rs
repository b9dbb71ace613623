//! End-to-end acceptance checks. Each criterion simulates, measures and
//! compares against a pinned tolerance, returning a one-line report.
//!
//! Runtimes assume an optimised build; the whole suite takes a few minutes
//! on one core.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::{
    classify, cycle_period, detect_switching, peak_sequence, summarize_all, ClassifierTolerances, StateTag,
};
use crate::continuation::{detect_hysteresis, sweep, BifurcationBranch, SweepAxis, SweepSpec};
use crate::integrator::{evolve, integrate, rk4_step, IntegratorConfig};
use crate::model::{phase_locked_offset, rhs, sync_velocity, ModelParams, PhaseState};
use crate::scan::{random_state_from_seed, scan_plane, write_scan_csv, ScanGrid};
use crate::stability::{jacobian_eigen, max_real_excluding_symmetry};

/// |measured − ω_s| bound for synchronous rotation.
pub const SYNC_FREQ_TOL: f64 = 1e-3;
/// Minimum `3μ + γ` of the sampled synchrony points.
pub const SYNC_REGION_MARGIN: f64 = 0.3;
/// |mean_freq| bound on the zero-velocity line.
pub const ZERO_VELOCITY_TOL: f64 = 1e-3;
/// Distance of a located eigenvalue sign change from its reference line.
pub const BOUNDARY_GAMMA_TOL: f64 = 0.02;
/// |δ − arccos((9μ−3)/6)| on the phase-locked interval.
pub const DELTA_TOL: f64 = 5e-3;
/// Distance of located phase-locked endpoints from μ = −1/3 and μ = 1.
pub const ENDPOINT_MU_TOL: f64 = 0.02;
/// Initial conditions that must show switching, out of ten.
pub const SWITCHING_MIN_RUNS: usize = 7;
/// Distance of the rotating-wave loss from α = π/2.
pub const RW_LOSS_ALPHA_TOL: f64 = 0.05;
/// Intermediate steps tolerated between chimera and synchrony.
pub const JUMP_MAX_INTERMEDIATE: usize = 1;
/// Final velocity differences under repulsive coupling.
pub const GLOBAL_SYNC_TOL: f64 = 1e-6;
/// Chimera share of non-blow-up cells in the α = 1.6 scan.
pub const CHIMERA_MIN_FRACTION: f64 = 0.5;
/// Accepted step-halving error ratio for a fourth-order method.
pub const RK4_RATIO_RANGE: (f64, f64) = (12.0, 20.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

fn report(id: u8, title: &'static str, passed: bool, detail: String) -> CriterionReport {
    CriterionReport {
        id,
        title,
        passed,
        detail,
    }
}

pub type CriterionFn = fn() -> CriterionReport;

/// All criteria in order.
pub const CRITERIA: [(u8, CriterionFn); 11] = [
    (1, sync_velocity_formula),
    (2, zero_velocity_line),
    (3, stability_lines),
    (4, phase_locked_branch),
    (5, switching_state),
    (6, hysteresis),
    (7, chimera_jump),
    (8, global_sync_repulsive),
    (9, chimera_dominance),
    (10, peak_sequences),
    (11, numerics),
];

/// Runs the criteria whose ids are in `only` (all when empty).
pub fn run(only: &[u8]) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .filter(|(id, _)| only.is_empty() || only.contains(id))
        .map(|(_, f)| f())
        .collect()
}

fn near(s: &PhaseState<f64>, rng: &mut ChaCha8Rng, amp: f64) -> PhaseState<f64> {
    let mut out = *s;
    for i in 0..3 {
        out.theta[i] += rng.gen_range(-amp..amp);
        out.omega[i] += rng.gen_range(-amp..amp);
    }
    out
}

fn fmt_err(e: impl fmt::Display) -> String {
    format!("run failed: {e}")
}

/// Sync rotation velocity over 50 points of the synchrony region.
pub fn sync_velocity_formula() -> CriterionReport {
    const TITLE: &str = "synchronous velocity formula";
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = IntegratorConfig::new(0.01, 500.0, 100.0, 10);
    let tol = ClassifierTolerances::default();
    let mut worst = 0.0f64;
    let mut sampled = 0;
    let mut non_sync = 0;
    while sampled < 50 {
        let alpha = [0.1, 0.5, 1.0][sampled % 3];
        let (mu, gamma) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        // Keep clear of the boundary, where the basin is thin and
        // relaxation slow.
        if 3.0 * mu + gamma < SYNC_REGION_MARGIN {
            continue;
        }
        let p = ModelParams::new(mu, gamma, alpha);
        let eig = match jacobian_eigen(&PhaseState::new([0.0; 3], [sync_velocity(&p); 3]), &p) {
            Ok(e) => e,
            Err(e) => return report(1, TITLE, false, fmt_err(e)),
        };
        if max_real_excluding_symmetry(&eig) > -1e-3 {
            continue;
        }
        sampled += 1;
        let s0 = near(&PhaseState::sync(0.0), &mut rng, 0.05);
        let traj = match integrate(&s0, &p, &cfg) {
            Ok(t) => t,
            Err(e) => return report(1, TITLE, false, fmt_err(e)),
        };
        let s = summarize_all(&traj).expect("window long enough");
        let ws = sync_velocity(&p);
        for f in s.mean_freq {
            worst = worst.max((f - ws).abs());
        }
        if !classify(&s, &tol).tag.is_sync() {
            non_sync += 1;
        }
    }
    report(
        1,
        TITLE,
        worst < SYNC_FREQ_TOL,
        format!("50 points, max |f - ws| = {worst:.2e} (tol {SYNC_FREQ_TOL:.0e}); {non_sync} not labelled sync"),
    )
}

/// Zero common velocity on γ = −6μ at α = 0.1.
pub fn zero_velocity_line() -> CriterionReport {
    const TITLE: &str = "zero-velocity line";
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = IntegratorConfig::new(0.01, 1000.0, 100.0, 10);
    let tol = ClassifierTolerances::default();
    let mut worst = 0.0f64;
    let mut labels_ok = true;
    let mut tags = Vec::new();
    for k in 1..=10 {
        let mu = -0.1 * k as f64;
        let p = ModelParams::new(mu, -6.0 * mu, 0.1);
        let s0 = near(&PhaseState::sync(0.0), &mut rng, 0.05);
        let traj = match integrate(&s0, &p, &cfg) {
            Ok(t) => t,
            Err(e) => return report(2, TITLE, false, fmt_err(e)),
        };
        let s = summarize_all(&traj).expect("window long enough");
        worst = s.mean_freq.iter().fold(worst, |w, f| w.max(f.abs()));
        let tag = classify(&s, &tol).tag;
        labels_ok &= tag.is_sync();
        tags.push(tag);
    }
    tags.dedup();
    report(
        2,
        TITLE,
        worst < ZERO_VELOCITY_TOL && labels_ok,
        format!("max |f| = {worst:.2e} (tol {ZERO_VELOCITY_TOL:.0e}); labels {tags:?}"),
    )
}

fn growth(state: &PhaseState<f64>, p: &ModelParams<f64>) -> Result<f64, String> {
    jacobian_eigen(state, p).map(|e| max_real_excluding_symmetry(&e)).map_err(fmt_err)
}

/// Bisects the sign change of the leading growth rate in γ on
/// `[line − 0.5, line + 0.5]`.
fn crossing(state: &PhaseState<f64>, mu: f64, line: f64) -> Result<Option<f64>, String> {
    let g = |gamma: f64| growth(state, &ModelParams::new(mu, gamma, 0.0));
    let (mut lo, mut hi) = (line - 0.5, line + 0.5);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo.signum() == ghi.signum() {
        return Ok(None);
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if g(mid)?.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Eigenvalue sign changes across γ = −3μ (sync) and γ = 1.5μ (splay).
pub fn stability_lines() -> CriterionReport {
    const TITLE: &str = "stability boundaries at alpha = 0";
    let mut worst = 0.0f64;
    let mut missing = Vec::new();
    for mu in [-1.0, 1.0] {
        for (name, state, line) in [
            ("sync", PhaseState::sync(0.0), -3.0 * mu),
            ("splay", PhaseState::splay(), 1.5 * mu),
        ] {
            match crossing(&state, mu, line) {
                Ok(Some(g)) => worst = worst.max((g - line).abs()),
                Ok(None) => missing.push(format!("{name}@mu={mu}")),
                Err(e) => return report(3, TITLE, false, e),
            }
        }
    }
    report(
        3,
        TITLE,
        missing.is_empty() && worst < BOUNDARY_GAMMA_TOL,
        format!("max |dgamma| = {worst:.2e} (tol {BOUNDARY_GAMMA_TOL}); no sign change: {missing:?}"),
    )
}

fn pl_delta_oracle(mu: f64) -> f64 {
    ((9.0 * mu - 3.0) / 6.0).clamp(-1.0, 1.0).acos()
}

/// The 2+1 phase-locked branch along μ at γ = −3, α = 0.
pub fn phase_locked_branch() -> CriterionReport {
    const TITLE: &str = "2+1 phase-locked branch";
    let spec = SweepSpec {
        n_steps: 201,
        cfg: IntegratorConfig::new(0.01, 300.0, 100.0, 10),
        initial: Some(PhaseState::antipodal(2)),
        ..SweepSpec::new(SweepAxis::Mu, -1.0, 1.5, ModelParams::new(-1.0, -3.0, 0.0))
    };
    let branch = match sweep(&spec) {
        Ok(b) => b,
        Err(e) => return report(4, TITLE, false, fmt_err(e)),
    };
    let pl: Vec<_> = branch
        .records
        .iter()
        .filter(|r| r.label.tag == StateTag::PhaseLocked21)
        .collect();
    let Some((first, last)) = pl.first().zip(pl.last()) else {
        return report(4, TITLE, false, "no PhaseLocked21 steps".into());
    };
    let worst = pl
        .iter()
        .map(|r| (r.label.delta.unwrap_or(f64::NAN).abs() - pl_delta_oracle(r.param)).abs())
        .fold(0.0f64, f64::max);
    let h = (spec.end - spec.start) / (spec.n_steps - 1) as f64;
    let (lo, hi) = (first.param - 0.5 * h, last.param + 0.5 * h);
    let contiguous = pl.len() == ((last.param - first.param) / h).round() as usize + 1;
    let end_err = (lo + 1.0 / 3.0).abs().max((hi - 1.0).abs());

    // Mirrored starts must reach both rotation directions.
    let probe = ModelParams::new(0.3, -3.0, 0.0);
    let branch0 = phase_locked_offset(&probe).expect("inside the locked interval");
    let cfg = IntegratorConfig::new(0.01, 300.0, 100.0, 10);
    let tol = ClassifierTolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut velocities = Vec::new();
    for b in [branch0, branch0.mirrored()] {
        let s0 = near(&b.state_at(0.0), &mut rng, 0.02);
        match integrate(&s0, &probe, &cfg) {
            Ok(t) => {
                let l = classify(&summarize_all(&t).expect("window long enough"), &tol);
                velocities.push((l.tag, l.mean_velocity));
            }
            Err(e) => return report(4, TITLE, false, fmt_err(e)),
        }
    }
    let both = velocities.iter().all(|(t, _)| *t == StateTag::PhaseLocked21)
        && velocities[0].1 * velocities[1].1 < 0.0;

    report(
        4,
        TITLE,
        worst < DELTA_TOL && end_err < ENDPOINT_MU_TOL && contiguous && both,
        format!(
            "locked on [{lo:.4}, {hi:.4}] (endpoint err {end_err:.4}, tol {ENDPOINT_MU_TOL}); \
             max |delta err| = {worst:.2e} (tol {DELTA_TOL:.0e}); mirrored velocities {:+.4} / {:+.4}",
            velocities[0].1, velocities[1].1
        ),
    )
}

/// Rotating-wave / chimera switching at α = 0.1, μ = −4.5, γ = −3.
pub fn switching_state() -> CriterionReport {
    const TITLE: &str = "switching state";
    let p = ModelParams::new(-4.5, -3.0, 0.1);
    let cfg = IntegratorConfig::new(0.01, 1000.0, 5000.0, 10);
    let tol = ClassifierTolerances::default();
    let mut alternations = Vec::new();
    for ic in 0..10 {
        let s0 = random_state_from_seed(500 + ic);
        match integrate(&s0, &p, &cfg) {
            Ok(t) => alternations.push(detect_switching(&t, &tol).map_or(0, |r| r.alternations)),
            Err(e) => return report(5, TITLE, false, fmt_err(e)),
        }
    }
    let hits = alternations.iter().filter(|&&a| a >= tol.min_alternations).count();
    report(
        5,
        TITLE,
        hits >= SWITCHING_MIN_RUNS,
        format!("{hits}/10 runs switch (need {SWITCHING_MIN_RUNS}); alternations {alternations:?}"),
    )
}

/// Rotating wave versus 2+1 locking along α at μ = 0, γ = 3.
pub fn hysteresis() -> CriterionReport {
    const TITLE: &str = "hysteresis";
    let up_spec = SweepSpec {
        n_steps: 37,
        cfg: IntegratorConfig::new(0.01, 1000.0, 500.0, 10),
        initial: Some(PhaseState::splay()),
        ..SweepSpec::new(SweepAxis::Alpha, 0.0, 1.8, ModelParams::new(0.0, 3.0, 0.0))
    };
    let up = match sweep(&up_spec) {
        Ok(b) => b,
        Err(e) => return report(6, TITLE, false, fmt_err(e)),
    };
    let down_spec = SweepSpec {
        initial: up.records.last().map(|r| r.state),
        ..up_spec.reversed()
    };
    let down = match sweep(&down_spec) {
        Ok(b) => b,
        Err(e) => return report(6, TITLE, false, fmt_err(e)),
    };
    let intervals = match detect_hysteresis(&up, &down, &up_spec.tol) {
        Ok(i) => i,
        Err(e) => return report(6, TITLE, false, fmt_err(e)),
    };
    // The wave is the rotating splay; at α = 0 it rests and reads as Splay.
    let loss = up
        .records
        .iter()
        .find(|r| r.param > 0.0 && r.label.tag != StateTag::RotatingWave)
        .map(|r| r.param);
    let inside = !intervals.is_empty() && intervals.iter().all(|&(a, b)| a > 0.0 && b < FRAC_PI_2);
    let loss_ok = loss.is_some_and(|a| (a - FRAC_PI_2).abs() <= RW_LOSS_ALPHA_TOL);
    report(
        6,
        TITLE,
        inside && loss_ok,
        format!(
            "intervals {:?}; up-branch wave lost at alpha = {} (pi/2 +- {RW_LOSS_ALPHA_TOL})",
            intervals
                .iter()
                .map(|(a, b)| format!("[{a:.3}, {b:.3}]"))
                .collect::<Vec<_>>(),
            loss.map_or("never".into(), |a| format!("{a:.3}"))
        ),
    )
}

/// Steps strictly between the last chimera and the first synchronous step,
/// or `None` when the pattern is absent.
fn jump_gap(branch: &BifurcationBranch) -> Option<(f64, usize)> {
    let tags = branch.tags();
    let first_sync = tags.iter().position(|t| t.is_sync())?;
    let last_chimera = tags[..first_sync].iter().rposition(|t| t.is_chimera())?;
    Some((branch.records[first_sync].param, first_sync - last_chimera - 1))
}

/// Chimera to synchrony on α down-sweeps at μ > 0, one point per sign of γ.
pub fn chimera_jump() -> CriterionReport {
    const TITLE: &str = "chimera jump";
    let mut passed = true;
    let mut parts = Vec::new();
    for (mu, gamma) in [(1.0, -0.5), (0.5, 1.0)] {
        // Start from the first seeded state that is a chimera at α = 1.6.
        let mut chosen = None;
        for seed in 0..10u64 {
            let spec = SweepSpec {
                n_steps: 65,
                cfg: IntegratorConfig::new(0.01, 500.0, 500.0, 10),
                seed,
                ..SweepSpec::new(SweepAxis::Alpha, 1.6, 0.0, ModelParams::new(mu, gamma, 1.6))
            };
            let probe = SweepSpec {
                n_steps: 2,
                end: 1.5,
                ..spec.clone()
            };
            match sweep(&probe) {
                Ok(b) if b.records[0].label.tag.is_chimera() => {
                    chosen = Some((seed, spec));
                    break;
                }
                Ok(_) => {}
                Err(e) => return report(7, TITLE, false, fmt_err(e)),
            }
        }
        let Some((seed, spec)) = chosen else {
            passed = false;
            parts.push(format!("({mu},{gamma}): no chimera start in 10 seeds"));
            continue;
        };
        let branch = match sweep(&spec) {
            Ok(b) => b,
            Err(e) => return report(7, TITLE, false, fmt_err(e)),
        };
        match jump_gap(&branch) {
            Some((alpha, gap)) => {
                passed &= gap <= JUMP_MAX_INTERMEDIATE;
                parts.push(format!(
                    "({mu},{gamma}) seed {seed}: sync from alpha = {alpha:.3}, {gap} intermediate"
                ));
            }
            None => {
                passed = false;
                parts.push(format!("({mu},{gamma}) seed {seed}: no chimera->sync transition"));
            }
        }
    }
    report(7, TITLE, passed, parts.join("; "))
}

/// Global synchrony at α = 1.6, μ = γ = −0.01.
pub fn global_sync_repulsive() -> CriterionReport {
    const TITLE: &str = "global synchrony under repulsion";
    let (mu, gamma) = (-0.01, -0.01);
    let p = ModelParams::new(mu, gamma, 1.6);
    let mut worst = 0.0f64;
    for ic in 0..20 {
        let s0 = random_state_from_seed(800 + ic);
        match evolve(&s0, &p, 0.01, 10_000.0) {
            Ok(s) => {
                worst = worst
                    .max((s.omega[0] - s.omega[1]).abs())
                    .max((s.omega[1] - s.omega[2]).abs());
            }
            Err(e) => return report(8, TITLE, false, fmt_err(e)),
        }
    }
    let side = if gamma < -3.0 * mu {
        "gamma < -3 mu"
    } else {
        "gamma > -3 mu"
    };
    report(
        8,
        TITLE,
        worst < GLOBAL_SYNC_TOL,
        format!("20 runs, max final velocity difference {worst:.2e} (tol {GLOBAL_SYNC_TOL:.0e}); point lies in {side}"),
    )
}

/// Coarse grid of the α = 1.6 plane used by the dominance check.
pub fn dominance_grid() -> (ScanGrid, IntegratorConfig<f64>) {
    let grid = ScanGrid {
        n_mu: 41,
        n_gamma: 41,
        alpha: 1.6,
        n_ics: 2,
        seed: 9,
        ..ScanGrid::default()
    };
    (grid, IntegratorConfig::new(0.01, 300.0, 300.0, 10))
}

/// Chimeras dominate the α = 1.6 plane.
pub fn chimera_dominance() -> CriterionReport {
    const TITLE: &str = "chimera dominance at alpha = 1.6";
    let (grid, cfg) = dominance_grid();
    let res = match scan_plane(&grid, &ModelParams::new(0.0, 0.0, 1.6), &cfg, &ClassifierTolerances::default(), 0) {
        Ok(r) => r,
        Err(e) => return report(9, TITLE, false, fmt_err(e)),
    };
    let frac = res.chimera_fraction();
    report(
        9,
        TITLE,
        frac > CHIMERA_MIN_FRACTION,
        format!("41x41, {} ics/cell: chimera in {:.1}% of cells (need > {:.0}%)", grid.n_ics, 100.0 * frac, 100.0 * CHIMERA_MIN_FRACTION),
    )
}

/// Rotating splay state with its rotation velocity and a small kick.
fn near_rotating_splay(p: &ModelParams<f64>) -> PhaseState<f64> {
    let s = PhaseState::splay();
    let omega = rhs(&s, p).domega[0] * p.m / p.epsilon;
    PhaseState::new([s.theta[0] + 0.01, s.theta[1], s.theta[2] - 0.005], [omega; 3])
}

/// Peak sequences of a modulated rotating wave and an anti-phase chimera.
pub fn peak_sequences() -> CriterionReport {
    const TITLE: &str = "peak-sequence discrimination";
    let cfg = IntegratorConfig::new(0.01, 3000.0, 500.0, 10);
    let tol = ClassifierTolerances::default();
    let mut parts = Vec::new();
    let mut passed = true;
    let cases = [
        ((-0.02, -0.5), near_rotating_splay(&ModelParams::new(-0.02, -0.5, 1.6)), 3),
        ((0.1, 0.2), random_state_from_seed(1000), 2),
    ];
    for ((mu, gamma), s0, want) in cases {
        let p = ModelParams::new(mu, gamma, 1.6);
        let traj = match integrate(&s0, &p, &cfg) {
            Ok(t) => t,
            Err(e) => return report(10, TITLE, false, fmt_err(e)),
        };
        let tag = classify(&summarize_all(&traj).expect("window long enough"), &tol).tag;
        match peak_sequence(&traj) {
            Ok(seq) => {
                let period = cycle_period(&seq);
                let mut owners = seq.clone();
                owners.sort_unstable();
                owners.dedup();
                let ok = period == Some(want) && owners.len() == want;
                passed &= ok;
                let head: Vec<usize> = seq.iter().take(2 * want).map(|i| i + 1).collect();
                parts.push(format!("({mu},{gamma}) {tag}: period {period:?} over {} peaks, {head:?}...", seq.len()));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("({mu},{gamma}) {tag}: {e}"));
            }
        }
    }
    report(10, TITLE, passed, parts.join("; "))
}

fn rk4_endpoint(s0: &PhaseState<f64>, p: &ModelParams<f64>, dt: f64, t: f64) -> PhaseState<f64> {
    let steps = (t / dt).round() as usize;
    (0..steps).fold(*s0, |s, _| rk4_step(&s, p, dt))
}

fn distance(a: &PhaseState<f64>, b: &PhaseState<f64>) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// RK4 convergence order by step halving, and scan determinism across
/// worker counts.
pub fn numerics() -> CriterionReport {
    const TITLE: &str = "numerics";
    let p = ModelParams::new(1.0, 0.5, 0.3);
    let s0 = PhaseState::new([0.0, 2.0, 4.0], [0.5, -0.3, 0.1]);
    let (dt, t) = (0.08, 20.0);
    let [a, b, c] = [dt, dt / 2.0, dt / 4.0].map(|h| rk4_endpoint(&s0, &p, h, t));
    let ratio = distance(&a, &b) / distance(&b, &c);
    let ratio_ok = (RK4_RATIO_RANGE.0..=RK4_RATIO_RANGE.1).contains(&ratio);

    let grid = ScanGrid {
        mu_min: -1.0,
        mu_max: 1.0,
        gamma_min: -1.0,
        gamma_max: 1.0,
        n_mu: 6,
        n_gamma: 6,
        alpha: 0.3,
        n_ics: 2,
        seed: 11,
    };
    let cfg = IntegratorConfig::new(0.01, 50.0, 50.0, 10);
    let tol = ClassifierTolerances::default();
    let base = ModelParams::new(0.0, 0.0, 0.3);
    let mut outputs = Vec::new();
    for jobs in [1, 4] {
        let mut buf = Vec::new();
        let res = scan_plane(&grid, &base, &cfg, &tol, jobs).and_then(|r| write_scan_csv(&r, &mut buf));
        if let Err(e) = res {
            return report(11, TITLE, false, fmt_err(e));
        }
        outputs.push(buf);
    }
    let identical = outputs[0] == outputs[1];
    report(
        11,
        TITLE,
        ratio_ok && identical,
        format!(
            "step-halving ratio {ratio:.2} (range [{}, {}]); scan CSV identical for jobs 1 and 4: {identical}",
            RK4_RATIO_RANGE.0, RK4_RATIO_RANGE.1
        ),
    )
}
