//! Window observables and the collective-state taxonomy.
//!
//! Everything here works on `f64` summaries; trajectories of any scalar
//! type are converted sample by sample.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::Trajectory;
use crate::model::N;
use crate::scalar::{wrap_angle, Scalar};

/// Oscillator pairs in the order used by every `pair_*` field.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// Fewest samples a summary window may contain.
pub const MIN_WINDOW_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("window holds {got} samples, need at least {MIN_WINDOW_SAMPLES}")]
    WindowTooShort { got: usize },
    #[error("no velocity peaks above the median speed")]
    NoPeaks,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSummary {
    /// Unwrapped phase advance over the window divided by its length.
    pub mean_freq: [f64; N],
    /// Standard deviation of the instantaneous velocity.
    pub freq_spread: [f64; N],
    /// Circular mean of `θ_i − θ_j` for the pairs in [`PAIRS`].
    pub pair_diff_mean: [f64; 3],
    /// Circular standard deviation of the same.
    pub pair_diff_spread: [f64; 3],
    /// Largest `|ω_i|` in the window.
    pub max_speed: f64,
    pub omega_min: [f64; N],
    pub omega_max: [f64; N],
}

impl ObservableSummary {
    pub fn is_finite(&self) -> bool {
        self.mean_freq
            .iter()
            .chain(&self.freq_spread)
            .chain(&self.pair_diff_mean)
            .chain(&self.pair_diff_spread)
            .chain(&self.omega_min)
            .chain(&self.omega_max)
            .chain(std::iter::once(&self.max_speed))
            .all(|x| x.is_finite())
    }

    pub fn mean_velocity(&self) -> f64 {
        self.mean_freq.iter().sum::<f64>() / N as f64
    }
}

/// Summary over the samples with time in `[t_start, t_end]`.
pub fn summarize<S: Scalar>(
    traj: &Trajectory<S>,
    t_start: f64,
    t_end: f64,
) -> Result<ObservableSummary, ClassifyError> {
    let t0 = traj.t0.as_f64();
    let h = traj.dt_rec.as_f64();
    let slack = 1e-9 * h;
    let first = ((t_start - t0 - slack) / h).ceil().max(0.0) as usize;
    let last = ((t_end - t0 + slack) / h).floor();
    if last < 0.0 || traj.is_empty() {
        return Err(ClassifyError::WindowTooShort { got: 0 });
    }
    let last = (last as usize).min(traj.len() - 1);
    let got = (last + 1).saturating_sub(first);
    if got < MIN_WINDOW_SAMPLES {
        return Err(ClassifyError::WindowTooShort { got });
    }
    Ok(summarize_range(traj, first, last))
}

/// Summary over the whole trajectory.
pub fn summarize_all<S: Scalar>(traj: &Trajectory<S>) -> Result<ObservableSummary, ClassifyError> {
    if traj.len() < MIN_WINDOW_SAMPLES {
        return Err(ClassifyError::WindowTooShort { got: traj.len() });
    }
    Ok(summarize_range(traj, 0, traj.len() - 1))
}

fn summarize_range<S: Scalar>(traj: &Trajectory<S>, first: usize, last: usize) -> ObservableSummary {
    let samples = &traj.samples[first..=last];
    let count = samples.len() as f64;
    let span = (last - first) as f64 * traj.dt_rec.as_f64();
    let (a, b) = (&samples[0], &samples[samples.len() - 1]);

    let mut mean_freq = [0.0; N];
    let mut sum = [0.0; N];
    let mut sum_sq = [0.0; N];
    let mut omega_min = [f64::INFINITY; N];
    let mut omega_max = [f64::NEG_INFINITY; N];
    let mut max_speed = 0.0f64;
    let mut cs = [(0.0, 0.0); 3];
    for i in 0..N {
        mean_freq[i] = (b.theta[i].as_f64() - a.theta[i].as_f64()) / span;
    }
    for s in samples {
        for i in 0..N {
            let w = s.omega[i].as_f64();
            sum[i] += w;
            sum_sq[i] += w * w;
            omega_min[i] = omega_min[i].min(w);
            omega_max[i] = omega_max[i].max(w);
            max_speed = max_speed.max(w.abs());
        }
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let d = s.theta[i].as_f64() - s.theta[j].as_f64();
            cs[p].0 += d.cos();
            cs[p].1 += d.sin();
        }
    }
    let freq_spread = [0, 1, 2].map(|i| {
        let m = sum[i] / count;
        (sum_sq[i] / count - m * m).max(0.0).sqrt()
    });
    let pair_diff_mean = cs.map(|(c, s)| wrap_angle(s.atan2(c)));
    let pair_diff_spread = cs.map(|(c, s)| {
        let r = (c.hypot(s) / count).min(1.0);
        (-2.0 * r.ln()).max(0.0).sqrt()
    });
    ObservableSummary {
        mean_freq,
        freq_spread,
        pair_diff_mean,
        pair_diff_spread,
        max_speed,
        omega_min,
        omega_max,
    }
}

/// Collective states, in a fixed order that also serves as the tie-break
/// order when rendering maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateTag {
    SyncFixedPoint,
    SyncRotation,
    Splay,
    RotatingWave,
    Antipodal21,
    PhaseLocked21,
    ChimeraInPhase,
    ChimeraAntiPhase,
    SwitchingRotChimera,
    Unclassified,
}

impl StateTag {
    pub const ALL: [StateTag; 10] = [
        StateTag::SyncFixedPoint,
        StateTag::SyncRotation,
        StateTag::Splay,
        StateTag::RotatingWave,
        StateTag::Antipodal21,
        StateTag::PhaseLocked21,
        StateTag::ChimeraInPhase,
        StateTag::ChimeraAntiPhase,
        StateTag::SwitchingRotChimera,
        StateTag::Unclassified,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StateTag::SyncFixedPoint => "SyncFixedPoint",
            StateTag::SyncRotation => "SyncRotation",
            StateTag::Splay => "Splay",
            StateTag::RotatingWave => "RotatingWave",
            StateTag::Antipodal21 => "Antipodal21",
            StateTag::PhaseLocked21 => "PhaseLocked21",
            StateTag::ChimeraInPhase => "ChimeraInPhase",
            StateTag::ChimeraAntiPhase => "ChimeraAntiPhase",
            StateTag::SwitchingRotChimera => "SwitchingRotChimera",
            StateTag::Unclassified => "Unclassified",
        }
    }

    pub fn is_chimera(self) -> bool {
        matches!(self, StateTag::ChimeraInPhase | StateTag::ChimeraAntiPhase)
    }

    pub fn is_sync(self) -> bool {
        matches!(self, StateTag::SyncFixedPoint | StateTag::SyncRotation)
    }
}

impl std::fmt::Display for StateTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StateTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StateTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown state tag `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateLabel {
    pub tag: StateTag,
    /// Average of the three mean frequencies.
    pub mean_velocity: f64,
    /// Phase of the odd oscillator relative to the locked pair, for
    /// `PhaseLocked21` and `Antipodal21`.
    pub delta: Option<f64>,
    /// Index of the oscillator outside the frequency- or phase-locked pair.
    pub detached: Option<usize>,
}

impl StateLabel {
    fn bare(tag: StateTag, mean_velocity: f64) -> Self {
        StateLabel {
            tag,
            mean_velocity,
            delta: None,
            detached: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierTolerances {
    pub tol_velocity_zero: f64,
    pub tol_phase_equal: f64,
    pub tol_freq_equal: f64,
    /// Frequency gap separating the detached oscillator of a chimera.
    pub min_freq_gap: f64,
    pub tol_splay_spacing: f64,
    /// Largest velocity standard deviation for a rotation to count as rigid.
    pub tol_rigid_spread: f64,
    /// Window length for switching analysis, in time units.
    pub switching_window: f64,
    pub min_alternations: usize,
    /// A switching window is rotating-wave-like when no pair phase
    /// difference drifts by this many turns or more across it.
    pub switch_rot_max_slip: f64,
    /// A switching window is chimera-like when some pair drifts by at least
    /// this many turns while another drifts by at most half as much.
    pub switch_chimera_min_slip: f64,
}

impl Default for ClassifierTolerances {
    fn default() -> Self {
        ClassifierTolerances {
            tol_velocity_zero: 1e-4,
            tol_phase_equal: 1e-2,
            tol_freq_equal: 1e-3,
            min_freq_gap: 1e-2,
            tol_splay_spacing: 5e-2,
            tol_rigid_spread: 1e-2,
            switching_window: 100.0,
            min_alternations: 3,
            switch_rot_max_slip: 0.35,
            switch_chimera_min_slip: 0.45,
        }
    }
}

impl ClassifierTolerances {
    /// Returns the name of the first offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = [
            ("tol_velocity_zero", self.tol_velocity_zero),
            ("tol_phase_equal", self.tol_phase_equal),
            ("tol_freq_equal", self.tol_freq_equal),
            ("min_freq_gap", self.min_freq_gap),
            ("tol_splay_spacing", self.tol_splay_spacing),
            ("tol_rigid_spread", self.tol_rigid_spread),
            ("switching_window", self.switching_window),
            ("switch_rot_max_slip", self.switch_rot_max_slip),
            ("switch_chimera_min_slip", self.switch_chimera_min_slip),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err((field, "must be finite and > 0".into()));
            }
        }
        if self.min_freq_gap <= self.tol_freq_equal {
            return Err(("min_freq_gap", "must exceed tol_freq_equal".into()));
        }
        if self.switch_chimera_min_slip < self.switch_rot_max_slip {
            return Err(("switch_chimera_min_slip", "must be >= switch_rot_max_slip".into()));
        }
        if self.min_alternations == 0 {
            return Err(("min_alternations", "must be >= 1".into()));
        }
        Ok(())
    }
}

fn near_zero(d: f64, tol: f64) -> bool {
    d.abs() < tol
}

fn near_pi(d: f64, tol: f64) -> bool {
    PI - d.abs() < tol
}

fn near_third(d: f64, tol: f64) -> bool {
    (d.abs() - TAU / 3.0).abs() < tol
}

/// The oscillator outside pair `p`.
fn odd_one(p: usize) -> usize {
    let (i, j) = PAIRS[p];
    3 - i - j
}

/// `θ_k − θ_i` for the oscillator `k` outside pair `p`, reconstructed from
/// the pair means.
fn offset_of_odd(s: &ObservableSummary, p: usize) -> f64 {
    let [d12, _, d13] = s.pair_diff_mean;
    match p {
        0 => wrap_angle(-d13),
        1 => wrap_angle(d12),
        _ => wrap_angle(-d12),
    }
}

/// Splits phase configurations shared by equilibria and rigid rotations.
/// Returns the sync/splay/2+1 decision with the pair index when relevant.
enum Shape {
    Sync,
    Splay,
    TwoPlusOne(usize),
    Other,
}

fn shape(s: &ObservableSummary, tol: &ClassifierTolerances) -> Shape {
    let locked: Vec<usize> = (0..3)
        .filter(|&p| {
            near_zero(s.pair_diff_mean[p], tol.tol_phase_equal)
                && s.pair_diff_spread[p] < tol.tol_phase_equal
        })
        .collect();
    match locked.len() {
        3 => Shape::Sync,
        1 => Shape::TwoPlusOne(locked[0]),
        0 if s.pair_diff_mean.iter().all(|&d| near_third(d, tol.tol_splay_spacing)) => Shape::Splay,
        _ => Shape::Other,
    }
}

/// Decision tree over a window summary.
pub fn classify(s: &ObservableSummary, tol: &ClassifierTolerances) -> StateLabel {
    let v = s.mean_velocity();
    if !s.is_finite() {
        return StateLabel::bare(StateTag::Unclassified, v);
    }

    let at_rest = s.mean_freq.iter().all(|f| f.abs() < tol.tol_velocity_zero)
        && s.max_speed < tol.tol_velocity_zero;
    if at_rest {
        return match shape(s, tol) {
            Shape::Sync => StateLabel::bare(StateTag::SyncFixedPoint, v),
            Shape::Splay => StateLabel::bare(StateTag::Splay, v),
            Shape::TwoPlusOne(p) if near_pi(offset_of_odd(s, p), tol.tol_splay_spacing) => StateLabel {
                tag: StateTag::Antipodal21,
                mean_velocity: v,
                delta: Some(offset_of_odd(s, p)),
                detached: Some(odd_one(p)),
            },
            _ => StateLabel::bare(StateTag::Unclassified, v),
        };
    }

    let f = s.mean_freq;
    let equal = |p: usize| {
        let (i, j) = PAIRS[p];
        (f[i] - f[j]).abs() < tol.tol_freq_equal
    };
    let rigid = s.freq_spread.iter().all(|&x| x < tol.tol_rigid_spread);
    if (0..3).all(equal) && rigid {
        return match shape(s, tol) {
            Shape::Sync => StateLabel::bare(StateTag::SyncRotation, v),
            Shape::Splay => StateLabel::bare(StateTag::RotatingWave, v),
            Shape::TwoPlusOne(p) => StateLabel {
                tag: StateTag::PhaseLocked21,
                mean_velocity: v,
                delta: Some(offset_of_odd(s, p)),
                detached: Some(odd_one(p)),
            },
            Shape::Other => StateLabel::bare(StateTag::Unclassified, v),
        };
    }

    let equal_pairs: Vec<usize> = (0..3).filter(|&p| equal(p)).collect();
    if let [p] = equal_pairs[..] {
        let (i, j) = PAIRS[p];
        let k = odd_one(p);
        let gap = (f[k] - f[i]).abs().min((f[k] - f[j]).abs());
        if gap >= tol.min_freq_gap {
            let in_phase = near_zero(s.pair_diff_mean[p], tol.tol_phase_equal)
                && s.pair_diff_spread[p] < tol.tol_phase_equal;
            let tag = if in_phase {
                StateTag::ChimeraInPhase
            } else {
                StateTag::ChimeraAntiPhase
            };
            return StateLabel {
                tag,
                mean_velocity: v,
                delta: None,
                detached: Some(k),
            };
        }
    }
    StateLabel::bare(StateTag::Unclassified, v)
}

/// Coarse label of one switching window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpochKind {
    RotatingWave,
    Chimera { detached: usize },
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub kind: EpochKind,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingReport {
    pub tag: StateTag,
    /// Maximal runs of equally labelled windows, in time order.
    pub epochs: Vec<Epoch>,
    /// Changes between rotating-wave-like and chimera-like epochs, with
    /// `Other` epochs skipped.
    pub alternations: usize,
}

/// Labels half-overlapping windows of length `switching_window` by how far
/// each pair phase difference drifts across them (in turns).
pub fn window_epochs<S: Scalar>(traj: &Trajectory<S>, tol: &ClassifierTolerances) -> Vec<Epoch> {
    let h = traj.dt_rec.as_f64();
    let w = (tol.switching_window / h).round() as usize;
    if w == 0 || traj.len() <= w {
        return Vec::new();
    }
    let hop = (w / 2).max(1);
    let mut epochs: Vec<Epoch> = Vec::new();
    let mut start = 0;
    while start + w < traj.len() {
        let (a, b) = (&traj.samples[start], &traj.samples[start + w]);
        let slip = PAIRS.map(|(i, j)| {
            let before = a.theta[i].as_f64() - a.theta[j].as_f64();
            let after = b.theta[i].as_f64() - b.theta[j].as_f64();
            ((after - before) / TAU).abs()
        });
        let (max, min_p) = (0..3).fold((0.0f64, 0), |(mx, mp), p| {
            (mx.max(slip[p]), if slip[p] < slip[mp] { p } else { mp })
        });
        let kind = if max < tol.switch_rot_max_slip {
            EpochKind::RotatingWave
        } else if max >= tol.switch_chimera_min_slip && slip[min_p] <= 0.5 * max {
            EpochKind::Chimera {
                detached: odd_one(min_p),
            }
        } else {
            EpochKind::Other
        };
        let (t_a, t_b) = (traj.time(start).as_f64(), traj.time(start + w).as_f64());
        match epochs.last_mut() {
            Some(e) if e.kind == kind => e.end = t_b,
            _ => epochs.push(Epoch {
                kind,
                start: t_a,
                end: t_b,
            }),
        }
        start += hop;
    }
    epochs
}

/// Counts alternations between rotating-wave-like and chimera-like epochs.
pub fn count_alternations(epochs: &[Epoch]) -> usize {
    let mut prev: Option<bool> = None;
    let mut n = 0;
    for e in epochs {
        let is_rot = match e.kind {
            EpochKind::RotatingWave => true,
            EpochKind::Chimera { .. } => false,
            EpochKind::Other => continue,
        };
        if prev.is_some_and(|p| p != is_rot) {
            n += 1;
        }
        prev = Some(is_rot);
    }
    n
}

/// Reports switching when the windowed labels alternate at least
/// `min_alternations` times. Trajectories shorter than ten windows are
/// never reported.
pub fn detect_switching<S: Scalar>(traj: &Trajectory<S>, tol: &ClassifierTolerances) -> Option<SwitchingReport> {
    let duration = traj.t_end().as_f64() - traj.t0.as_f64();
    if traj.is_empty() || duration < 10.0 * tol.switching_window {
        return None;
    }
    let epochs = window_epochs(traj, tol);
    let alternations = count_alternations(&epochs);
    (alternations >= tol.min_alternations).then_some(SwitchingReport {
        tag: StateTag::SwitchingRotChimera,
        epochs,
        alternations,
    })
}

/// Which oscillator owns each successive speed peak. Local maxima of
/// `|ω_i|` above the median speed of all three oscillators are merged on a
/// common timeline and repeated owners collapsed. Indices are zero-based.
pub fn peak_sequence<S: Scalar>(traj: &Trajectory<S>) -> Result<Vec<usize>, ClassifyError> {
    let speed: Vec<[f64; N]> = traj
        .samples
        .iter()
        .map(|s| s.omega.map(|w| w.as_f64().abs()))
        .collect();
    let mut all: Vec<f64> = speed.iter().flatten().copied().collect();
    if all.len() < 3 * N {
        return Err(ClassifyError::NoPeaks);
    }
    all.sort_by(f64::total_cmp);
    let median = all[all.len() / 2];

    // Peak times are refined by a parabola through the three samples so
    // that the merge order does not hinge on which index comes first.
    let mut peaks: Vec<(f64, usize)> = Vec::new();
    for k in 1..speed.len() - 1 {
        for i in 0..N {
            let (a, b, c) = (speed[k - 1][i], speed[k][i], speed[k + 1][i]);
            if b > a && b >= c && b > median {
                let curv = a - 2.0 * b + c;
                let shift = if curv < 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
                peaks.push((k as f64 + shift, i));
            }
        }
    }
    if peaks.is_empty() {
        return Err(ClassifyError::NoPeaks);
    }
    peaks.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut seq: Vec<usize> = Vec::with_capacity(peaks.len());
    for (_, i) in peaks {
        if seq.last() != Some(&i) {
            seq.push(i);
        }
    }
    Ok(seq)
}

/// Smallest `p` such that `seq` repeats with period `p` and holds at least
/// two full periods.
pub fn cycle_period(seq: &[usize]) -> Option<usize> {
    (1..=seq.len() / 2).find(|&p| (0..seq.len() - p).all(|k| seq[k] == seq[k + p]))
}
