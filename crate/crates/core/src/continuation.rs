//! One-parameter sweeps with warm starts, and hysteresis between an
//! upward and a downward sweep.

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    classify, detect_switching, summarize_all, ClassifierTolerances, ObservableSummary, StateLabel, StateTag,
};
use crate::integrator::{integrate, IntegrateError, IntegratorConfig};
use crate::model::{ModelError, ModelParams, PhaseState};
use crate::scan::random_state_from_seed;

#[derive(Debug, Error)]
pub enum ContinuationError {
    #[error("invalid sweep `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrator(#[from] IntegrateError),
    #[error("branches do not share a parameter grid")]
    MismatchedGrids,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Mu,
    Alpha,
}

/// Where each step starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitPolicy {
    /// The final state of the previous step.
    Inherit,
    /// A random state drawn from a stream keyed by this seed and the step.
    FreshRandom(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub end: f64,
    pub n_steps: usize,
    pub base: ModelParams<f64>,
    pub cfg: IntegratorConfig<f64>,
    pub init: InitPolicy,
    /// State of the first step; drawn from `seed` when absent.
    pub initial: Option<PhaseState<f64>>,
    /// Seeds the first state and blow-up restarts.
    pub seed: u64,
    pub tol: ClassifierTolerances,
    /// Amplitude of the seeded phase jitter added to an inherited state.
    /// Without it a state on an invariant subspace (two phases bit-equal)
    /// can never leave it, however unstable.
    pub kick: f64,
}

impl SweepSpec {
    /// 200 steps, 1000 time units of transient and of measurement per step,
    /// inherited states.
    pub fn new(axis: SweepAxis, start: f64, end: f64, base: ModelParams<f64>) -> Self {
        SweepSpec {
            axis,
            start,
            end,
            n_steps: 200,
            base,
            cfg: IntegratorConfig::new(0.01, 1000.0, 1000.0, 10),
            init: InitPolicy::Inherit,
            initial: None,
            seed: 0,
            tol: ClassifierTolerances::default(),
            kick: DEFAULT_KICK,
        }
    }

    pub fn validate(&self) -> Result<(), ContinuationError> {
        let bad = |field, reason: &str| {
            Err(ContinuationError::InvalidSpec {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.start.is_finite() && self.end.is_finite()) {
            return bad("start", "bounds must be finite");
        }
        if self.start == self.end {
            return bad("end", "must differ from start");
        }
        if self.n_steps < 2 {
            return bad("n_steps", "must be >= 2");
        }
        self.cfg.validate()?;
        for v in [self.start, self.end] {
            self.params_at(v).validate()?;
        }
        if !(self.kick.is_finite() && self.kick >= 0.0) {
            return bad("kick", "must be finite and >= 0");
        }
        if let Err((field, reason)) = self.tol.validate() {
            return bad(field, &reason);
        }
        Ok(())
    }

    pub fn value_at(&self, step: usize) -> f64 {
        if step + 1 == self.n_steps {
            self.end
        } else {
            self.start + (self.end - self.start) * step as f64 / (self.n_steps - 1) as f64
        }
    }

    pub fn params_at(&self, value: f64) -> ModelParams<f64> {
        match self.axis {
            SweepAxis::Mu => self.base.with_coupling(value, self.base.gamma),
            SweepAxis::Alpha => self.base.with_alpha(value),
        }
    }

    /// The same sweep run in the opposite direction.
    pub fn reversed(&self) -> Self {
        SweepSpec {
            start: self.end,
            end: self.start,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub param: f64,
    /// Absent when the step blew up.
    pub summary: Option<ObservableSummary>,
    pub label: StateLabel,
    /// Final state of the step, phases shifted near the origin.
    pub state: PhaseState<f64>,
    pub blowup: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationBranch {
    pub axis: SweepAxis,
    pub records: Vec<StepRecord>,
}

impl BifurcationBranch {
    pub fn params(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.param).collect()
    }

    pub fn tags(&self) -> Vec<StateTag> {
        self.records.iter().map(|r| r.label.tag).collect()
    }

    /// Parameter of the first step carrying a chimera label.
    pub fn chimera_onset(&self) -> Option<f64> {
        self.records.iter().find(|r| r.label.tag.is_chimera()).map(|r| r.param)
    }
}

/// Default [`SweepSpec::kick`].
pub const DEFAULT_KICK: f64 = 1e-8;

fn step_seed(seed: u64, step: usize) -> u64 {
    crate::scan::ic_seed(seed, 0.0, 0.0, step)
}

fn jitter(mut s: PhaseState<f64>, amp: f64, seed: u64) -> PhaseState<f64> {
    if amp > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in &mut s.theta {
            *t += rng.gen_range(-amp..=amp);
        }
    }
    s
}

/// Shifts all phases by the same multiple of 2π so the first lies in
/// `[0, 2π)`.
fn recentre(mut s: PhaseState<f64>) -> PhaseState<f64> {
    let shift = TAU * (s.theta[0] / TAU).floor();
    for t in &mut s.theta {
        *t -= shift;
    }
    s
}

fn label_trajectory(
    traj: &crate::integrator::Trajectory<f64>,
    tol: &ClassifierTolerances,
) -> (Option<ObservableSummary>, StateLabel) {
    let Ok(summary) = summarize_all(traj) else {
        let label = StateLabel {
            tag: StateTag::Unclassified,
            mean_velocity: f64::NAN,
            delta: None,
            detached: None,
        };
        return (None, label);
    };
    let mut label = classify(&summary, tol);
    if label.tag == StateTag::Unclassified {
        if let Some(r) = detect_switching(traj, tol) {
            label.tag = r.tag;
        }
    }
    (Some(summary), label)
}

/// Runs the sweep step by step. A step that blows up is recorded as
/// `Unclassified` with `blowup` set, and the next step restarts from a
/// random state keyed by the sweep seed and the step index.
pub fn sweep(spec: &SweepSpec) -> Result<BifurcationBranch, ContinuationError> {
    spec.validate()?;
    let mut records = Vec::with_capacity(spec.n_steps);
    let mut carry: Option<PhaseState<f64>> = Some(
        spec.initial
            .unwrap_or_else(|| random_state_from_seed(step_seed(spec.seed, 0))),
    );
    for step in 0..spec.n_steps {
        let param = spec.value_at(step);
        let params = spec.params_at(param);
        let s0 = match (spec.init, carry) {
            (InitPolicy::FreshRandom(seed), _) if step > 0 => random_state_from_seed(step_seed(seed, step)),
            (_, Some(s)) if step > 0 => jitter(s, spec.kick, step_seed(!spec.seed, step)),
            (_, Some(s)) => s,
            (_, None) => random_state_from_seed(step_seed(spec.seed, step)),
        };
        match integrate(&s0, &params, &spec.cfg) {
            Ok(traj) => {
                let (summary, label) = label_trajectory(&traj, &spec.tol);
                let state = recentre(*traj.last().expect("non-empty trajectory"));
                carry = Some(state);
                records.push(StepRecord {
                    param,
                    summary,
                    label,
                    state,
                    blowup: false,
                });
            }
            Err(IntegrateError::NonFinite { .. }) => {
                carry = None;
                records.push(StepRecord {
                    param,
                    summary: None,
                    label: StateLabel {
                        tag: StateTag::Unclassified,
                        mean_velocity: f64::NAN,
                        delta: None,
                        detached: None,
                    },
                    state: s0,
                    blowup: true,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(BifurcationBranch {
        axis: spec.axis,
        records,
    })
}

/// Maximal parameter intervals, as `(low, high)`, on which the two
/// branches disagree in tag or in some mean frequency by more than
/// `min_freq_gap`. `down` is compared in reverse order.
pub fn detect_hysteresis(
    up: &BifurcationBranch,
    down: &BifurcationBranch,
    tol: &ClassifierTolerances,
) -> Result<Vec<(f64, f64)>, ContinuationError> {
    let n = up.records.len();
    if up.axis != down.axis || n != down.records.len() {
        return Err(ContinuationError::MismatchedGrids);
    }
    let rev: Vec<&StepRecord> = down.records.iter().rev().collect();
    for (a, b) in up.records.iter().zip(&rev) {
        let scale = a.param.abs().max(b.param.abs()).max(1.0);
        if (a.param - b.param).abs() > 1e-9 * scale {
            return Err(ContinuationError::MismatchedGrids);
        }
    }
    let differs = |a: &StepRecord, b: &StepRecord| {
        if a.label.tag != b.label.tag {
            return true;
        }
        match (&a.summary, &b.summary) {
            (Some(x), Some(y)) => (0..3).any(|i| (x.mean_freq[i] - y.mean_freq[i]).abs() > tol.min_freq_gap),
            _ => false,
        }
    };
    let mut out = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    for (a, b) in up.records.iter().zip(&rev) {
        if differs(a, b) {
            run = Some(match run {
                Some((first, _)) => (first, a.param),
                None => (a.param, a.param),
            });
        } else if let Some((p, q)) = run.take() {
            out.push((p.min(q), p.max(q)));
        }
    }
    if let Some((p, q)) = run {
        out.push((p.min(q), p.max(q)));
    }
    Ok(out)
}

pub const BRANCH_CSV_HEADER: [&str; 9] = [
    "param",
    "label",
    "mean_freq_1",
    "mean_freq_2",
    "mean_freq_3",
    "pair_diff_12",
    "pair_diff_23",
    "pair_diff_13",
    "delta",
];

/// One row per step. Numeric cells are empty for blown-up steps; `delta`
/// is empty unless the step is `PhaseLocked21`.
pub fn write_branch_csv<W: Write>(branch: &BifurcationBranch, out: W) -> Result<(), ContinuationError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(BRANCH_CSV_HEADER)?;
    for r in &branch.records {
        let mut row = vec![r.param.to_string(), r.label.tag.name().to_string()];
        match &r.summary {
            Some(s) => {
                row.extend(s.mean_freq.iter().map(f64::to_string));
                row.extend(s.pair_diff_mean.iter().map(f64::to_string));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        row.push(match (r.label.tag, r.label.delta) {
            (StateTag::PhaseLocked21, Some(d)) => d.to_string(),
            _ => String::new(),
        });
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
