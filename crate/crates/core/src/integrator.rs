//! Fixed-step classical Runge–Kutta integration with transient discard.

use thiserror::Error;

use crate::model::{rhs, Derivative, ModelParams, PhaseState, N};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("state became non-finite at t = {time}")]
    NonFinite { time: f64 },
    #[error("invalid integrator setting `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<S> {
    pub dt: S,
    /// Integrated but not recorded.
    pub t_transient: S,
    /// Recorded duration following the transient.
    pub t_measure: S,
    /// Record every `record_stride`-th step.
    pub record_stride: usize,
}

impl<S: Scalar> Default for IntegratorConfig<S> {
    fn default() -> Self {
        IntegratorConfig {
            dt: S::lit(0.01),
            t_transient: S::lit(2000.0),
            t_measure: S::lit(2000.0),
            record_stride: 10,
        }
    }
}

impl<S: Scalar> IntegratorConfig<S> {
    pub fn new(dt: S, t_transient: S, t_measure: S, record_stride: usize) -> Self {
        IntegratorConfig {
            dt,
            t_transient,
            t_measure,
            record_stride,
        }
    }

    pub fn validate(&self) -> Result<(), IntegrateError> {
        let bad = |field, reason: &str| {
            Err(IntegrateError::InvalidConfig {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.dt.is_finite() && self.dt > S::zero()) {
            return bad("dt", "must be finite and > 0");
        }
        if !(self.t_transient.is_finite() && self.t_transient >= S::zero()) {
            return bad("t_transient", "must be finite and >= 0");
        }
        if !(self.t_measure.is_finite() && self.t_measure >= S::lit(100.0) * self.dt) {
            return bad("t_measure", "must be at least 100 * dt");
        }
        if self.record_stride == 0 {
            return bad("record_stride", "must be >= 1");
        }
        Ok(())
    }

    pub fn transient_steps(&self) -> usize {
        steps(self.t_transient, self.dt)
    }

    pub fn measure_steps(&self) -> usize {
        steps(self.t_measure, self.dt)
    }

    /// Spacing of recorded samples.
    pub fn dt_rec(&self) -> S {
        self.dt * S::lit(self.record_stride as f64)
    }
}

fn steps<S: Scalar>(duration: S, dt: S) -> usize {
    (duration / dt).round().to_usize().unwrap_or(0)
}

/// Uniformly sampled solution segment. Phases are unwrapped.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    /// Time of the first sample.
    pub t0: S,
    /// Sample spacing.
    pub dt_rec: S,
    pub samples: Vec<PhaseState<S>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, idx: usize) -> S {
        self.t0 + self.dt_rec * S::lit(idx as f64)
    }

    /// Time of the last sample.
    pub fn t_end(&self) -> S {
        self.time(self.len().saturating_sub(1))
    }

    pub fn last(&self) -> Option<&PhaseState<S>> {
        self.samples.last()
    }

    /// Oscillator indices relabelled as in [`PhaseState::permuted`].
    pub fn permuted(&self, perm: [usize; N]) -> Self {
        Trajectory {
            t0: self.t0,
            dt_rec: self.dt_rec,
            samples: self.samples.iter().map(|s| s.permuted(perm)).collect(),
        }
    }

    pub fn iter_timed(&self) -> impl Iterator<Item = (S, &PhaseState<S>)> + '_ {
        self.samples.iter().enumerate().map(|(i, s)| (self.time(i), s))
    }
}

fn axpy<S: Scalar>(s: &PhaseState<S>, d: &Derivative<S>, h: S) -> PhaseState<S> {
    let mut out = *s;
    for i in 0..N {
        out.theta[i] = s.theta[i] + h * d.dtheta[i];
        out.omega[i] = s.omega[i] + h * d.domega[i];
    }
    out
}

/// One classical RK4 step.
pub fn rk4_step<S: Scalar>(s: &PhaseState<S>, params: &ModelParams<S>, dt: S) -> PhaseState<S> {
    let half = dt / S::lit(2.0);
    let k1 = rhs(s, params);
    let k2 = rhs(&axpy(s, &k1, half), params);
    let k3 = rhs(&axpy(s, &k2, half), params);
    let k4 = rhs(&axpy(s, &k3, dt), params);
    let two = S::lit(2.0);
    let sixth = dt / S::lit(6.0);
    let mut out = *s;
    for i in 0..N {
        out.theta[i] = s.theta[i]
            + sixth * (k1.dtheta[i] + two * k2.dtheta[i] + two * k3.dtheta[i] + k4.dtheta[i]);
        out.omega[i] = s.omega[i]
            + sixth * (k1.domega[i] + two * k2.domega[i] + two * k3.domega[i] + k4.domega[i]);
    }
    out
}

/// Advances `steps` steps starting at time `t_start`, calling `visit` after
/// each one with the step index (1-based) and the new state.
fn advance<S: Scalar>(
    mut state: PhaseState<S>,
    params: &ModelParams<S>,
    dt: S,
    t_start: S,
    steps: usize,
    mut visit: impl FnMut(usize, &PhaseState<S>),
) -> Result<PhaseState<S>, IntegrateError> {
    for step in 1..=steps {
        state = rk4_step(&state, params, dt);
        if !state.is_finite() {
            let time = t_start + dt * S::lit(step as f64);
            return Err(IntegrateError::NonFinite { time: time.as_f64() });
        }
        visit(step, &state);
    }
    Ok(state)
}

fn check_inputs<S: Scalar>(
    state0: &PhaseState<S>,
    params: &ModelParams<S>,
    cfg: &IntegratorConfig<S>,
) -> Result<(), IntegrateError> {
    cfg.validate()?;
    if let Err(crate::model::ModelError::InvalidParam { field, reason }) = params.validate() {
        return Err(IntegrateError::InvalidConfig { field, reason });
    }
    if !state0.is_finite() {
        return Err(IntegrateError::NonFinite { time: 0.0 });
    }
    Ok(())
}

/// Integrates from `state0` at t = 0, discards `t_transient`, and records
/// `t_measure` worth of samples every `record_stride` steps. The first
/// sample is the state at the end of the transient.
pub fn integrate<S: Scalar>(
    state0: &PhaseState<S>,
    params: &ModelParams<S>,
    cfg: &IntegratorConfig<S>,
) -> Result<Trajectory<S>, IntegrateError> {
    check_inputs(state0, params, cfg)?;
    let n_tr = cfg.transient_steps();
    let n_meas = cfg.measure_steps();
    let t0 = cfg.dt * S::lit(n_tr as f64);
    let warm = advance(*state0, params, cfg.dt, S::zero(), n_tr, |_, _| {})?;

    let mut samples = Vec::with_capacity(n_meas / cfg.record_stride + 1);
    samples.push(warm);
    advance(warm, params, cfg.dt, t0, n_meas, |step, s| {
        if step % cfg.record_stride == 0 {
            samples.push(*s);
        }
    })?;

    Ok(Trajectory {
        t0,
        dt_rec: cfg.dt_rec(),
        samples,
    })
}

/// State after `t_transient + t_measure`, nothing recorded.
pub fn settle<S: Scalar>(
    state0: &PhaseState<S>,
    params: &ModelParams<S>,
    cfg: &IntegratorConfig<S>,
) -> Result<PhaseState<S>, IntegrateError> {
    check_inputs(state0, params, cfg)?;
    let total = cfg.transient_steps() + cfg.measure_steps();
    advance(*state0, params, cfg.dt, S::zero(), total, |_, _| {})
}

/// Advances exactly `duration` (rounded to whole steps) without recording.
pub fn evolve<S: Scalar>(
    state0: &PhaseState<S>,
    params: &ModelParams<S>,
    dt: S,
    duration: S,
) -> Result<PhaseState<S>, IntegrateError> {
    advance(*state0, params, dt, S::zero(), steps(duration, dt), |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::wrap_angle;

    fn uncoupled() -> ModelParams<f64> {
        ModelParams::new(0.0, 0.0, 0.0)
    }

    #[test]
    fn free_damping_matches_exponential() {
        let cfg = IntegratorConfig::new(0.01, 0.0, 10.0, 1);
        let traj = integrate(&PhaseState::new([0.0; 3], [1.0; 3]), &uncoupled(), &cfg).unwrap();
        let last = traj.last().unwrap();
        assert!((traj.t_end() - 10.0).abs() < 1e-9);
        for w in last.omega {
            assert!((w - (-1.0f64).exp()).abs() < 1e-8);
        }
        // θ(t) = (1 − e^{−εt}) / ε
        for th in last.theta {
            assert!((th - (1.0 - (-1.0f64).exp()) / 0.1).abs() < 1e-8);
        }
    }

    #[test]
    fn equilibrium_stays_put() {
        let p = ModelParams::new(1.3, -2.0, 0.0);
        let s0 = PhaseState::sync(0.0);
        let cfg = IntegratorConfig::new(0.01, 10.0, 10.0, 10);
        let traj = integrate(&s0, &p, &cfg).unwrap();
        assert!(traj.samples.iter().all(|s| *s == s0));
        assert_eq!(settle(&s0, &p, &cfg).unwrap(), s0);
    }

    #[test]
    fn sample_layout() {
        let cfg = IntegratorConfig::new(0.01, 5.0, 10.0, 10);
        let traj = integrate(&PhaseState::new([0.0; 3], [1.0; 3]), &uncoupled(), &cfg).unwrap();
        assert_eq!(traj.len(), 101);
        assert!((traj.t0 - 5.0).abs() < 1e-12);
        assert!((traj.dt_rec - 0.1).abs() < 1e-12);
        assert!((traj.t_end() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn blow_up_reported() {
        // Negative damping is rejected, so provoke overflow with an absurd step.
        let p = ModelParams::new(1e300, 1e300, 1.0);
        let cfg = IntegratorConfig::new(1e10, 0.0, 1e12, 1);
        let err = integrate(&PhaseState::new([0.0, 1.0, 2.0], [0.0; 3]), &p, &cfg).unwrap_err();
        assert!(matches!(err, IntegrateError::NonFinite { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0, 10.0, 1).validate().is_err());
        assert!(IntegratorConfig::new(0.01, -1.0, 10.0, 1).validate().is_err());
        assert!(IntegratorConfig::new(0.01, 1.0, 0.5, 1).validate().is_err());
        assert!(IntegratorConfig::new(0.01, 1.0, 10.0, 0).validate().is_err());
        assert!(IntegratorConfig::<f64>::default().validate().is_ok());
    }

    #[test]
    fn deterministic() {
        let p = ModelParams::new(-4.5, -3.0, 0.1);
        let s0 = PhaseState::new([0.1, 2.0, 4.0], [0.3, -0.2, 0.1]);
        let cfg = IntegratorConfig::new(0.01, 50.0, 50.0, 7);
        assert_eq!(integrate(&s0, &p, &cfg).unwrap(), integrate(&s0, &p, &cfg).unwrap());
    }

    #[test]
    fn kinetic_energy_non_increasing_without_coupling() {
        let cfg = IntegratorConfig::new(0.01, 0.0, 20.0, 1);
        let traj = integrate(&PhaseState::new([0.0; 3], [1.0, -2.0, 0.5]), &uncoupled(), &cfg).unwrap();
        let energy: Vec<f64> = traj.samples.iter().map(|s| s.omega.iter().map(|w| w * w).sum()).collect();
        assert!(energy.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn consecutive_samples_consistent_with_velocity() {
        let p = ModelParams::new(1.0, 3.0, 0.1);
        let cfg = IntegratorConfig::new(0.01, 200.0, 20.0, 10);
        let traj = integrate(&PhaseState::new([0.0, 0.1, -0.1], [0.0; 3]), &p, &cfg).unwrap();
        for w in traj.samples.windows(2) {
            for i in 0..3 {
                let expected: f64 = w[0].omega[i] * traj.dt_rec;
                let got = wrap_angle(w[1].theta[i] - w[0].theta[i]);
                assert!((got - expected).abs() <= 0.05 * expected.abs() + 1e-12);
            }
        }
    }

    #[test]
    fn runs_in_single_precision() {
        let p = ModelParams::new(1.0f32, 0.0, 0.0);
        let cfg = IntegratorConfig::new(0.01f32, 300.0, 10.0, 10);
        let s = settle(&PhaseState::new([0.0, 0.3, -0.2], [0.0; 3]), &p, &cfg).unwrap();
        assert!((s.theta[0] - s.theta[1]).abs() < 1e-3);
    }
}
