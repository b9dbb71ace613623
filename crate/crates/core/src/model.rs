//! The three-oscillator model: right-hand side, analytic rotation
//! velocities and the reference stability lines of the coupling plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Number of oscillators. The model is only defined for three.
pub const N: usize = 3;

/// How the coupling sums treat self terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Convention {
    /// Pairwise sum over `j != i`; triadic sum over ordered pairs `(j, k)`
    /// with `j != k` and both different from `i`.
    #[default]
    ExcludeSelf,
    /// Both sums run over every index, self terms included.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

/// Physical and coupling constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<S> {
    /// Inertia.
    pub m: S,
    /// Damping.
    pub epsilon: S,
    /// Pairwise coupling strength.
    pub mu: S,
    /// Triadic (2-simplex) coupling strength.
    pub gamma: S,
    /// Phase lag in `[0, π)`.
    pub alpha: S,
    pub convention: Convention,
}

impl<S: Scalar> ModelParams<S> {
    /// Unit mass, damping 0.1, self terms excluded.
    pub fn new(mu: S, gamma: S, alpha: S) -> Self {
        ModelParams {
            m: S::one(),
            epsilon: S::lit(0.1),
            mu,
            gamma,
            alpha,
            convention: Convention::ExcludeSelf,
        }
    }

    pub fn with_inertia(mut self, m: S, epsilon: S) -> Self {
        self.m = m;
        self.epsilon = epsilon;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_coupling(mut self, mu: S, gamma: S) -> Self {
        self.mu = mu;
        self.gamma = gamma;
        self
    }

    pub fn with_alpha(mut self, alpha: S) -> Self {
        self.alpha = alpha;
        self
    }

    /// Oscillator count, always [`N`].
    pub fn n(&self) -> usize {
        N
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |field, reason: &str| {
            Err(ModelError::InvalidParam {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.m.is_finite() && self.m > S::zero()) {
            return bad("m", "must be finite and > 0");
        }
        if !(self.epsilon.is_finite() && self.epsilon > S::zero()) {
            return bad("epsilon", "must be finite and > 0");
        }
        if !self.mu.is_finite() {
            return bad("mu", "must be finite");
        }
        if !self.gamma.is_finite() {
            return bad("gamma", "must be finite");
        }
        if !(self.alpha >= S::zero() && self.alpha < S::PI()) {
            return bad("alpha", "must lie in [0, pi)");
        }
        Ok(())
    }
}

/// Phases (unwrapped) and angular velocities of the three oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState<S> {
    pub theta: [S; N],
    pub omega: [S; N],
}

impl<S: Scalar> PhaseState<S> {
    pub fn new(theta: [S; N], omega: [S; N]) -> Self {
        PhaseState { theta, omega }
    }

    /// All phases equal to `c`, at rest.
    pub fn sync(c: S) -> Self {
        PhaseState::new([c; N], [S::zero(); N])
    }

    /// Phases spaced by 2π/3, at rest.
    pub fn splay() -> Self {
        let third = S::TAU() / S::lit(3.0);
        PhaseState::new([S::zero(), third, third + third], [S::zero(); N])
    }

    /// Oscillator `detached` sits at π, the other two at 0, at rest.
    pub fn antipodal(detached: usize) -> Self {
        let mut theta = [S::zero(); N];
        theta[detached] = S::PI();
        PhaseState::new(theta, [S::zero(); N])
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().chain(self.omega.iter()).all(|x| x.is_finite())
    }

    /// Flattened `[θ1, θ2, θ3, ω1, ω2, ω3]`.
    pub fn to_array(&self) -> [S; 2 * N] {
        let mut out = [S::zero(); 2 * N];
        out[..N].copy_from_slice(&self.theta);
        out[N..].copy_from_slice(&self.omega);
        out
    }

    pub fn from_array(x: [S; 2 * N]) -> Self {
        let mut s = PhaseState::default();
        s.theta.copy_from_slice(&x[..N]);
        s.omega.copy_from_slice(&x[N..]);
        s
    }

    /// Component `i` of the result is component `perm[i]` of `self`.
    pub fn permuted(&self, perm: [usize; N]) -> Self {
        PhaseState::new(perm.map(|p| self.theta[p]), perm.map(|p| self.omega[p]))
    }

    pub fn cast<T: Scalar>(&self) -> PhaseState<T> {
        PhaseState::new(
            self.theta.map(|x| T::lit(x.as_f64())),
            self.omega.map(|x| T::lit(x.as_f64())),
        )
    }
}

/// Time derivative of a [`PhaseState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivative<S> {
    pub dtheta: [S; N],
    pub domega: [S; N],
}

/// Evaluates the equations of motion
/// `m θ̈_i + ε θ̇_i = μ/N Σ sin(θ_j − θ_i − α) + γ/(2N²) ΣΣ sin(θ_j + θ_k − 2θ_i − α)`.
pub fn rhs<S: Scalar>(state: &PhaseState<S>, params: &ModelParams<S>) -> Derivative<S> {
    let n = S::lit(N as f64);
    let pair_gain = params.mu / n;
    let tri_gain = params.gamma / (S::lit(2.0) * n * n);
    let alpha = params.alpha;
    let th = &state.theta;
    let mut domega = [S::zero(); N];

    for i in 0..N {
        // Differences relative to θ_i keep the sine arguments small even
        // when the unwrapped phases have grown large.
        let d = [th[0] - th[i], th[1] - th[i], th[2] - th[i]];
        let (pair, tri) = match params.convention {
            Convention::ExcludeSelf => {
                let j = (i + 1) % N;
                let k = (i + 2) % N;
                let pair = (d[j] - alpha).sin() + (d[k] - alpha).sin();
                // Ordered pairs (j, k) and (k, j) contribute the same term.
                let tri = S::lit(2.0) * (d[j] + d[k] - alpha).sin();
                (pair, tri)
            }
            Convention::Literal => {
                let mut pair = S::zero();
                let mut tri = S::zero();
                for j in 0..N {
                    pair = pair + (d[j] - alpha).sin();
                    for k in 0..N {
                        tri = tri + (d[j] + d[k] - alpha).sin();
                    }
                }
                (pair, tri)
            }
        };
        let force = pair_gain * pair + tri_gain * tri - params.epsilon * state.omega[i];
        domega[i] = force / params.m;
    }

    Derivative {
        dtheta: state.omega,
        domega,
    }
}

/// Common angular velocity of the fully synchronized rotation,
/// `ω_s = −(6μ + γ)/(9ε) · sin α`.
///
/// Only the exclude-self convention has this as its stationary velocity.
pub fn sync_velocity<S: Scalar>(params: &ModelParams<S>) -> S {
    -((S::lit(6.0) * params.mu + params.gamma) / (S::lit(9.0) * params.epsilon)) * params.alpha.sin()
}

/// Stationary velocity on the synchronous manifold for either convention.
pub fn sync_velocity_for<S: Scalar>(params: &ModelParams<S>) -> S {
    match params.convention {
        Convention::ExcludeSelf => sync_velocity(params),
        Convention::Literal => {
            -((S::lit(2.0) * params.mu + params.gamma) / (S::lit(2.0) * params.epsilon))
                * params.alpha.sin()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// `γ = −3μ`, stability edge of the synchronous state.
    Synchrony,
    /// `γ = 3μ/2`, stability edge of the splay state.
    Splay,
    /// `γ = −6μ`, where the synchronous rotation has zero velocity.
    ZeroVelocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Applicability {
    AnyLag,
    ZeroLagOnly,
}

/// A line `γ = slope · μ` through the origin of the coupling plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    pub kind: BoundaryKind,
    pub slope: f64,
    pub applicability: Applicability,
}

impl BoundaryLine {
    pub fn gamma_at(&self, mu: f64) -> f64 {
        self.slope * mu
    }

    pub fn applies_at(&self, alpha: f64) -> bool {
        match self.applicability {
            Applicability::AnyLag => true,
            Applicability::ZeroLagOnly => alpha == 0.0,
        }
    }
}

/// The reference lines of the `(μ, γ)` plane. All three are returned; the
/// splay line is tagged as valid at zero lag only, use
/// [`BoundaryLine::applies_at`] to filter.
pub fn stability_boundaries(_alpha: f64) -> Vec<BoundaryLine> {
    vec![
        BoundaryLine {
            kind: BoundaryKind::Synchrony,
            slope: -3.0,
            applicability: Applicability::AnyLag,
        },
        BoundaryLine {
            kind: BoundaryKind::Splay,
            slope: 1.5,
            applicability: Applicability::ZeroLagOnly,
        },
        BoundaryLine {
            kind: BoundaryKind::ZeroVelocity,
            slope: -6.0,
            applicability: Applicability::AnyLag,
        },
    ]
}

/// Rigidly rotating 2+1 state: oscillators 1 and 2 together, oscillator 3
/// ahead by `delta`, everything turning at `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLockedBranch<S> {
    pub delta: S,
    pub omega: S,
}

impl<S: Scalar> PhaseLockedBranch<S> {
    /// The coexisting branch rotating the other way.
    pub fn mirrored(&self) -> Self {
        PhaseLockedBranch {
            delta: -self.delta,
            omega: -self.omega,
        }
    }

    /// State on the branch at time `t`.
    pub fn state_at(&self, t: S) -> PhaseState<S> {
        let base = self.omega * t;
        PhaseState::new([base, base, base + self.delta], [self.omega; N])
    }
}

/// Closed-form 2+1 phase-locked rotation at zero lag:
/// `cos δ = −(9μ + γ)/(2γ)`, `Ω = (3μ + γ)/(9ε) · sin δ`.
///
/// Returns `None` when the branch does not exist, and also outside its
/// domain (nonzero lag, literal convention or `γ = 0`).
pub fn phase_locked_offset<S: Scalar>(params: &ModelParams<S>) -> Option<PhaseLockedBranch<S>> {
    if params.alpha != S::zero()
        || params.convention != Convention::ExcludeSelf
        || params.gamma == S::zero()
    {
        return None;
    }
    let cos_delta = -(S::lit(9.0) * params.mu + params.gamma) / (S::lit(2.0) * params.gamma);
    if cos_delta.is_nan() || cos_delta.abs() > S::one() {
        return None;
    }
    let delta = cos_delta.acos();
    let omega = (S::lit(3.0) * params.mu + params.gamma) / (S::lit(9.0) * params.epsilon) * delta.sin();
    Some(PhaseLockedBranch { delta, omega })
}
