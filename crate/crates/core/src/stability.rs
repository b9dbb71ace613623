//! Linearization of the first-order system `θ̇ = ω, ω̇ = f(θ, ω)` by central
//! finite differences, and its eigenvalues.

use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{rhs, ModelParams, PhaseState, N};
use crate::scalar::Scalar;

/// Dimension of the first-order system.
pub const DIM: usize = 2 * N;

/// Finite-difference step: `1e-6` in double precision, `∛ε_mach` for
/// coarser types where `1e-6` would drown in rounding.
pub fn default_fd_step<S: Scalar>() -> S {
    let cbrt_eps = S::epsilon().cbrt();
    if cbrt_eps < S::lit(1e-6) {
        S::lit(1e-6)
    } else {
        cbrt_eps
    }
}

fn flow<S: Scalar>(x: [S; DIM], params: &ModelParams<S>) -> [S; DIM] {
    let d = rhs(&PhaseState::from_array(x), params);
    let mut out = [S::zero(); DIM];
    out[..N].copy_from_slice(&d.dtheta);
    out[N..].copy_from_slice(&d.domega);
    out
}

/// Jacobian by the two-point central stencil with step `h`.
/// `jac[row][col] = ∂ flow_row / ∂ x_col`.
pub fn jacobian<S: Scalar>(state: &PhaseState<S>, params: &ModelParams<S>, h: S) -> [[S; DIM]; DIM] {
    let x0 = state.to_array();
    let mut jac = [[S::zero(); DIM]; DIM];
    let two_h = h + h;
    for col in 0..DIM {
        let mut plus = x0;
        let mut minus = x0;
        plus[col] = plus[col] + h;
        minus[col] = minus[col] - h;
        let fp = flow(plus, params);
        let fm = flow(minus, params);
        for row in 0..DIM {
            jac[row][col] = (fp[row] - fm[row]) / two_h;
        }
    }
    jac
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("Jacobian has non-finite entries")]
    NonFinite,
}

/// Eigenvalues of a 6×6 real matrix, sorted by descending real part.
pub fn eigenvalues(jac: &[[f64; DIM]; DIM]) -> Result<Vec<Complex64>, StabilityError> {
    if jac.iter().flatten().any(|x| !x.is_finite()) {
        return Err(StabilityError::NonFinite);
    }
    let m = Mat::<f64>::from_fn(DIM, DIM, |r, c| jac[r][c]);
    let mut eig = m.eigenvalues().map_err(|_| StabilityError::NoConvergence)?;
    eig.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(eig)
}

/// Eigenvalues of the finite-difference Jacobian at `state`, sorted by
/// descending real part. One of them sits at zero at every equilibrium
/// (uniform phase shift).
pub fn jacobian_eigen<S: Scalar>(
    state: &PhaseState<S>,
    params: &ModelParams<S>,
) -> Result<Vec<Complex64>, StabilityError> {
    let jac = jacobian(state, params, default_fd_step::<S>());
    eigenvalues(&jac.map(|row| row.map(|x| x.as_f64())))
}

/// Largest real part after dropping the phase-shift mode, taken to be the
/// eigenvalue of smallest modulus (first such index on ties).
pub fn max_real_excluding_symmetry(eig: &[Complex64]) -> f64 {
    let skip = eig
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, z)| match best {
            Some((_, n)) if n <= z.norm() => best,
            _ => Some((i, z.norm())),
        })
        .map(|(i, _)| i);
    eig.iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Five-point stencil, fourth order; independent of `jacobian`.
    fn jacobian_five_point(state: &PhaseState<f64>, p: &ModelParams<f64>, h: f64) -> [[f64; DIM]; DIM] {
        let x0 = state.to_array();
        let eval = |col: usize, off: f64| {
            let mut x = x0;
            x[col] += off;
            let s = PhaseState::from_array(x);
            let d = rhs(&s, p);
            let mut out = [0.0; DIM];
            out[..3].copy_from_slice(&d.dtheta);
            out[3..].copy_from_slice(&d.domega);
            out
        };
        let mut jac = [[0.0; DIM]; DIM];
        for col in 0..DIM {
            let (p2, p1, m1, m2) = (eval(col, 2.0 * h), eval(col, h), eval(col, -h), eval(col, -2.0 * h));
            for row in 0..DIM {
                jac[row][col] = (-p2[row] + 8.0 * p1[row] - 8.0 * m1[row] + m2[row]) / (12.0 * h);
            }
        }
        jac
    }

    #[test]
    fn sync_equilibrium_stable_for_attractive_pairs() {
        let p = ModelParams::new(1.0, 0.0, 0.0);
        let eig = jacobian_eigen(&PhaseState::sync(0.4), &p).unwrap();
        assert_eq!(eig.len(), 6);
        assert!(eig.iter().any(|z| z.norm() < 1e-5));
        assert!(max_real_excluding_symmetry(&eig) < 0.0);
    }

    #[test]
    fn splay_unstable_below_its_line() {
        let p = ModelParams::new(1.0, 1.0, 0.0);
        let eig = jacobian_eigen(&PhaseState::splay(), &p).unwrap();
        assert!(eig.iter().any(|z| z.norm() < 1e-5));
        assert!(max_real_excluding_symmetry(&eig) > 0.0);
    }

    #[test]
    fn symmetry_mode_dropped_once() {
        let eig = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ];
        assert_eq!(max_real_excluding_symmetry(&eig), 0.5);
        let eig = vec![Complex64::new(1e-9, 0.0), Complex64::new(-0.1, 0.0)];
        assert_eq!(max_real_excluding_symmetry(&eig), -0.1);
    }

    #[test]
    fn eigenvalues_sorted_descending() {
        let p = ModelParams::new(-0.7, 2.0, 0.3);
        let s = PhaseState::new([0.2, 1.9, -0.8], [0.1, 0.0, -0.3]);
        let eig = jacobian_eigen(&s, &p).unwrap();
        assert!(eig.windows(2).all(|w| w[0].re >= w[1].re));
    }

    /// Rotating splay state with a repeated eigenvalue pair.
    #[test]
    fn stalling_matrix_terminates() {
        let p = ModelParams::new(-0.2, 1.0, 1.6);
        let s = PhaseState::splay();
        let omega = rhs(&s, &p).domega[0] / p.epsilon;
        let eig = jacobian_eigen(&PhaseState::new(s.theta, [omega; 3]), &p).unwrap();
        assert_eq!(eig.len(), 6);
        // Trace check: the eigenvalues sum to −3ε/m.
        let sum: Complex64 = eig.iter().sum();
        assert!((sum.re + 0.3).abs() < 1e-8 && sum.im.abs() < 1e-8, "{sum}");
    }

    #[test]
    fn nonfinite_jacobian_rejected() {
        let mut jac = [[0.0; DIM]; DIM];
        jac[2][3] = f64::NAN;
        assert_eq!(eigenvalues(&jac), Err(StabilityError::NonFinite));
    }

    proptest! {
        #[test]
        fn spectrum_matches_circulant_oracle(mu in -3.0..3.0f64, gamma in -3.0..3.0f64,
                                             alpha in 0.0..3.1f64, splay in prop::bool::ANY) {
            let p = ModelParams::new(mu, gamma, alpha);
            let s = if splay { PhaseState::splay() } else { PhaseState::sync(0.0) };
            let omega = rhs(&s, &p).domega[0] / p.epsilon;
            let s = PhaseState::new(s.theta, [omega; 3]);
            let jac = jacobian(&s, &p, 1e-6);
            let got = eigenvalues(&jac).unwrap();
            // First row of the circulant block, then its DFT eigenvalues.
            let c = [jac[3][0], jac[3][1], jac[3][2]];
            let mut want = Vec::new();
            for k in 0..3 {
                let a: Complex64 = (0..3)
                    .map(|j| c[j] * Complex64::from_polar(1.0, std::f64::consts::TAU * (j * k) as f64 / 3.0))
                    .sum();
                let disc = (Complex64::new(p.epsilon * p.epsilon, 0.0) + 4.0 * a).sqrt();
                want.push((-p.epsilon + disc) / 2.0);
                want.push((-p.epsilon - disc) / 2.0);
            }
            for w in &want {
                let d = got.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d < 1e-5, "{w} not in {got:?}");
            }
        }

        #[test]
        fn stencils_agree(t in prop::array::uniform3(-4.0..4.0f64), w in prop::array::uniform3(-2.0..2.0f64),
                          mu in -5.0..5.0f64, gamma in -5.0..5.0f64, alpha in 0.0..3.1f64) {
            let p = ModelParams::new(mu, gamma, alpha);
            let s = PhaseState::new(t, w);
            let a = jacobian(&s, &p, 1e-6);
            let b = jacobian_five_point(&s, &p, 1e-3);
            for r in 0..DIM {
                for c in 0..DIM {
                    prop_assert!((a[r][c] - b[r][c]).abs() < 1e-6, "({r},{c}) {} vs {}", a[r][c], b[r][c]);
                }
            }
        }
    }
}
