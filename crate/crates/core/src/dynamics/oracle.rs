//! Fixed-step RK4 integration of the time-local master equation
//! `dρ/dt = -i(S/2)[σ₊σ₋, ρ] + γ(σ₋ρσ₊ − ½{σ₊σ₋, ρ})`, used to check the
//! closed-form solution.
//!
//! Steps are halved until `|γ| h` is small. Where `γ` has a pole (a zero of
//! `G`) the integrator jumps across it with a second-order Taylor step that
//! is centred on the pole, so the singular coefficient is never evaluated
//! at the pole itself.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    g_function, uniform_times, ModelParams, TrajectoryGrid, TrajectorySample, RATE_SINGULAR_G,
};
use crate::error::{Error, Result};
use crate::qmat::{Matrix2, QubitState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Upper bound on `|Ġ/G| h`.
    pub step_ratio: f64,
    /// Distance to a zero of `G` below which the Taylor bridge is used.
    pub bridge_width: f64,
    /// Step-doubling error estimate above which integration aborts.
    pub max_local_error: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { step_ratio: 0.02, bridge_width: 1e-8, max_local_error: 1e-3 }
    }
}

const MAX_HALVINGS: u32 = 200;

/// `(γ, S)` with `r = Ġ/G`.
fn coefficients(r: Complex64) -> (f64, f64) {
    (-2.0 * r.re, -2.0 * r.im)
}

/// Right-hand side of the master equation for given coefficients.
fn master_rhs(gamma: f64, shift: f64, rho: &Matrix2) -> Matrix2 {
    let n = Matrix2::diag(0.0, 1.0);
    let lower = Matrix2::from_real(0.0, 1.0, 0.0, 0.0);
    let comm = n * *rho - *rho * n;
    let anti = n * *rho + *rho * n;
    let jump = lower * *rho * lower.adjoint();
    comm.scale_c(Complex64::new(0.0, -0.5 * shift)) + (jump - anti.scale(0.5)).scale(gamma)
}

fn ratio(t: f64, p: &ModelParams) -> Complex64 {
    let s = g_function(t, p);
    Complex64::new(s.gdot / s.g, 0.0)
}

fn rhs(t: f64, p: &ModelParams, rho: &Matrix2) -> Matrix2 {
    let (gamma, shift) = coefficients(ratio(t, p));
    master_rhs(gamma, shift, rho)
}

fn rk4_step(t: f64, h: f64, p: &ModelParams, y: &Matrix2) -> Matrix2 {
    let k1 = rhs(t, p, y);
    let k2 = rhs(t + 0.5 * h, p, &(*y + k1.scale(0.5 * h)));
    let k3 = rhs(t + 0.5 * h, p, &(*y + k2.scale(0.5 * h)));
    let k4 = rhs(t + h, p, &(*y + k3.scale(h)));
    *y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// `y + H y' + H²/2 y''` with `y'' = A'y + A(Ay)`; `r' = −λr − γ₀λ/2 − r²`
/// follows from `G̈ + λĠ + (γ₀λ/2)G = 0`.
fn taylor_bridge(t: f64, h: f64, p: &ModelParams, y: &Matrix2) -> Matrix2 {
    let r = ratio(t, p);
    let dr = -r * p.lambda - 0.5 * p.gamma0 * p.lambda - r * r;
    let (gamma, shift) = coefficients(r);
    let (dgamma, dshift) = coefficients(dr);
    let first = master_rhs(gamma, shift, y);
    let second = master_rhs(dgamma, dshift, y) + master_rhs(gamma, shift, &first);
    *y + first.scale(h) + second.scale(0.5 * h * h)
}

/// Bisection for the sign change of `G` in `[a, b]`.
fn locate_zero(mut a: f64, mut b: f64, p: &ModelParams) -> Option<f64> {
    let ga = g_function(a, p).g;
    if ga * g_function(b, p).g > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g_function(m, p).g * ga > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Integrates from `ρ(0)` and records the state on `n` equal subintervals
/// of `[0, tmax]`.
pub fn rk4_oracle(
    params: &ModelParams,
    tmax: f64,
    n: usize,
    cfg: &OracleConfig,
) -> Result<TrajectoryGrid> {
    params.validate()?;
    if !(tmax > 0.0 && tmax.is_finite()) || n < 1 {
        return Err(Error::GridDegenerate);
    }
    let times = uniform_times(tmax, n);
    let mut rho = *params.initial_state().matrix();
    let mut t = 0.0;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(record(params, 0.0, &rho)?);

    for &target in &times[1..] {
        while t < target {
            let rem = target - t;
            let s = g_function(t, params);
            if s.g == 0.0 {
                return Err(Error::RateSingular { t });
            }
            let dist = (s.g / s.gdot).abs();
            if s.g * s.gdot < 0.0 && dist < cfg.bridge_width {
                if let Some(z) = locate_zero(t, t + 4.0 * dist, params) {
                    let h = (2.0 * (z - t)).min(rem);
                    rho = taylor_bridge(t, h, params, &rho);
                    t = if h == rem { target } else { t + h };
                    continue;
                }
            }
            let rate = (s.gdot / s.g).abs();
            let mut h = rem;
            let mut halvings = 0;
            while h * rate > cfg.step_ratio && halvings < MAX_HALVINGS {
                h *= 0.5;
                halvings += 1;
            }
            let full = rk4_step(t, h, params, &rho);
            let mid = rk4_step(t, 0.5 * h, params, &rho);
            let halves = rk4_step(t + 0.5 * h, 0.5 * h, params, &mid);
            let estimate = full.max_abs_diff(&halves);
            if !(estimate <= cfg.max_local_error) {
                return Err(Error::StepSizeTooCoarse { t, estimate });
            }
            rho = full;
            t = if h == rem { target } else { t + h };
        }
        samples.push(record(params, t, &rho)?);
    }
    Ok(TrajectoryGrid::from_parts(*params, times, samples))
}

fn record(params: &ModelParams, t: f64, rho: &Matrix2) -> Result<TrajectorySample> {
    let g = g_function(t, params);
    if g.g.abs() < RATE_SINGULAR_G {
        return Err(Error::RateSingular { t });
    }
    let (gamma, shift) = coefficients(Complex64::new(g.gdot / g.g, 0.0));
    let state = QubitState::new(*rho)?;
    Ok(TrajectorySample { g, rho: state, lrho: master_rhs(gamma, shift, state.matrix()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_trajectory, g_zeros};

    fn max_deviation(a: &TrajectoryGrid, b: &TrajectoryGrid) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| x.rho.matrix().max_abs_diff(y.rho.matrix()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn rhs_reproduces_amplitude_damping() {
        // populations decay at γ, coherence at γ/2
        let rho = Matrix2::from_real(0.75, 0.4, 0.4, 0.25);
        let d = master_rhs(2.0, 0.0, &rho);
        assert!((d.m[1][1].re + 0.5).abs() < 1e-15);
        assert!((d.m[0][0].re - 0.5).abs() < 1e-15);
        assert!((d.m[1][0].re + 0.4).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_closed_form_markovian() {
        let p = ModelParams::markovian();
        let a = rk4_oracle(&p, 15.0, 1500, &OracleConfig::default()).unwrap();
        let b = build_trajectory(&p, 15.0, 1500).unwrap();
        assert!(max_deviation(&a, &b) < 1e-9);
    }

    #[test]
    fn oracle_crosses_zeros_of_g() {
        let p = ModelParams::non_markovian();
        assert_eq!(g_zeros(&p, 5.0).len(), 2);
        let a = rk4_oracle(&p, 5.0, 5000, &OracleConfig::default()).unwrap();
        let b = build_trajectory(&p, 5.0, 5000).unwrap();
        assert!(max_deviation(&a, &b) < 1e-6);
    }

    #[test]
    fn coarse_error_budget_is_reported() {
        let p = ModelParams::non_markovian();
        let cfg = OracleConfig { step_ratio: 10.0, max_local_error: 1e-14, ..Default::default() };
        assert!(matches!(
            rk4_oracle(&p, 3.0, 10, &cfg),
            Err(Error::StepSizeTooCoarse { .. })
        ));
    }
}
