//! Reduced dynamics of a qubit decaying into a bosonic bath with a
//! Lorentzian spectral density on resonance.
//!
//! Everything is driven by the decoherence function `G(t)`:
//! `ρ_ee(t) = |G|² ρ_ee(0)`, `ρ_eg(t) = G ρ_eg(0)`. Units are `ħ = k_B = 1`
//! with time measured in `1/ω₀`.

mod oracle;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qmat::{Matrix2, QubitState, STATE_TOL};

pub use oracle::{rk4_oracle, OracleConfig};

/// `λ/γ₀` at and above which the dynamics are reported as the standard
/// (time-independent) amplitude-damping channel.
pub const STANDARD_AD_RATIO: f64 = 100.0;

/// `|G|` below which `γ(t) = -2 Re(Ġ/G)` is reported as singular.
pub const RATE_SINGULAR_G: f64 = 1e-10;

/// `|l t / 2|` below which the series form of `cosh` and `sinh(x)/x` is used.
const SERIES_CUTOFF: f64 = 1e-3;

/// Physical parameters of the model and the initial pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    /// Spectral width of the Lorentzian.
    pub lambda: f64,
    /// System-bath coupling strength.
    pub gamma0: f64,
    /// Temperature of the Gibbs reference state.
    pub temperature: f64,
    /// Amplitude of `|g⟩` in the initial state.
    pub c_g: Complex64,
    /// Amplitude of `|e⟩` in the initial state.
    pub c_e: Complex64,
}

impl ModelParams {
    pub fn new(
        omega0: f64,
        lambda: f64,
        gamma0: f64,
        temperature: f64,
        c_g: Complex64,
        c_e: Complex64,
    ) -> Result<Self> {
        let p = ModelParams { omega0, lambda, gamma0, temperature, c_g, c_e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.omega0) {
            return Err(Error::InvalidParams("omega0 must be > 0"));
        }
        if !positive(self.lambda) {
            return Err(Error::InvalidParams("lambda must be > 0"));
        }
        if !positive(self.gamma0) {
            return Err(Error::InvalidParams("gamma0 must be > 0"));
        }
        if !positive(self.temperature) {
            return Err(Error::InvalidParams("temperature must be > 0"));
        }
        let norm = self.c_g.norm_sqr() + self.c_e.norm_sqr();
        if !((norm - 1.0).abs() <= STATE_TOL) {
            return Err(Error::InvalidParams("|c_g|^2 + |c_e|^2 must equal 1"));
        }
        Ok(())
    }

    /// `|ψ₀⟩ = (√3/2)|g⟩ + (1/2)|e⟩`
    pub fn default_amplitudes() -> (Complex64, Complex64) {
        (Complex64::new(3f64.sqrt() / 2.0, 0.0), Complex64::new(0.5, 0.0))
    }

    /// `ω₀ = 1, λ = 0.5, γ₀ = 10, T = 1`: strong coupling, memory effects.
    pub fn non_markovian() -> Self {
        let (c_g, c_e) = Self::default_amplitudes();
        ModelParams { omega0: 1.0, lambda: 0.5, gamma0: 10.0, temperature: 1.0, c_g, c_e }
    }

    /// `ω₀ = 1, λ = 0.5, γ₀ = 0.1, T = 1`: weak coupling.
    pub fn markovian() -> Self {
        ModelParams { gamma0: 0.1, ..Self::non_markovian() }
    }

    pub fn with_amplitudes(self, c_g: Complex64, c_e: Complex64) -> Self {
        ModelParams { c_g, c_e, ..self }
    }

    pub fn initial_state(&self) -> QubitState {
        initial_state(self)
    }
}

fn initial_state(p: &ModelParams) -> QubitState {
    QubitState::from_parts(p.c_g.norm_sqr(), p.c_e.norm_sqr(), p.c_e * p.c_g.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingRegime {
    /// `λ < 2γ₀`: the decay rate turns negative on intervals.
    NonMarkovian,
    /// `λ ≥ 2γ₀`.
    TimeDependentMarkovian,
    /// `λ/γ₀ ≥ STANDARD_AD_RATIO`: `γ(t) ≈ γ₀`.
    StandardAD,
}

impl CouplingRegime {
    pub fn is_markovian(self) -> bool {
        !matches!(self, CouplingRegime::NonMarkovian)
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingRegime::NonMarkovian => "NonMarkovian",
            CouplingRegime::TimeDependentMarkovian => "TimeDependentMarkovian",
            CouplingRegime::StandardAD => "StandardAD",
        }
    }
}

pub fn coupling_regime(params: &ModelParams) -> CouplingRegime {
    if params.lambda < 2.0 * params.gamma0 {
        CouplingRegime::NonMarkovian
    } else if params.lambda / params.gamma0 >= STANDARD_AD_RATIO {
        CouplingRegime::StandardAD
    } else {
        CouplingRegime::TimeDependentMarkovian
    }
}

/// `G(t)` and `Ġ(t)` at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GSample {
    pub t: f64,
    pub g: f64,
    pub gdot: f64,
}

/// Complex `G(t)`, `Ġ(t)` through `l = √(λ² − 2γ₀λ)` taken as a complex root,
/// so one expression covers both the oscillating and the overdamped branch.
fn decoherence(t: f64, p: &ModelParams) -> (Complex64, Complex64) {
    let lam = p.lambda;
    let l = Complex64::new(lam * lam - 2.0 * p.gamma0 * lam, 0.0).sqrt();
    let half_t = 0.5 * t;
    let x = l * half_t;
    if x.norm() < SERIES_CUTOFF {
        let x2 = x * x;
        let cosh = 1.0 + x2 * (0.5 + x2 * (1.0 / 24.0 + x2 / 720.0));
        let sinhc = 1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0));
        let decay = (-lam * half_t).exp();
        let g = (cosh + sinhc * (lam * half_t)) * decay;
        let gdot = sinhc * (-decay * p.gamma0 * lam * half_t);
        (g, gdot)
    } else {
        // e^{-λt/2} cosh(lt/2) and e^{-λt/2} sinh(lt/2) from exponents with
        // non-positive real part, so large t cannot overflow.
        let e_plus = ((l - lam) * half_t).exp();
        let e_minus = ((-l - lam) * half_t).exp();
        let c = (e_plus + e_minus) * 0.5;
        let s = (e_plus - e_minus) * 0.5;
        let g = c + s * lam / l;
        let gdot = -s * (p.gamma0 * lam) / l;
        (g, gdot)
    }
}

/// Decoherence function and its closed-form derivative.
pub fn g_function(t: f64, params: &ModelParams) -> GSample {
    let (g, gdot) = decoherence(t, params);
    GSample { t, g: g.re, gdot: gdot.re }
}

/// Time-local decay rate and frequency shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub gamma: f64,
    pub shift: f64,
}

pub fn rates(t: f64, params: &ModelParams) -> Result<Rates> {
    let (g, gdot) = decoherence(t, params);
    if g.norm() < RATE_SINGULAR_G {
        return Err(Error::RateSingular { t });
    }
    let r = gdot / g;
    Ok(Rates { gamma: -2.0 * r.re, shift: -2.0 * r.im })
}

/// Exact solution of the master equation at time `t`.
pub fn propagate(params: &ModelParams, t: f64) -> QubitState {
    let (g, _) = decoherence(t, params);
    state_from_g(params, g.re)
}

fn state_from_g(params: &ModelParams, g: f64) -> QubitState {
    let ee0 = params.c_e.norm_sqr();
    let eg0 = params.c_e * params.c_g.conj();
    let ee = g * g * ee0;
    QubitState::from_parts(1.0 - ee, ee, eg0 * g)
}

/// `dρ/dt` along the exact trajectory, built from `G` and `Ġ` so it stays
/// finite where `γ(t)` diverges.
pub fn liouvillian_at(params: &ModelParams, t: f64) -> Matrix2 {
    let s = g_function(t, params);
    liouvillian_from(params, &s)
}

fn liouvillian_from(params: &ModelParams, s: &GSample) -> Matrix2 {
    let ee0 = params.c_e.norm_sqr();
    let eg0 = params.c_e * params.c_g.conj();
    let dee = 2.0 * s.g * s.gdot * ee0;
    let deg = eg0 * s.gdot;
    Matrix2::new((-dee).into(), deg.conj(), deg, dee.into())
}

/// Zeros of `G` in `(0, tmax]`, closed form. Empty unless `λ < 2γ₀`.
pub fn g_zeros(params: &ModelParams, tmax: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(omega) = oscillation_frequency(params) {
        // cos(ωt/2) + (λ/ω) sin(ωt/2) = 0
        let first = PI - (omega / params.lambda).atan();
        let mut k = 0.0;
        loop {
            let t = 2.0 * (first + k * PI) / omega;
            if t > tmax {
                break;
            }
            out.push(t);
            k += 1.0;
        }
    }
    out
}

/// Zeros of `Ġ` in `(0, tmax]`. Empty unless `λ < 2γ₀`.
pub fn gdot_zeros(params: &ModelParams, tmax: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(omega) = oscillation_frequency(params) {
        let mut k = 1.0;
        loop {
            let t = 2.0 * PI * k / omega;
            if t > tmax {
                break;
            }
            out.push(t);
            k += 1.0;
        }
    }
    out
}

/// `|l|` when `l` is imaginary.
fn oscillation_frequency(params: &ModelParams) -> Option<f64> {
    let disc = params.lambda * params.lambda - 2.0 * params.gamma0 * params.lambda;
    (disc < 0.0).then(|| (-disc).sqrt())
}

/// One instant of a sampled trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub g: GSample,
    pub rho: QubitState,
    /// `dρ/dt`
    pub lrho: Matrix2,
}

/// Uniformly sampled trajectory on `[0, tmax]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryGrid {
    params: ModelParams,
    times: Vec<f64>,
    samples: Vec<TrajectorySample>,
}

impl TrajectoryGrid {
    pub(crate) fn from_parts(
        params: ModelParams,
        times: Vec<f64>,
        samples: Vec<TrajectorySample>,
    ) -> Self {
        TrajectoryGrid { params, times, samples }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    /// Number of samples (`intervals + 1`).
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn tmax(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn step(&self) -> f64 {
        self.tmax() / self.intervals() as f64
    }
}

/// Uniform time nodes `k·tmax/n`, `k = 0..=n`.
pub fn uniform_times(tmax: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| tmax * k as f64 / n as f64).collect()
}

/// Samples the exact trajectory on `n` equal subintervals of `[0, tmax]`.
pub fn build_trajectory(params: &ModelParams, tmax: f64, n: usize) -> Result<TrajectoryGrid> {
    params.validate()?;
    if !(tmax > 0.0 && tmax.is_finite()) || n < 2 {
        return Err(Error::GridDegenerate);
    }
    if n % 2 != 0 {
        return Err(Error::OddSubintervals(n));
    }
    Ok(sample_trajectory(params, tmax, n))
}

/// Closed-form samples without the parity check.
pub(crate) fn sample_trajectory(params: &ModelParams, tmax: f64, n: usize) -> TrajectoryGrid {
    let times = uniform_times(tmax, n);
    let samples = times.iter().map(|&t| exact_sample(params, t)).collect();
    TrajectoryGrid { params: *params, times, samples }
}

pub(crate) fn exact_sample(params: &ModelParams, t: f64) -> TrajectorySample {
    let g = g_function(t, params);
    TrajectorySample { g, rho: state_from_g(params, g.g), lrho: liouvillian_from(params, &g) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        let mut p = ModelParams::non_markovian();
        assert_eq!(coupling_regime(&p), CouplingRegime::NonMarkovian);
        p.gamma0 = 0.1;
        assert_eq!(coupling_regime(&p), CouplingRegime::TimeDependentMarkovian);
        p.lambda = 100.0;
        assert_eq!(coupling_regime(&p), CouplingRegime::StandardAD);
        assert!(CouplingRegime::StandardAD.is_markovian());
        // boundary λ = 2γ₀ is Markovian
        p.lambda = 0.2;
        assert_eq!(coupling_regime(&p), CouplingRegime::TimeDependentMarkovian);
    }

    #[test]
    fn params_validation() {
        let mut p = ModelParams::non_markovian();
        p.gamma0 = -1.0;
        assert_eq!(p.validate(), Err(Error::InvalidParams("gamma0 must be > 0")));
        let p = ModelParams::non_markovian()
            .with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0));
        assert!(p.validate().is_err());
    }

    #[test]
    fn g_at_origin() {
        for p in [ModelParams::non_markovian(), ModelParams::markovian()] {
            let s = g_function(0.0, &p);
            assert_eq!(s.g, 1.0);
            assert_eq!(s.gdot, 0.0);
        }
    }

    #[test]
    fn critical_damping_limit() {
        // λ = 2γ₀ exactly: G = e^{-λt/2}(1 + λt/2)
        let p = ModelParams { lambda: 0.5, gamma0: 0.25, ..ModelParams::non_markovian() };
        for &t in &[0.0, 0.3, 2.0, 40.0] {
            let s = g_function(t, &p);
            let e = (-0.25 * t).exp();
            assert!((s.g - e * (1.0 + 0.25 * t)).abs() < 1e-15);
            assert!((s.gdot + e * 0.0625 * t).abs() < 1e-15);
        }
    }

    #[test]
    fn large_times_do_not_overflow() {
        let p = ModelParams { lambda: 100.0, gamma0: 0.1, ..ModelParams::non_markovian() };
        let s = g_function(50.0, &p);
        assert!(s.g.is_finite() && s.gdot.is_finite());
        assert!(s.g > 0.0 && s.g < 1.0);
    }

    #[test]
    fn rates_vanish_at_origin_and_shift_is_zero() {
        let p = ModelParams::non_markovian();
        let r = rates(0.0, &p).unwrap();
        assert_eq!(r.gamma, 0.0);
        for k in 0..300 {
            let t = 0.01 * k as f64;
            if let Ok(r) = rates(t, &p) {
                assert!(r.shift.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rates_singular_at_g_zero() {
        let p = ModelParams::non_markovian();
        let z = g_zeros(&p, 3.0)[0];
        assert!(matches!(rates(z, &p), Err(Error::RateSingular { .. })));
    }

    #[test]
    fn propagate_examples() {
        let p = ModelParams::non_markovian();
        assert!(propagate(&p, 0.0).matrix().max_abs_diff(p.initial_state().matrix()) < 1e-15);
        let ground = p.with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for &t in &[0.0, 0.7, 2.5] {
            assert_eq!(propagate(&ground, t), QubitState::ground());
            assert_eq!(liouvillian_at(&ground, t), Matrix2::ZERO);
        }
    }

    #[test]
    fn liouvillian_is_traceless_hermitian_and_zero_at_origin() {
        let p = ModelParams::non_markovian();
        assert_eq!(liouvillian_at(&p, 0.0), Matrix2::ZERO);
        for k in 0..100 {
            let l = liouvillian_at(&p, 0.031 * k as f64);
            assert!(l.trace().norm() <= 1e-14);
            assert!(l.hermiticity_defect() == 0.0);
        }
        let z = g_zeros(&p, 3.0)[0];
        assert!(liouvillian_at(&p, z).is_finite());
    }

    #[test]
    fn zeros_only_in_non_markovian_regime() {
        assert!(g_zeros(&ModelParams::markovian(), 15.0).is_empty());
        assert!(gdot_zeros(&ModelParams::markovian(), 15.0).is_empty());
        let p = ModelParams::non_markovian();
        for z in g_zeros(&p, 10.0) {
            assert!(g_function(z, &p).g.abs() < 1e-14);
        }
        for z in gdot_zeros(&p, 10.0) {
            assert!(g_function(z, &p).gdot.abs() < 1e-13);
        }
    }

    #[test]
    fn trajectory_shape_and_errors() {
        let p = ModelParams::non_markovian();
        assert_eq!(build_trajectory(&p, 0.0, 2), Err(Error::GridDegenerate));
        assert_eq!(build_trajectory(&p, 1.0, 3), Err(Error::OddSubintervals(3)));
        let grid = build_trajectory(&p, 3.0, 3000).unwrap();
        assert_eq!(grid.len(), 3001);
        assert!((grid.step() - 1e-3).abs() < 1e-15);
        assert_eq!(grid.tmax(), 3.0);
    }
}
