//! Quantum speed limit times along a trajectory.
//!
//! Four bounds are evaluated as functions of the driving time `τ`:
//! Bures/Fisher and Wigner-Yanase angles over time-averaged Schatten norms
//! of the generator, a relative-purity bound, and a bound on the change of
//! the relative entropy of coherence.

mod tables;

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{propagate, sample_trajectory, TrajectoryGrid};
use crate::error::{Error, Result};
use crate::qmat::{affinity, fidelity, QubitState, LOG_FLOOR};
use crate::quadrature::{QuadratureSpec, Refinement};

pub use tables::{Integrands, QslTables};

/// Slack allowed on `F ∈ [0, 1]` before an angle is rejected.
const ANGLE_DOMAIN_TOL: f64 = 1e-12;

/// How the fidelity enters the Bures angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuresVariant {
    /// `arccos √F`
    Standard,
    /// `arccos F`
    AsPrinted,
}

impl BuresVariant {
    pub fn name(self) -> &'static str {
        match self {
            BuresVariant::Standard => "standard",
            BuresVariant::AsPrinted => "as_printed",
        }
    }
}

/// Denominator used for the relative-purity bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelPurityMode {
    /// `C_l1(ρ₀)·|Ġ/G|` integrated on the sampling grid.
    Eq6Coherence,
    /// Time average of `‖L_t(ρ_t)‖_hs`.
    Eq4General,
    /// `C_l1(ρ₀)·|Ġ/G²|` integrated on the sampling grid.
    Eq6InitialCoherence,
}

impl RelPurityMode {
    pub fn name(self) -> &'static str {
        match self {
            RelPurityMode::Eq6Coherence => "eq6_coherence",
            RelPurityMode::Eq4General => "eq4_general",
            RelPurityMode::Eq6InitialCoherence => "eq6_initial_coherence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QslConfig {
    pub quad: QuadratureSpec,
    pub variant: BuresVariant,
    pub mode: RelPurityMode,
    /// Eigenvalue floor for `ln ρ`.
    pub floor: f64,
    /// Adaptive recomputation of the smooth-integrand averages near `t = 0`
    /// and the zeros of `G` and `Ġ`; `None` keeps the plain grid rule.
    pub refine: Option<Refinement>,
}

impl Default for QslConfig {
    fn default() -> Self {
        QslConfig {
            quad: QuadratureSpec::default(),
            variant: BuresVariant::Standard,
            mode: RelPurityMode::Eq6Coherence,
            floor: LOG_FLOOR,
            refine: Some(Refinement::default()),
        }
    }
}

/// All four bounds at one driving time, with their ingredients.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QslResult {
    pub tau: f64,
    pub tau_qsl_fisher: f64,
    pub tau_qsl_wy: f64,
    pub tau_qsl_relpurity: f64,
    pub tau_csl: f64,
    pub bures_angle: f64,
    pub wy_angle: f64,
    pub lambda_op: f64,
    pub lambda_tr: f64,
    pub lambda_hs: f64,
    pub theta: f64,
    pub f_rel_purity: f64,
    /// `√(avg ‖L(ρ_t)‖²)`
    pub lambda_rms: f64,
    /// `√(avg ‖L(ρ_t)^D‖²)`
    pub lambda_rms_d: f64,
    /// `√(avg ‖ln ρ_t‖²)`
    pub lognorm_avg: f64,
    /// `√(avg ‖ln ρ_t^D‖²)`
    pub lognorm_avg_d: f64,
    /// The generator vanished on `[0, τ]`; bounds are reported as 0.
    pub stationary: bool,
    /// More than 0.1% of the samples were dropped by the singular guard.
    pub singular_integrand: bool,
}

fn check_fidelity(f: f64) -> Result<f64> {
    if !(f >= -ANGLE_DOMAIN_TOL && f <= 1.0 + ANGLE_DOMAIN_TOL) {
        return Err(Error::DomainError(f));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Bures angle between `ρ₀` and `ρ_t`.
pub fn bures_angle(rho0: &QubitState, rho_t: &QubitState, variant: BuresVariant) -> Result<f64> {
    let f = check_fidelity(fidelity(rho0, rho_t))?;
    Ok(match variant {
        BuresVariant::Standard => f.sqrt().acos(),
        BuresVariant::AsPrinted => f.acos(),
    })
}

/// `sin²` of the Bures angle, evaluated without the inverse cosine.
pub(crate) fn bures_sin_sq(f: f64, variant: BuresVariant) -> f64 {
    match variant {
        BuresVariant::Standard => 1.0 - f,
        BuresVariant::AsPrinted => 1.0 - f * f,
    }
}

/// `arccos Tr(√ρ₀ √ρ_t)`
pub fn wy_angle(rho0: &QubitState, rho_t: &QubitState) -> Result<f64> {
    Ok(check_fidelity(affinity(rho0, rho_t))?.acos())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativePurity {
    /// `Tr(ρ_τ ρ₀)/Tr(ρ₀²)`
    pub f: f64,
    /// `arccos f`
    pub theta: f64,
}

pub(crate) fn relative_purity_of(rho0: &QubitState, rho_t: &QubitState) -> RelativePurity {
    let p0 = rho0.matrix().trace_product(rho0.matrix()).re;
    let f = (rho_t.matrix().trace_product(rho0.matrix()).re / p0).clamp(-1.0, 1.0);
    RelativePurity { f, theta: f.acos() }
}

pub fn relative_purity(grid: &TrajectoryGrid, tau: f64) -> Result<RelativePurity> {
    check_tau(grid, tau, true)?;
    let p = grid.params();
    Ok(relative_purity_of(&p.initial_state(), &propagate(p, tau)))
}

fn check_tau(grid: &TrajectoryGrid, tau: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { tau >= 0.0 } else { tau > 0.0 };
    if !ok || !tau.is_finite() {
        return Err(Error::GridDegenerate);
    }
    let tmax = grid.tmax();
    if tau > tmax * (1.0 + 1e-12) {
        return Err(Error::GridTooShort { tau, tmax });
    }
    Ok(())
}

/// Every bound at a single `τ`, from a fresh `quad.n`-subinterval
/// trajectory on `[0, τ]` with the parameters of `grid`.
pub fn qsl_at(grid: &TrajectoryGrid, tau: f64, cfg: &QslConfig) -> Result<QslResult> {
    check_tau(grid, tau, false)?;
    cfg.quad.validate()?;
    let local = sample_trajectory(grid.params(), tau, cfg.quad.n);
    let tables = QslTables::build(&local, cfg)?;
    tables.result(tables.len() - 1)
}

/// `(Λ_op, Λ_tr, Λ_hs)`, the time averages of the generator norms on `[0, τ]`.
pub fn time_averaged_norms(
    grid: &TrajectoryGrid,
    tau: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64, f64)> {
    let r = qsl_at(grid, tau, &QslConfig { quad: *quad, ..QslConfig::default() })?;
    Ok((r.lambda_op, r.lambda_tr, r.lambda_hs))
}

pub fn tau_qsl_fisher(
    grid: &TrajectoryGrid,
    tau: f64,
    quad: &QuadratureSpec,
    variant: BuresVariant,
) -> Result<QslResult> {
    qsl_at(grid, tau, &QslConfig { quad: *quad, variant, ..QslConfig::default() })
}

pub fn tau_qsl_wy(grid: &TrajectoryGrid, tau: f64, quad: &QuadratureSpec) -> Result<QslResult> {
    qsl_at(grid, tau, &QslConfig { quad: *quad, ..QslConfig::default() })
}

pub fn tau_qsl_relpurity(
    grid: &TrajectoryGrid,
    tau: f64,
    quad: &QuadratureSpec,
    mode: RelPurityMode,
) -> Result<QslResult> {
    qsl_at(grid, tau, &QslConfig { quad: *quad, mode, ..QslConfig::default() })
}

pub fn tau_csl(
    grid: &TrajectoryGrid,
    tau: f64,
    quad: &QuadratureSpec,
    floor: f64,
) -> Result<QslResult> {
    qsl_at(grid, tau, &QslConfig { quad: *quad, floor, ..QslConfig::default() })
}

/// `4√2 θ² Tr(ρ₀²) τ / (π² ∫₀^τ integrand)`
pub(crate) fn relpurity_bound_eq6(theta: f64, purity0: f64, tau: f64, integral: f64) -> f64 {
    4.0 * core::f64::consts::SQRT_2 * theta * theta * purity0 * tau / (PI * PI * integral)
}

/// `4 θ² Tr(ρ₀²) / (π² · avg ‖L‖_hs)`
pub(crate) fn relpurity_bound_eq4(theta: f64, purity0: f64, avg_hs: f64) -> f64 {
    4.0 * theta * theta * purity0 / (PI * PI * avg_hs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_trajectory, g_zeros, ModelParams};
    use num_complex::Complex64;

    fn rho0() -> QubitState {
        ModelParams::non_markovian().initial_state()
    }

    #[test]
    fn bures_examples() {
        let r = rho0();
        for v in [BuresVariant::Standard, BuresVariant::AsPrinted] {
            assert!(bures_angle(&r, &r, v).unwrap().abs() < 1e-7);
            let orth = bures_angle(&QubitState::ground(), &QubitState::excited(), v).unwrap();
            assert!((orth - PI / 2.0).abs() < 1e-12);
        }
        let g = QubitState::ground();
        // arccos(√0.75) = π/6, arccos(0.75)
        let s = bures_angle(&r, &g, BuresVariant::Standard).unwrap();
        assert!((s - PI / 6.0).abs() < 1e-12);
        let p = bures_angle(&r, &g, BuresVariant::AsPrinted).unwrap();
        assert!((p - 0.722_734_247_813_415_6).abs() < 1e-12);
    }

    #[test]
    fn wy_angle_at_ground() {
        let a = wy_angle(&rho0(), &QubitState::ground()).unwrap();
        assert!((a - 0.722_734_247_813_415_6).abs() < 1e-12);
    }

    #[test]
    fn relative_purity_examples() {
        let p = ModelParams::non_markovian();
        let grid = build_trajectory(&p, 3.0, 300).unwrap();
        let r = relative_purity(&grid, 0.0).unwrap();
        assert_eq!((r.f, r.theta), (1.0, 0.0));
        let z = g_zeros(&p, 3.0)[0];
        let r = relative_purity(&grid, z).unwrap();
        assert!((r.f - 0.75).abs() < 1e-12);
        assert!((r.theta - 0.722_734_247_813_415_6).abs() < 1e-12);
        let mm = relative_purity_of(&rho0(), &QubitState::maximally_mixed());
        assert!((mm.f - 0.5).abs() < 1e-15);
        assert!(matches!(relative_purity(&grid, 3.5), Err(Error::GridTooShort { .. })));
    }

    #[test]
    fn stationary_trajectory_gives_zero() {
        let p = ModelParams::non_markovian()
            .with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let grid = build_trajectory(&p, 3.0, 300).unwrap();
        let quad = QuadratureSpec { n: 200, ..Default::default() };
        let (op, tr, hs) = time_averaged_norms(&grid, 1.0, &quad).unwrap();
        assert_eq!((op, tr, hs), (0.0, 0.0, 0.0));
        for mode in [RelPurityMode::Eq6Coherence, RelPurityMode::Eq4General] {
            let r = tau_qsl_relpurity(&grid, 1.0, &quad, mode).unwrap();
            assert!(r.stationary);
            assert_eq!(r.tau_qsl_relpurity, 0.0);
            assert_eq!(r.tau_qsl_fisher, 0.0);
            assert_eq!(r.tau_csl, 0.0);
        }
    }

    #[test]
    fn norm_ordering_and_fisher_max() {
        let p = ModelParams::non_markovian();
        let grid = build_trajectory(&p, 3.0, 300).unwrap();
        let quad = QuadratureSpec { n: 400, ..Default::default() };
        let (op, tr, hs) = time_averaged_norms(&grid, 1.0, &quad).unwrap();
        assert!(op <= hs && hs <= tr);
        let r = tau_qsl_fisher(&grid, 1.0, &quad, BuresVariant::Standard).unwrap();
        let sin2 = r.bures_angle.sin().powi(2);
        assert!((r.tau_qsl_fisher - sin2 / r.lambda_op).abs() < 1e-12);
        assert!(matches!(
            tau_qsl_fisher(&grid, 4.0, &quad, BuresVariant::Standard),
            Err(Error::GridTooShort { .. })
        ));
    }

    #[test]
    fn diagonal_initial_state_has_no_coherence_bound() {
        let p = ModelParams::non_markovian()
            .with_amplitudes(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let grid = build_trajectory(&p, 3.0, 300).unwrap();
        let quad = QuadratureSpec { n: 200, ..Default::default() };
        for &tau in &[0.3, 1.0, 2.5] {
            let r = tau_csl(&grid, tau, &quad, 1e-12).unwrap();
            assert_eq!(r.tau_csl, 0.0);
            assert!(r.tau_qsl_relpurity.is_nan());
        }
    }

    #[test]
    fn bounds_vanish_as_tau_shrinks() {
        let p = ModelParams::non_markovian();
        let grid = build_trajectory(&p, 3.0, 300).unwrap();
        let quad = QuadratureSpec { n: 200, ..Default::default() };
        let r = qsl_at(&grid, 1e-4, &QslConfig { quad, ..Default::default() }).unwrap();
        assert!(r.tau_qsl_fisher < 1e-4 && r.tau_qsl_wy < 1e-4);
        assert!(r.tau_qsl_relpurity < 1e-4 && r.tau_csl < 1e-4);
    }
}
