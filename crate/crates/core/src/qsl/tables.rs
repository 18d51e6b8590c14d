use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bures_sin_sq, check_fidelity, relative_purity_of, relpurity_bound_eq4, relpurity_bound_eq6,
    QslConfig, QslResult, RelPurityMode,
};
use crate::dynamics::{
    exact_sample, g_zeros, gdot_zeros, ModelParams, TrajectoryGrid, TrajectorySample,
    RATE_SINGULAR_G,
};
use crate::error::{Error, Result};
use crate::qmat::{affinity, fidelity, schatten_norms, state_functionals, QubitState};
use crate::quadrature::{interval_integrals, prefix_sums, refine_intervals, Refinement};

/// Largest `|ln λ|` accepted after clamping eigenvalues at the floor.
const MAX_LOG: f64 = 1e3;
/// Fraction of guarded samples above which the integrand is flagged.
const SINGULAR_FRACTION: f64 = 1e-3;

/// Pointwise integrands of the time averages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrands {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
    /// `‖L(ρ_t)‖²_hs`
    pub hs_sq: f64,
    /// `‖L(ρ_t)^D‖²_hs`
    pub hs_d_sq: f64,
    /// `‖ln ρ_t‖²_hs`
    pub log_sq: f64,
    /// `‖ln ρ_t^D‖²_hs`
    pub log_d_sq: f64,
}

impl Integrands {
    pub fn of(sample: &TrajectorySample, floor: f64) -> Self {
        let l = &sample.lrho;
        let n = schatten_norms(l);
        let ln = |x: f64| x.max(floor).ln();
        let eig = sample.rho.spectrum();
        let (gg, ee) = sample.rho.populations();
        Integrands {
            op: n.op,
            tr: n.tr,
            hs: n.hs,
            hs_sq: l.frobenius_norm_sqr(),
            hs_d_sq: l.dephased().frobenius_norm_sqr(),
            log_sq: ln(eig.values[0]).powi(2) + ln(eig.values[1]).powi(2),
            log_d_sq: ln(gg).powi(2) + ln(ee).powi(2),
        }
    }

    const FIELDS: usize = 7;

    fn field(&self, i: usize) -> f64 {
        match i {
            0 => self.op,
            1 => self.tr,
            2 => self.hs,
            3 => self.hs_sq,
            4 => self.hs_d_sq,
            5 => self.log_sq,
            _ => self.log_d_sq,
        }
    }
}

/// Prefix integrals of every integrand over one trajectory, from which the
/// bounds at each grid time follow in constant time.
#[derive(Clone, Debug)]
pub struct QslTables {
    cfg: QslConfig,
    times: Vec<f64>,
    rho0: QubitState,
    purity0: f64,
    states: Vec<QubitState>,
    /// Relative entropy of coherence per sample.
    coherence: Vec<f64>,
    /// One prefix-sum column per `Integrands` field.
    cum: [Vec<f64>; Integrands::FIELDS],
    cum_eq6: Vec<f64>,
    cum_eq6_initial: Vec<f64>,
    guarded: Vec<usize>,
}

impl QslTables {
    pub fn build(grid: &TrajectoryGrid, cfg: &QslConfig) -> Result<Self> {
        if !(cfg.floor > 0.0) {
            return Err(Error::InvalidFloor(cfg.floor));
        }
        if cfg.floor.ln().abs() > MAX_LOG {
            return Err(Error::FloorTooSmall(cfg.floor.ln().abs()));
        }
        if grid.len() < 2 {
            return Err(Error::GridDegenerate);
        }
        let params = grid.params();
        let times = grid.times().to_vec();
        let h = grid.step();
        let tmax = grid.tmax();
        let samples = grid.samples();
        let rho0 = samples[0].rho;
        let purity0 = rho0.matrix().trace_product(rho0.matrix()).re;

        let pointwise: Vec<Integrands> =
            samples.iter().map(|s| Integrands::of(s, cfg.floor)).collect();
        let mut breakpoints = Vec::new();
        breakpoints.push(0.0);
        breakpoints.extend(g_zeros(params, tmax));
        breakpoints.extend(gdot_zeros(params, tmax));

        let mut cum: [Vec<f64>; Integrands::FIELDS] = Default::default();
        for (i, column) in cum.iter_mut().enumerate() {
            let values: Vec<f64> = pointwise.iter().map(|p| p.field(i)).collect();
            let mut seg = interval_integrals(&values, h, cfg.quad.scheme)?;
            if let Some(refinement) = &cfg.refine {
                refine_field(&mut seg, &times, params, cfg.floor, i, &breakpoints, refinement);
            }
            *column = prefix_sums(&seg);
        }

        // Grid-sampled singular integrands with guarded samples dropped.
        let zeros = g_zeros(params, tmax);
        let c_l1_0 = state_functionals(&rho0).l1_coherence;
        let mut guarded = Vec::with_capacity(times.len());
        let mut count = 0usize;
        let mut eq6 = Vec::with_capacity(times.len());
        let mut eq6_initial = Vec::with_capacity(times.len());
        for (s, &t) in samples.iter().zip(&times) {
            let skip = s.g.g.abs() < RATE_SINGULAR_G
                || (cfg.quad.singular_guard > 0.0
                    && zeros.iter().any(|z| (t - z).abs() < cfg.quad.singular_guard));
            if skip {
                count += 1;
                eq6.push(0.0);
                eq6_initial.push(0.0);
            } else {
                let r = (s.g.gdot / s.g.g).abs();
                eq6.push(c_l1_0 * r);
                eq6_initial.push(c_l1_0 * r / s.g.g.abs());
            }
            guarded.push(count);
        }
        let cum_eq6 = prefix_sums(&interval_integrals(&eq6, h, cfg.quad.scheme)?);
        let cum_eq6_initial = prefix_sums(&interval_integrals(&eq6_initial, h, cfg.quad.scheme)?);

        Ok(QslTables {
            cfg: *cfg,
            times,
            rho0,
            purity0,
            states: samples.iter().map(|s| s.rho).collect(),
            coherence: samples.iter().map(|s| state_functionals(&s.rho).rel_ent_coherence).collect(),
            cum,
            cum_eq6,
            cum_eq6_initial,
            guarded,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn config(&self) -> &QslConfig {
        &self.cfg
    }

    fn average(&self, field: usize, k: usize) -> f64 {
        self.cum[field][k] / self.times[k]
    }

    /// Relative-purity bound at `τ = t_k` under any mode. The two coherence
    /// modes give NaN when `ρ₀` carries no coherence but the state moves.
    pub fn relpurity(&self, k: usize, mode: RelPurityMode) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        let tau = self.times[k];
        let theta = relative_purity_of(&self.rho0, &self.states[k]).theta;
        let (integral, bound) = match mode {
            RelPurityMode::Eq4General => {
                let avg = self.average(2, k);
                (avg, relpurity_bound_eq4(theta, self.purity0, avg))
            }
            RelPurityMode::Eq6Coherence => {
                let i = self.cum_eq6[k];
                (i, relpurity_bound_eq6(theta, self.purity0, tau, i))
            }
            RelPurityMode::Eq6InitialCoherence => {
                let i = self.cum_eq6_initial[k];
                (i, relpurity_bound_eq6(theta, self.purity0, tau, i))
            }
        };
        if integral == 0.0 {
            return match mode {
                _ if theta == 0.0 => Ok(0.0),
                RelPurityMode::Eq4General => Err(Error::ZeroGenerator { tau }),
                // incoherent initial state: the coherence-based bound is undefined
                _ => Ok(f64::NAN),
            };
        }
        Ok(bound)
    }

    /// Every bound at `τ = t_k`. At `k = 0` all bounds are 0.
    pub fn result(&self, k: usize) -> Result<QslResult> {
        let tau = self.times[k];
        let rho_t = &self.states[k];
        let rp = relative_purity_of(&self.rho0, rho_t);
        let f = check_fidelity(fidelity(&self.rho0, rho_t))?;
        let a = check_fidelity(affinity(&self.rho0, rho_t))?;
        let bures = match self.cfg.variant {
            super::BuresVariant::Standard => f.sqrt().acos(),
            super::BuresVariant::AsPrinted => f.acos(),
        };
        let mut r = QslResult {
            tau,
            bures_angle: bures,
            wy_angle: a.acos(),
            theta: rp.theta,
            f_rel_purity: rp.f,
            ..QslResult::default()
        };
        if k == 0 {
            return Ok(r);
        }

        r.lambda_op = self.average(0, k);
        r.lambda_tr = self.average(1, k);
        r.lambda_hs = self.average(2, k);
        r.lambda_rms = self.average(3, k).max(0.0).sqrt();
        r.lambda_rms_d = self.average(4, k).max(0.0).sqrt();
        r.lognorm_avg = self.average(5, k).max(0.0).sqrt();
        r.lognorm_avg_d = self.average(6, k).max(0.0).sqrt();
        r.singular_integrand = self.guarded[k] as f64 > SINGULAR_FRACTION * (k + 1) as f64;

        let sin2_bures = bures_sin_sq(f, self.cfg.variant);
        let sin2_wy = 1.0 - a * a;
        if r.lambda_op == 0.0 {
            if sin2_bures > 0.0 || sin2_wy > 0.0 {
                return Err(Error::ZeroGenerator { tau });
            }
            r.stationary = true;
        } else {
            let inv = (1.0 / r.lambda_op).max(1.0 / r.lambda_tr).max(1.0 / r.lambda_hs);
            r.tau_qsl_fisher = inv * sin2_bures;
            r.tau_qsl_wy = inv * sin2_wy;
        }
        r.tau_qsl_relpurity = self.relpurity(k, self.cfg.mode)?;

        let numerator = (self.coherence[k] - self.coherence[0]).abs();
        let denominator = r.lambda_rms_d * r.lognorm_avg_d + r.lambda_rms * r.lognorm_avg;
        r.tau_csl = if denominator > 0.0 {
            numerator / denominator
        } else if numerator == 0.0 {
            0.0
        } else {
            return Err(Error::ZeroGenerator { tau });
        };
        Ok(r)
    }
}

fn refine_field(
    seg: &mut [f64],
    times: &[f64],
    params: &ModelParams,
    floor: f64,
    field: usize,
    breakpoints: &[f64],
    refinement: &Refinement,
) {
    let f = |t: f64| Integrands::of(&exact_sample(params, t), floor).field(field);
    refine_intervals(seg, times, &f, breakpoints, refinement);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_trajectory;

    #[test]
    fn first_row_is_zero() {
        let grid = build_trajectory(&ModelParams::non_markovian(), 1.0, 100).unwrap();
        let t = QslTables::build(&grid, &QslConfig::default()).unwrap();
        let r = t.result(0).unwrap();
        assert_eq!(r.tau_qsl_fisher, 0.0);
        assert_eq!(r.tau_csl, 0.0);
        assert_eq!(r.f_rel_purity, 1.0);
    }

    #[test]
    fn floor_checks() {
        let grid = build_trajectory(&ModelParams::non_markovian(), 1.0, 100).unwrap();
        let bad = QslConfig { floor: 0.0, ..Default::default() };
        assert!(matches!(QslTables::build(&grid, &bad), Err(Error::InvalidFloor(_))));
    }

    #[test]
    fn guard_flags_singular_integrand() {
        let p = ModelParams::non_markovian();
        let grid = build_trajectory(&p, 3.0, 3000).unwrap();
        let mut cfg = QslConfig::default();
        cfg.quad.singular_guard = 0.05;
        let t = QslTables::build(&grid, &cfg).unwrap();
        assert!(!t.result(1000).unwrap().singular_integrand);
        assert!(t.result(2000).unwrap().singular_integrand);
    }

    #[test]
    fn prefix_matches_single_tau() {
        let p = ModelParams::non_markovian();
        let grid = build_trajectory(&p, 2.0, 2000).unwrap();
        let cfg = QslConfig::default();
        let t = QslTables::build(&grid, &cfg).unwrap();
        let sweep = t.result(1000).unwrap();
        let cfg1 = QslConfig { quad: crate::quadrature::QuadratureSpec { n: 1000, ..cfg.quad }, ..cfg };
        let single = super::super::qsl_at(&grid, 1.0, &cfg1).unwrap();
        assert!((sweep.tau_qsl_fisher - single.tau_qsl_fisher).abs() < 1e-14);
        assert!((sweep.tau_csl - single.tau_csl).abs() < 1e-12);
    }
}
