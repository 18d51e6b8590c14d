//! Regime report: zeros of `G`, sign of the decay rate, battery cycles and
//! the extrema alignment between speed limits and thermodynamic curves.

use std::fmt::Write as _;

use serde::Serialize;

use qslbattery_core::dynamics::{
    coupling_regime, g_function, g_zeros, gdot_zeros, propagate, rates, CouplingRegime, ModelParams,
};
use qslbattery_core::extrema::{extrema_locator, pair_extrema, KindRelation};
use qslbattery_core::thermo::{ergotropy, Hamiltonian2};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::sweep::{run_sweep, Column, Sweep};

/// Ergotropy below this fraction of `ω₀` counts as fully discharged.
pub const DISCHARGED: f64 = 1e-9;
/// Revival above this fraction of `ω₀` completes a cycle.
pub const RECHARGED: f64 = 0.01;
/// Extrema below this fraction of a curve's range are ignored.
pub const PROMINENCE: f64 = 0.05;
/// Alignment tables skip the start-up transient.
pub const ALIGN_FROM: f64 = 0.2;
pub const STANDARD_AD_WINDOW: [f64; 2] = [0.1, 10.0];

#[derive(Clone, Debug, Serialize)]
pub struct StandardAdCheck {
    pub window: [f64; 2],
    /// `max |γ(t) − γ₀| / γ₀` over the window.
    pub max_rel_dev: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherentErgotropyCheck {
    pub max_dev_minus: f64,
    pub max_dev_plus: f64,
    /// The printed `+` sign reproduces the spectral coherent ergotropy.
    pub printed_sign_consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentRow {
    pub t: f64,
    pub kind: &'static str,
    pub prominence: f64,
    pub partner_t: Option<f64>,
    pub partner_kind: Option<&'static str>,
    /// Distance to the partner in grid spacings.
    pub offset: Option<usize>,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentTable {
    pub source: &'static str,
    pub target: &'static str,
    pub relation: &'static str,
    pub tolerance: usize,
    pub window: [f64; 2],
    pub rows: Vec<AlignmentRow>,
    pub all_matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub regime: &'static str,
    pub lambda: f64,
    pub gamma0: f64,
    pub tmax: f64,
    /// First three zeros of `G` in `[0, tmax]`.
    pub g_zeros: Vec<f64>,
    pub negative_gamma_intervals: Vec<[f64; 2]>,
    pub first_full_discharge: Option<f64>,
    pub cycles: usize,
    pub standard_ad: Option<StandardAdCheck>,
    pub coherent_ergotropy: CoherentErgotropyCheck,
    pub alignment: Vec<AlignmentTable>,
}

/// Intervals of `[0, tmax]` where `γ(t) < 0`. The sign of `Ġ/G` can only
/// change at zeros of `G` or `Ġ`, so it is read off between them.
pub fn negative_gamma_intervals(p: &ModelParams, tmax: f64) -> Vec<[f64; 2]> {
    let mut cuts = vec![0.0, tmax];
    cuts.extend(g_zeros(p, tmax));
    cuts.extend(gdot_zeros(p, tmax));
    cuts.retain(|&t| (0.0..=tmax).contains(&t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out: Vec<[f64; 2]> = Vec::new();
    for w in cuts.windows(2) {
        let s = g_function(0.5 * (w[0] + w[1]), p);
        if s.gdot / s.g > 0.0 {
            match out.last_mut() {
                Some(last) if last[1] == w[0] => last[1] = w[1],
                _ => out.push([w[0], w[1]]),
            }
        }
    }
    out
}

fn ergotropy_at(p: &ModelParams, t: f64) -> f64 {
    ergotropy(&propagate(p, t), &Hamiltonian2::qubit(p.omega0))
}

/// First zero of `G` at which the battery is fully discharged.
pub fn first_full_discharge(p: &ModelParams, tmax: f64) -> Option<f64> {
    g_zeros(p, tmax).into_iter().find(|&z| ergotropy_at(p, z) <= DISCHARGED * p.omega0)
}

/// Discharges (zeros of `G`) followed by a revival above `RECHARGED·ω₀`
/// before the next zero or `tmax`.
pub fn cycle_count(p: &ModelParams, tmax: f64) -> usize {
    let zeros = g_zeros(p, tmax);
    (0..zeros.len())
        .filter(|&i| {
            let (a, b) = (zeros[i], zeros.get(i + 1).copied().unwrap_or(tmax));
            (1..=400).any(|k| ergotropy_at(p, a + (b - a) * k as f64 / 400.0) > RECHARGED * p.omega0)
        })
        .count()
}

pub fn standard_ad_check(p: &ModelParams) -> StandardAdCheck {
    let [a, b] = STANDARD_AD_WINDOW;
    let n = 9900;
    let max_rel_dev = (0..=n)
        .filter_map(|k| rates(a + (b - a) * k as f64 / n as f64, p).ok())
        .map(|r| (r.gamma - p.gamma0).abs() / p.gamma0)
        .fold(0.0, f64::max);
    StandardAdCheck { window: STANDARD_AD_WINDOW, max_rel_dev }
}

/// Pairs prominent extrema of `source` with those of `target` over
/// `[from, tmax]`.
pub fn alignment_table(
    sweep: &Sweep,
    source: Column,
    target: Column,
    relation: KindRelation,
    tolerance: usize,
    from: f64,
) -> AlignmentTable {
    let start = sweep.rows.iter().position(|r| r.t >= from).unwrap_or(sweep.rows.len());
    let rows = &sweep.rows[start..];
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let locate = |c: Column| {
        let s: Vec<f64> = rows.iter().map(|r| r.get(c)).collect();
        let finite = s.iter().copied().filter(|v| v.is_finite());
        let lo = finite.clone().fold(f64::INFINITY, f64::min);
        let hi = finite.fold(f64::NEG_INFINITY, f64::max);
        extrema_locator(&times, &s, PROMINENCE * (hi - lo).max(0.0))
    };
    let pairs = pair_extrema(&locate(source), &locate(target), relation, tolerance);
    let rows: Vec<AlignmentRow> = pairs
        .iter()
        .map(|p| AlignmentRow {
            t: p.source.t,
            kind: p.source.kind.name(),
            prominence: p.source.prominence,
            partner_t: p.partner.map(|e| e.t),
            partner_kind: p.partner.map(|e| e.kind.name()),
            offset: p.offset,
            matched: p.matched,
        })
        .collect();
    AlignmentTable {
        source: source.name(),
        target: target.name(),
        relation: relation.name(),
        tolerance,
        window: [times.first().copied().unwrap_or(from), times.last().copied().unwrap_or(from)],
        all_matched: rows.iter().all(|r| r.matched),
        rows,
    }
}

pub fn regime_report(cfg: &RunConfig) -> Result<Report, AppError> {
    let p = &cfg.model;
    let sweep = run_sweep(cfg)?;
    let regime = coupling_regime(p);
    let mut zeros = g_zeros(p, cfg.tmax);
    zeros.truncate(3);
    let alignment = vec![
        alignment_table(&sweep, Column::TauCsl, Column::WC, KindRelation::Same, 1, ALIGN_FROM),
        alignment_table(
            &sweep,
            Column::TauQslRelpurity,
            Column::PInst,
            KindRelation::Opposite,
            2,
            ALIGN_FROM,
        ),
        alignment_table(&sweep, Column::TauQslFisher, Column::W, KindRelation::Any, 2, ALIGN_FROM),
        alignment_table(&sweep, Column::TauQslWy, Column::W, KindRelation::Any, 2, ALIGN_FROM),
    ];
    Ok(Report {
        regime: regime.name(),
        lambda: p.lambda,
        gamma0: p.gamma0,
        tmax: cfg.tmax,
        g_zeros: zeros,
        negative_gamma_intervals: negative_gamma_intervals(p, cfg.tmax),
        first_full_discharge: first_full_discharge(p, cfg.tmax),
        cycles: cycle_count(p, cfg.tmax),
        standard_ad: (regime == CouplingRegime::StandardAD).then(|| standard_ad_check(p)),
        coherent_ergotropy: CoherentErgotropyCheck {
            max_dev_minus: sweep.eq18_minus_dev,
            max_dev_plus: sweep.eq18_plus_dev,
            printed_sign_consistent: sweep.eq18_plus_dev <= 1e-9,
        },
        alignment,
    })
}

fn list(v: &[f64]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "regime: {} (lambda = {}, gamma0 = {})", self.regime, self.lambda, self.gamma0);
        let _ = writeln!(s, "zeros of G in [0, {}]: {}", self.tmax, list(&self.g_zeros));
        let iv: Vec<String> =
            self.negative_gamma_intervals.iter().map(|[a, b]| format!("({a:.6}, {b:.6})")).collect();
        let _ = writeln!(
            s,
            "negative decay rate on: {}",
            if iv.is_empty() { "none".to_string() } else { iv.join(", ") }
        );
        match self.first_full_discharge {
            Some(t) => {
                let _ = writeln!(s, "first full discharge: t = {t:.6}");
            }
            None => s.push_str("first full discharge: none\n"),
        }
        let _ = writeln!(s, "discharge-recharge cycles: {}", self.cycles);
        if let Some(ad) = &self.standard_ad {
            let _ = writeln!(
                s,
                "standard amplitude damping limit: max |gamma - gamma0| / gamma0 = {:.3e} on [{}, {}]",
                ad.max_rel_dev, ad.window[0], ad.window[1]
            );
        }
        let c = &self.coherent_ergotropy;
        let _ = writeln!(
            s,
            "coherent ergotropy closed form: max deviation {:.3e} with minus sign, {:.3e} with plus sign{}",
            c.max_dev_minus,
            c.max_dev_plus,
            if c.printed_sign_consistent { "" } else { " (printed plus sign disagrees)" }
        );
        for t in &self.alignment {
            let _ = writeln!(
                s,
                "\nextrema of {} vs {} ({} kind, within {} spacings, t in [{}, {}]):",
                t.source, t.target, t.relation, t.tolerance, t.window[0], t.window[1]
            );
            if t.rows.is_empty() {
                s.push_str("  no prominent extrema\n");
            }
            for r in &t.rows {
                let partner = match (r.partner_t, r.partner_kind, r.offset) {
                    (Some(pt), Some(pk), Some(o)) => format!("{pk} at {pt:.4} ({o} spacings)"),
                    _ => "none".into(),
                };
                let _ = writeln!(
                    s,
                    "  {} at {:.4} -> {} {}",
                    r.kind,
                    r.t,
                    partner,
                    if r.matched { "ok" } else { "unmatched" }
                );
            }
        }
        s
    }
}
