//! Trajectory sweep: one row of observables per grid point.

use rayon::prelude::*;

use qslbattery_core::dynamics::{build_trajectory, rates, CouplingRegime, TrajectoryGrid};
use qslbattery_core::qmat::state_functionals;
use qslbattery_core::qsl::{QslResult, QslTables};
use qslbattery_core::thermo::{ergotropy_breakdown, power_series, Hamiltonian2};
use qslbattery_core::Error;

use crate::config::RunConfig;
use crate::error::{AppError, ConfigError};

pub const THREADS_ENV: &str = "QSLBATTERY_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    T,
    G,
    Gamma,
    Purity,
    CL1,
    CRelent,
    W,
    WI,
    WC,
    PInst,
    PAvg,
    TauQslFisher,
    TauQslWy,
    TauQslRelpurity,
    TauCsl,
    /// `10·τ_CSL`, for plotting next to the ergotropies.
    TauCslX10,
}

impl Column {
    /// The sweep columns, in output order.
    pub const SWEEP: [Column; 15] = [
        Column::T,
        Column::G,
        Column::Gamma,
        Column::Purity,
        Column::CL1,
        Column::CRelent,
        Column::W,
        Column::WI,
        Column::WC,
        Column::PInst,
        Column::PAvg,
        Column::TauQslFisher,
        Column::TauQslWy,
        Column::TauQslRelpurity,
        Column::TauCsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::T => "t",
            Column::G => "g",
            Column::Gamma => "gamma",
            Column::Purity => "purity",
            Column::CL1 => "c_l1",
            Column::CRelent => "c_relent",
            Column::W => "w",
            Column::WI => "w_i",
            Column::WC => "w_c",
            Column::PInst => "p_inst",
            Column::PAvg => "p_avg",
            Column::TauQslFisher => "tau_qsl_fisher",
            Column::TauQslWy => "tau_qsl_wy",
            Column::TauQslRelpurity => "tau_qsl_relpurity",
            Column::TauCsl => "tau_csl",
            Column::TauCslX10 => "tau_csl_x10",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::SWEEP.into_iter().chain([Column::TauCslX10]).find(|c| c.name() == name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub g: f64,
    pub gamma: f64,
    pub purity: f64,
    pub c_l1: f64,
    pub c_relent: f64,
    pub w: f64,
    pub w_i: f64,
    pub w_c: f64,
    pub p_inst: f64,
    pub p_avg: f64,
    pub tau_qsl_fisher: f64,
    pub tau_qsl_wy: f64,
    pub tau_qsl_relpurity: f64,
    pub tau_csl: f64,
}

impl SweepRow {
    pub fn get(&self, c: Column) -> f64 {
        match c {
            Column::T => self.t,
            Column::G => self.g,
            Column::Gamma => self.gamma,
            Column::Purity => self.purity,
            Column::CL1 => self.c_l1,
            Column::CRelent => self.c_relent,
            Column::W => self.w,
            Column::WI => self.w_i,
            Column::WC => self.w_c,
            Column::PInst => self.p_inst,
            Column::PAvg => self.p_avg,
            Column::TauQslFisher => self.tau_qsl_fisher,
            Column::TauQslWy => self.tau_qsl_wy,
            Column::TauQslRelpurity => self.tau_qsl_relpurity,
            Column::TauCsl => self.tau_csl,
            Column::TauCslX10 => 10.0 * self.tau_csl,
        }
    }
}

/// Why a column holds `nan` on some rows.
#[derive(Clone, Debug, PartialEq)]
pub struct NanNote {
    pub column: Column,
    pub count: usize,
    pub first_t: f64,
    pub reason: &'static str,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub regime: CouplingRegime,
    pub nan_notes: Vec<NanNote>,
    /// The generator vanished identically; every bound is 0.
    pub stationary: bool,
    /// Some `τ` had more than 0.1% of its relative-purity samples guarded.
    pub singular_integrand: bool,
    /// `max |w_c − w_c_eq18_minus|` over the rows.
    pub eq18_minus_dev: f64,
    /// `max |w_c − w_c_eq18_plus|` over the rows.
    pub eq18_plus_dev: f64,
    /// Full QSL results per row, index-aligned with `rows`.
    pub qsl: Vec<QslResult>,
}

impl Sweep {
    /// Columns that may hold `nan` because a reason was recorded.
    pub fn nan_columns(&self) -> Vec<Column> {
        let mut cols: Vec<Column> = self.nan_notes.iter().map(|n| n.column).collect();
        if cols.contains(&Column::TauCsl) {
            cols.push(Column::TauCslX10);
        }
        cols
    }
}

struct Point {
    g: f64,
    gamma: f64,
    purity: f64,
    c_l1: f64,
    c_relent: f64,
    w: f64,
    w_i: f64,
    w_c: f64,
    eq18_minus: f64,
    eq18_plus: f64,
}

/// Worker pool sized by `QSLBATTERY_THREADS`, or by rayon's default.
pub fn worker_pool() -> Result<rayon::ThreadPool, ConfigError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| ConfigError::new(THREADS_ENV, "must be a positive integer"))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| ConfigError::new(THREADS_ENV, format!("rejected: {e}")))
}

/// Builds the trajectory on `[0, tmax]` and evaluates every row. Each grid
/// point is computed independently, so the result does not depend on how
/// the work is split across threads.
pub fn run_sweep(cfg: &RunConfig) -> Result<Sweep, AppError> {
    let grid = build_trajectory(&cfg.model, cfg.tmax, cfg.samples)
        .map_err(|e| AppError::numerical("build_trajectory", None, e))?;
    sweep_grid(&grid, cfg)
}

pub fn sweep_grid(grid: &TrajectoryGrid, cfg: &RunConfig) -> Result<Sweep, AppError> {
    let params = *grid.params();
    let h = Hamiltonian2::qubit(params.omega0);
    let times = grid.times();

    let points: Vec<Result<Point, AppError>> = grid
        .samples()
        .par_iter()
        .zip(times.par_iter())
        .map(|(s, &t)| {
            let gamma = match rates(t, &params) {
                Ok(r) => r.gamma,
                Err(Error::RateSingular { .. }) => f64::NAN,
                Err(e) => return Err(AppError::numerical("rates", Some(t), e)),
            };
            let f = state_functionals(&s.rho);
            let b = ergotropy_breakdown(&s.rho, &h, params.temperature, cfg.epsilon_floor)
                .map_err(|e| AppError::numerical("ergotropy_breakdown", Some(t), e))?;
            Ok(Point {
                g: s.g.g,
                gamma,
                purity: f.purity,
                c_l1: f.l1_coherence,
                c_relent: f.rel_ent_coherence,
                w: b.w,
                w_i: b.w_i,
                w_c: b.w_c,
                eq18_minus: b.w_c_eq18_minus,
                eq18_plus: b.w_c_eq18_plus,
            })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;

    let w: Vec<f64> = points.iter().map(|p| p.w).collect();
    let power = power_series(times, &w, cfg.avg_power_t0)
        .map_err(|e| AppError::numerical("power_series", None, e))?;

    let tables = QslTables::build(grid, &cfg.qsl_config())
        .map_err(|e| AppError::numerical("qsl_tables", None, e))?;
    let qsl: Vec<Result<QslResult, AppError>> = (0..tables.len())
        .into_par_iter()
        .map(|k| tables.result(k).map_err(|e| AppError::numerical("qsl", Some(times[k]), e)))
        .collect();
    let qsl = qsl.into_iter().collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<SweepRow> = points
        .iter()
        .enumerate()
        .map(|(k, p)| SweepRow {
            t: times[k],
            g: p.g,
            gamma: p.gamma,
            purity: p.purity,
            c_l1: p.c_l1,
            c_relent: p.c_relent,
            w: p.w,
            w_i: p.w_i,
            w_c: p.w_c,
            p_inst: power.p_inst[k],
            p_avg: power.p_avg[k].unwrap_or(f64::NAN),
            tau_qsl_fisher: qsl[k].tau_qsl_fisher,
            tau_qsl_wy: qsl[k].tau_qsl_wy,
            tau_qsl_relpurity: qsl[k].tau_qsl_relpurity,
            tau_csl: qsl[k].tau_csl,
        })
        .collect();

    let mut nan_notes = Vec::new();
    for (column, reason) in [
        (Column::Gamma, "decay rate is singular where |G| < 1e-10"),
        (Column::PAvg, "average power is undefined for t <= avg_power_t0"),
        (
            Column::TauQslRelpurity,
            "initial state carries no coherence; the coherence-based relative-purity bound is undefined",
        ),
    ] {
        let hits: Vec<&SweepRow> = rows.iter().filter(|r| r.get(column).is_nan()).collect();
        if let Some(first) = hits.first() {
            let level = if column == Column::PAvg { log::Level::Info } else { log::Level::Warn };
            log::log!(level, "{}: {} rows set to nan from t = {}: {reason}", column.name(), hits.len(), first.t);
            nan_notes.push(NanNote { column, count: hits.len(), first_t: first.t, reason });
        }
    }

    let dev = |f: fn(&Point) -> f64| {
        points.iter().map(|p| (p.w_c - f(p)).abs()).fold(0.0, f64::max)
    };
    Ok(Sweep {
        regime: qslbattery_core::dynamics::coupling_regime(&params),
        nan_notes,
        stationary: qsl.iter().any(|q| q.stationary),
        singular_integrand: qsl.iter().any(|q| q.singular_integrand),
        eq18_minus_dev: dev(|p| p.eq18_minus),
        eq18_plus_dev: dev(|p| p.eq18_plus),
        rows,
        qsl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn small(doc: &str) -> RunConfig {
        RunConfig::parse(doc).unwrap()
    }

    #[test]
    fn column_names_round_trip() {
        for c in Column::SWEEP.into_iter().chain([Column::TauCslX10]) {
            assert_eq!(Column::from_name(c.name()), Some(c));
        }
        assert_eq!(Column::from_name("nope"), None);
    }

    #[test]
    fn one_row_per_grid_point() {
        let s = run_sweep(&small(r#"{"tmax": 1, "samples": 200}"#)).unwrap();
        assert_eq!(s.rows.len(), 201);
        assert!(s.rows.windows(2).all(|w| w[1].t > w[0].t));
        let r0 = s.rows[0];
        assert_eq!((r0.t, r0.g, r0.tau_qsl_fisher), (0.0, 1.0, 0.0));
        assert!((r0.w - 0.25).abs() < 1e-12);
        assert!(r0.p_avg.is_nan());
        assert_eq!(s.nan_notes.len(), 1);
        assert_eq!(s.nan_notes[0].column, Column::PAvg);
        assert!(s.eq18_minus_dev < 1e-9);
    }

    #[test]
    fn excited_amplitude_zero_is_stationary() {
        let mut cfg = small(r#"{"tmax": 1, "samples": 200}"#);
        cfg.model = cfg.model.with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let s = run_sweep(&cfg).unwrap();
        assert!(s.stationary);
        for r in &s.rows {
            for c in [
                Column::Purity,
                Column::W,
                Column::WI,
                Column::WC,
                Column::PInst,
                Column::TauQslFisher,
                Column::TauQslWy,
                Column::TauQslRelpurity,
                Column::TauCsl,
                Column::CL1,
                Column::CRelent,
            ] {
                let v = r.get(c);
                if c == Column::Purity {
                    assert_eq!(v, 1.0);
                } else {
                    assert_eq!(v, 0.0, "{} at t = {}", c.name(), r.t);
                }
            }
        }
    }

    #[test]
    fn singular_rate_reported_as_nan() {
        // 1000 samples on [0, 3] do not land on the zero of G;
        // a grid tuned to it does
        let t_star = qslbattery_core::dynamics::g_zeros(&small("").model, 3.0)[0];
        let mut cfg = small(r#"{"samples": 200}"#);
        cfg.tmax = t_star * 2.0;
        let s = run_sweep(&cfg).unwrap();
        assert!(s.rows[100].gamma.is_nan());
        assert!(s.nan_notes.iter().any(|n| n.column == Column::Gamma && n.count == 1));
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let cfg = small(r#"{"tmax": 1.5, "samples": 300}"#);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_sweep(&cfg)).unwrap();
        let b = four.install(|| run_sweep(&cfg)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            for c in Column::SWEEP {
                assert_eq!(x.get(c).to_bits(), y.get(c).to_bits());
            }
        }
    }
}
