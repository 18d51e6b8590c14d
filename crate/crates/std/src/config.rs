//! Run configuration: one flat JSON object, every key optional.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use qslbattery_core::dynamics::ModelParams;
use qslbattery_core::qmat::LOG_FLOOR;
use qslbattery_core::qsl::{BuresVariant, QslConfig, RelPurityMode};
use qslbattery_core::quadrature::{QuadScheme, QuadratureSpec};

use crate::error::ConfigError;
use crate::sweep::Column;

pub const MIN_SAMPLES: usize = 200;
pub const MAX_FLOOR: f64 = 1e-6;
/// Amplitudes this close to normalized are rescaled silently.
pub const NORM_SLACK: f64 = 1e-6;

pub const KEYS: [&str; 18] = [
    "omega0",
    "lambda",
    "gamma0",
    "temperature",
    "c_g_re",
    "c_g_im",
    "c_e_re",
    "c_e_im",
    "tmax",
    "samples",
    "quad_scheme",
    "quad_n",
    "epsilon_floor",
    "bures_variant",
    "relpurity_mode",
    "avg_power_t0",
    "columns",
    "out_path",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub tmax: f64,
    /// Subintervals of the trajectory grid.
    pub samples: usize,
    /// Rule for the time averages; `quad.n` sizes single-`τ` evaluations.
    pub quad: QuadratureSpec,
    pub epsilon_floor: f64,
    pub bures_variant: BuresVariant,
    pub relpurity_mode: RelPurityMode,
    pub avg_power_t0: f64,
    pub columns: Vec<Column>,
    pub out_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelParams::non_markovian(),
            tmax: 3.0,
            samples: 3000,
            quad: QuadratureSpec::default(),
            epsilon_floor: LOG_FLOOR,
            bures_variant: BuresVariant::Standard,
            relpurity_mode: RelPurityMode::Eq6Coherence,
            avg_power_t0: 0.0,
            columns: Column::SWEEP.to_vec(),
            out_path: None,
        }
    }
}

impl RunConfig {
    /// Parses a config document; blank text means all defaults.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        if source.trim().is_empty() {
            return Ok(RunConfig::default());
        }
        let value: Value = serde_json::from_str(source)
            .map_err(|e| ConfigError::new("(document)", format!("is not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(ConfigError::new("(document)", "must be a JSON object"));
        };
        Self::from_map(&map)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::new("(document)", format!("could not be read from {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn from_map(map: &Map<String, Value>) -> Result<Self, ConfigError> {
        if let Some(key) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(key.as_str(), "is not a recognised key"));
        }
        let mut cfg = RunConfig::default();
        let m = &mut cfg.model;
        let (mut c_g, mut c_e) = (m.c_g, m.c_e);
        for (key, value) in map {
            let key = key.as_str();
            match key {
                "omega0" => m.omega0 = number(key, value)?,
                "lambda" => m.lambda = number(key, value)?,
                "gamma0" => m.gamma0 = number(key, value)?,
                "temperature" => m.temperature = number(key, value)?,
                "c_g_re" => c_g.re = number(key, value)?,
                "c_g_im" => c_g.im = number(key, value)?,
                "c_e_re" => c_e.re = number(key, value)?,
                "c_e_im" => c_e.im = number(key, value)?,
                "tmax" => cfg.tmax = number(key, value)?,
                "samples" => cfg.samples = count(key, value)?,
                "quad_scheme" => {
                    cfg.quad.scheme = match string(key, value)? {
                        "simpson" => QuadScheme::Simpson,
                        "trapezoid" => QuadScheme::Trapezoid,
                        _ => return Err(ConfigError::new(key, "must be simpson or trapezoid")),
                    }
                }
                "quad_n" => cfg.quad.n = count(key, value)?,
                "epsilon_floor" => cfg.epsilon_floor = number(key, value)?,
                "bures_variant" => {
                    cfg.bures_variant = match string(key, value)? {
                        "standard" => BuresVariant::Standard,
                        "as_printed" => BuresVariant::AsPrinted,
                        _ => return Err(ConfigError::new(key, "must be standard or as_printed")),
                    }
                }
                "relpurity_mode" => {
                    cfg.relpurity_mode = match string(key, value)? {
                        "eq6_coherence" => RelPurityMode::Eq6Coherence,
                        "eq4_general" => RelPurityMode::Eq4General,
                        "eq6_initial_coherence" => RelPurityMode::Eq6InitialCoherence,
                        _ => {
                            return Err(ConfigError::new(
                                key,
                                "must be eq6_coherence, eq4_general or eq6_initial_coherence",
                            ))
                        }
                    }
                }
                "avg_power_t0" => cfg.avg_power_t0 = number(key, value)?,
                "columns" => cfg.columns = columns(key, value)?,
                "out_path" => cfg.out_path = Some(PathBuf::from(string(key, value)?)),
                _ => unreachable!(),
            }
        }
        let (c_g, c_e) = normalize(c_g, c_e)?;
        cfg.model.c_g = c_g;
        cfg.model.c_e = c_e;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        for (key, v) in [
            ("omega0", m.omega0),
            ("lambda", m.lambda),
            ("gamma0", m.gamma0),
            ("temperature", m.temperature),
            ("tmax", self.tmax),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(key, "must be > 0"));
            }
        }
        let norm = m.c_g.norm_sqr() + m.c_e.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ConfigError::new("c_g, c_e", format!("must be normalized (got {norm})")));
        }
        if self.samples < MIN_SAMPLES || self.samples % 2 != 0 {
            return Err(ConfigError::new("samples", format!("must be even and >= {MIN_SAMPLES}")));
        }
        if self.quad.validate().is_err() {
            let reason = match self.quad.scheme {
                QuadScheme::Simpson => "must be even and >= 2 for simpson",
                QuadScheme::Trapezoid => "must be >= 2",
            };
            return Err(ConfigError::new("quad_n", reason));
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor <= MAX_FLOOR) {
            return Err(ConfigError::new("epsilon_floor", "must lie in (0, 1e-6]"));
        }
        let t0 = self.avg_power_t0;
        if !(t0 >= 0.0 && t0 <= self.tmax) {
            return Err(ConfigError::new("avg_power_t0", "must lie in [0, tmax]"));
        }
        let k = t0 / self.tmax * self.samples as f64;
        if (k - k.round()).abs() > 1e-9 * self.samples as f64 {
            return Err(ConfigError::new("avg_power_t0", "must be a grid point (a multiple of tmax/samples)"));
        }
        if self.columns.is_empty() {
            return Err(ConfigError::new("columns", "must not be empty"));
        }
        if self.columns[0] != Column::T {
            return Err(ConfigError::new("columns", "must start with t"));
        }
        for (i, c) in self.columns.iter().enumerate() {
            if self.columns[..i].contains(c) {
                return Err(ConfigError::new("columns", format!("lists {} twice", c.name())));
            }
        }
        Ok(())
    }

    pub fn qsl_config(&self) -> QslConfig {
        QslConfig {
            quad: self.quad,
            variant: self.bures_variant,
            mode: self.relpurity_mode,
            floor: self.epsilon_floor,
            ..QslConfig::default()
        }
    }

    /// Every key with its resolved value.
    pub fn to_json(&self) -> Value {
        let m = &self.model;
        json!({
            "omega0": m.omega0,
            "lambda": m.lambda,
            "gamma0": m.gamma0,
            "temperature": m.temperature,
            "c_g_re": m.c_g.re,
            "c_g_im": m.c_g.im,
            "c_e_re": m.c_e.re,
            "c_e_im": m.c_e.im,
            "tmax": self.tmax,
            "samples": self.samples,
            "quad_scheme": self.quad.scheme.name(),
            "quad_n": self.quad.n,
            "epsilon_floor": self.epsilon_floor,
            "bures_variant": self.bures_variant.name(),
            "relpurity_mode": self.relpurity_mode.name(),
            "avg_power_t0": self.avg_power_t0,
            "columns": self.columns.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "out_path": self.out_path.as_ref().map(|p| p.display().to_string()),
        })
    }
}

fn number(key: &str, v: &Value) -> Result<f64, ConfigError> {
    v.as_f64().ok_or_else(|| ConfigError::new(key, "must be a number"))
}

fn count(key: &str, v: &Value) -> Result<usize, ConfigError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| ConfigError::new(key, "must be a non-negative integer"))
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str, ConfigError> {
    v.as_str().ok_or_else(|| ConfigError::new(key, "must be a string"))
}

/// Accepts a JSON array of names or one comma-separated string.
fn columns(key: &str, v: &Value) -> Result<Vec<Column>, ConfigError> {
    let names: Vec<&str> = match v {
        Value::String(s) => s.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
        Value::Array(items) => {
            items.iter().map(|i| string(key, i)).collect::<Result<_, _>>()?
        }
        _ => return Err(ConfigError::new(key, "must be an array of column names")),
    };
    names
        .into_iter()
        .map(|n| {
            Column::from_name(n).ok_or_else(|| ConfigError::new(key, format!("names unknown column {n}")))
        })
        .collect()
}

fn normalize(c_g: Complex64, c_e: Complex64) -> Result<(Complex64, Complex64), ConfigError> {
    let norm = c_g.norm_sqr() + c_e.norm_sqr();
    if !((norm - 1.0).abs() <= NORM_SLACK) {
        return Err(ConfigError::new(
            "c_g, c_e",
            format!("must satisfy |c_g|^2 + |c_e|^2 = 1 (got {norm})"),
        ));
    }
    if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok((c_g, c_e));
    }
    let s = norm.sqrt();
    Ok((c_g / s, c_e / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("{}").unwrap(), RunConfig::default());
        let d = RunConfig::default();
        assert_eq!(d.model, ModelParams::non_markovian());
        assert_eq!((d.tmax, d.samples), (3.0, 3000));
    }

    #[test]
    fn negative_gamma0() {
        let e = RunConfig::parse(r#"{"gamma0": -1}"#).unwrap_err();
        assert_eq!(e.to_string(), "gamma0 must be > 0");
    }

    #[test]
    fn unknown_key_rejected() {
        let e = RunConfig::parse(r#"{"gamma": 1}"#).unwrap_err();
        assert_eq!(e.key, "gamma");
    }

    #[test]
    fn invariants() {
        for (doc, key) in [
            (r#"{"samples": 201}"#, "samples"),
            (r#"{"samples": 100}"#, "samples"),
            (r#"{"tmax": 0}"#, "tmax"),
            (r#"{"epsilon_floor": 1e-5}"#, "epsilon_floor"),
            (r#"{"epsilon_floor": 0}"#, "epsilon_floor"),
            (r#"{"quad_n": 3}"#, "quad_n"),
            (r#"{"avg_power_t0": 0.0005}"#, "avg_power_t0"),
            (r#"{"columns": ["w", "t"]}"#, "columns"),
            (r#"{"columns": ["t", "x"]}"#, "columns"),
            (r#"{"bures_variant": "other"}"#, "bures_variant"),
            (r#"{"samples": "many"}"#, "samples"),
            (r#"{"c_e_re": 1}"#, "c_g, c_e"),
        ] {
            assert_eq!(RunConfig::parse(doc).unwrap_err().key, key, "{doc}");
        }
        assert!(RunConfig::parse(r#"{"quad_n": 3, "quad_scheme": "trapezoid"}"#).is_ok());
        assert!(RunConfig::parse(r#"{"avg_power_t0": 1.1}"#).is_ok());
    }

    #[test]
    fn amplitudes_renormalized_within_slack() {
        let cfg = RunConfig::parse(r#"{"c_g_re": 0.8660254, "c_e_re": 0.5}"#).unwrap();
        let n = cfg.model.c_g.norm_sqr() + cfg.model.c_e.norm_sqr();
        assert!((n - 1.0).abs() < 1e-15);
        let cfg = RunConfig::parse(r#"{"c_g_re": 0, "c_g_im": 0.6, "c_e_re": 0.8}"#).unwrap();
        assert_eq!(cfg.model.c_g, Complex64::new(0.0, 0.6));
    }

    #[test]
    fn columns_forms() {
        let a = RunConfig::parse(r#"{"columns": "t, w, p_inst"}"#).unwrap();
        let b = RunConfig::parse(r#"{"columns": ["t", "w", "p_inst"]}"#).unwrap();
        assert_eq!(a.columns, vec![Column::T, Column::W, Column::PInst]);
        assert_eq!(a.columns, b.columns);
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::parse(
            r#"{"gamma0": 0.1, "relpurity_mode": "eq4_general", "out_path": "x.csv"}"#,
        )
        .unwrap();
        let Value::Object(map) = cfg.to_json() else { panic!() };
        assert_eq!(map.len(), KEYS.len());
        let mut map = map;
        map.retain(|_, v| !v.is_null());
        assert_eq!(RunConfig::from_map(&map).unwrap(), cfg);
    }
}
