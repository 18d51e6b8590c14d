use std::path::PathBuf;

use thiserror::Error;

/// A rejected configuration value, named by its key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{key} {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError { key: key.into(), reason: reason.into() }
    }
}

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{op} failed{}: {source}", at(.t))]
    Numerical {
        op: &'static str,
        t: Option<f64>,
        source: qslbattery_core::Error,
    },
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: output failed validation: {reason}", .path.display())]
    Validation { path: PathBuf, reason: String },
}

fn at(t: &Option<f64>) -> String {
    match t {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl AppError {
    pub fn numerical(op: &'static str, t: Option<f64>, source: qslbattery_core::Error) -> Self {
        AppError::Numerical { op, t, source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// 1 for anything the user can fix in the input, 2 for numerical or IO
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Usage(_) => 1,
            _ => 2,
        }
    }
}
