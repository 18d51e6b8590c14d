//! Fixed-parameter presets for the five published plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use qslbattery_core::dynamics::ModelParams;
use qslbattery_core::qsl::{BuresVariant, RelPurityMode};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::output::{metadata, write_csv};
use crate::sweep::{run_sweep, Column};

/// Grid points per unit time for every preset.
pub const SAMPLES_PER_UNIT: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct FigurePreset {
    pub id: u8,
    pub title: &'static str,
    pub params: ModelParams,
    pub tmax: f64,
    pub columns: Vec<Column>,
}

pub fn preset(id: u8) -> Result<FigurePreset, AppError> {
    use Column::*;
    let nm = ModelParams::non_markovian();
    let (title, params, tmax, columns) = match id {
        1 => ("QSL times: Fisher, Wigner-Yanase, relative purity", nm, 3.0, vec![
            T,
            TauQslFisher,
            TauQslWy,
            TauQslRelpurity,
        ]),
        2 => ("Coherence speed limit against ergotropy and power", nm, 3.0, vec![
            T, TauCsl, TauCslX10, W, WC, PInst, PAvg,
        ]),
        3 => ("Relative-purity QSL against ergotropy and power", nm, 3.0, vec![
            T,
            TauQslRelpurity,
            W,
            WC,
            PInst,
            PAvg,
        ]),
        4 => ("Fisher QSL, ergotropy and power, weak coupling", ModelParams::markovian(), 15.0, vec![
            T,
            TauQslFisher,
            W,
            PInst,
            PAvg,
        ]),
        5 => ("Fisher and Wigner-Yanase QSL, ergotropy and power, strong coupling", nm, 3.0, vec![
            T,
            TauQslFisher,
            TauQslWy,
            W,
            PInst,
            PAvg,
        ]),
        _ => return Err(AppError::Usage(format!("figure id must be 1..5, got {id}"))),
    };
    Ok(FigurePreset { id, title, params, tmax, columns })
}

impl FigurePreset {
    pub fn config(&self, variant: BuresVariant, mode: RelPurityMode) -> RunConfig {
        RunConfig {
            model: self.params,
            tmax: self.tmax,
            samples: (self.tmax * SAMPLES_PER_UNIT as f64).round() as usize,
            bures_variant: variant,
            relpurity_mode: mode,
            columns: self.columns.clone(),
            ..RunConfig::default()
        }
    }

    pub fn csv_name(&self) -> String {
        format!("fig{}.csv", self.id)
    }

    /// gnuplot script plotting every data column against `t`.
    pub fn gnuplot_stub(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        s.push_str("set datafile separator ','\n");
        s.push_str("set datafile commentschars '#'\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str("set xlabel 't'\n");
        let plots: Vec<String> = (2..=self.columns.len())
            .map(|i| {
                let file = if i == 2 { format!("'{}'", self.csv_name()) } else { "''".into() };
                format!("{file} using 1:{i} with lines")
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }
}

/// Writes `fig<id>.csv` and `fig<id>.gp` under `out_dir`.
pub fn run_figure(
    id: u8,
    out_dir: &Path,
    variant: BuresVariant,
    mode: RelPurityMode,
) -> Result<Vec<PathBuf>, AppError> {
    let preset = preset(id)?;
    let cfg = preset.config(variant, mode);
    let sweep = run_sweep(&cfg)?;
    let extra = json!({
        "figure": {
            "id": id,
            "title": preset.title,
            "tmax_note": "plot range is a reconstruction: tmax = 3, or 15 for the weak-coupling figure",
        }
    });
    let meta = metadata(&cfg, &sweep, Some(extra));
    let csv = out_dir.join(preset.csv_name());
    write_csv(&csv, &meta, &preset.columns, &sweep.rows, &sweep.nan_columns())?;
    let gp = out_dir.join(format!("fig{id}.gp"));
    std::fs::write(&gp, preset.gnuplot_stub()).map_err(|e| AppError::io(&gp, e))?;
    Ok(vec![csv, gp])
}
