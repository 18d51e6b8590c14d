use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qslbattery_std::config::RunConfig;
use qslbattery_std::error::AppError;
use qslbattery_std::figure::run_figure;
use qslbattery_std::output::{metadata, write_csv};
use qslbattery_std::report::regime_report;
use qslbattery_std::sweep::{run_sweep, worker_pool};
use qslbattery_core::qsl::{BuresVariant, RelPurityMode};

#[derive(Parser)]
#[command(name = "qslbattery", version, about = "Quantum speed limits and ergotropy of a damped qubit battery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every observable on the configured grid and write a CSV
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `out_path` from the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one of the published plots as CSV plus a gnuplot stub
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Standard)]
        bures_variant: Variant,
        #[arg(long, value_enum, default_value_t = Mode::Eq6Coherence)]
        relpurity_mode: Mode,
    },
    /// Describe the coupling regime and the discharge cycles
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Also write the summary as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Standard,
    AsPrinted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Eq6Coherence,
    Eq4General,
    Eq6InitialCoherence,
}

fn run(cli: Cli) -> Result<(), AppError> {
    let pool = worker_pool()?;
    match cli.command {
        Command::Sweep { config, out } => {
            let cfg = RunConfig::from_path(&config)?;
            let out = out
                .or_else(|| cfg.out_path.clone())
                .ok_or_else(|| AppError::Usage("no --out given and no out_path in the config".into()))?;
            let sweep = pool.install(|| run_sweep(&cfg))?;
            let meta = metadata(&cfg, &sweep, None);
            write_csv(&out, &meta, &cfg.columns, &sweep.rows, &sweep.nan_columns())?;
            log::info!("wrote {} rows to {}", sweep.rows.len(), out.display());
        }
        Command::Figure { id, out_dir, bures_variant, relpurity_mode } => {
            let variant = match bures_variant {
                Variant::Standard => BuresVariant::Standard,
                Variant::AsPrinted => BuresVariant::AsPrinted,
            };
            let mode = match relpurity_mode {
                Mode::Eq6Coherence => RelPurityMode::Eq6Coherence,
                Mode::Eq4General => RelPurityMode::Eq4General,
                Mode::Eq6InitialCoherence => RelPurityMode::Eq6InitialCoherence,
            };
            std::fs::create_dir_all(&out_dir).map_err(|e| AppError::io(&out_dir, e))?;
            for path in pool.install(|| run_figure(id, &out_dir, variant, mode))? {
                log::info!("wrote {}", path.display());
            }
        }
        Command::Report { config, json } => {
            let cfg = RunConfig::from_path(&config)?;
            let report = pool.install(|| regime_report(&cfg))?;
            print!("{}", report.to_text());
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<(), AppError> {
        run(Cli::try_parse_from(std::iter::once("qslbattery").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn sweep_report_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let d = |name: &str| dir.path().join(name).display().to_string();
        std::fs::write(d("ok.json"), r#"{"tmax": 1, "samples": 200}"#).unwrap();
        std::fs::write(d("bad.json"), r#"{"gamma0": -1}"#).unwrap();

        run_args(&["sweep", "--config", &d("ok.json"), "--out", &d("ok.csv")]).unwrap();
        let text = std::fs::read_to_string(d("ok.csv")).unwrap();
        assert_eq!(text.lines().count(), 203);

        run_args(&["report", "--config", &d("ok.json"), "--json", &d("r.json")]).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d("r.json")).unwrap()).unwrap();
        assert_eq!(v["regime"], "NonMarkovian");

        let e = run_args(&["sweep", "--config", &d("bad.json"), "--out", &d("x.csv")]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = run_args(&["sweep", "--config", &d("ok.json")]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = run_args(&["figure", "--id", "6", "--out-dir", &d("figs")]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = run_args(&["sweep", "--config", &d("missing.json"), "--out", &d("x.csv")]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn unwritable_output_is_io_failure() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("ok.json");
        std::fs::write(&cfg, r#"{"tmax": 1, "samples": 200}"#).unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "").unwrap();
        let out = blocker.join("out.csv");
        let e = run_args(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
