//! Batch front end: reads a JSON run config, dispatches to the analysis, and
//! writes CSV reports plus a `manifest.json` into the output directory.
//!
//! Exit status: 0 on success, 2 for invalid configs or unreadable paths,
//! 3 for numerical failures and failed checks.

mod config;
mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, ValueEnum};

use config::{AnalysisConfig, ConfigError, Mode, DEFAULT_OUTPUT};
use report::Manifest;
use run::{check_alias, run_config, CheckFailure};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "relinfo",
    version,
    about = "Relevant information loss analyses"
)]
struct Cli {
    /// Analysis to run; must match the config's mode when both are given.
    #[arg(value_enum)]
    mode: Option<Mode>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output_path).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides the config's seed).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn load_config(cli: &Cli) -> Result<(AnalysisConfig, PathBuf)> {
    let Some(path) = &cli.config else {
        return match cli.mode {
            Some(Mode::Selftest) => Ok((AnalysisConfig::selftest(), PathBuf::from("."))),
            Some(m) => Err(anyhow!(ConfigError(format!(
                "`{}` needs --config",
                m.name()
            )))),
            None => Err(anyhow!(ConfigError(
                "nothing to do: give a mode or --config".into()
            ))),
        };
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!(ConfigError(format!("reading {}: {e}", path.display()))))?;
    let mut config =
        AnalysisConfig::from_json(&text).with_context(|| path.display().to_string())?;
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    config.validate()?;
    check_alias(cli.mode, &config)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn execute(cli: &Cli) -> Result<()> {
    let Format::Csv = cli.format;
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let (config, base) = load_config(cli)?;

    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| anyhow!(ConfigError(format!("creating {}: {e}", out_dir.display()))))?;

    let outputs = run_config(&config, &base)?;
    let mut written = Vec::new();
    for t in &outputs.tables {
        t.write(&out_dir)?;
        written.push(t.file.clone());
    }
    for (file, samples) in &outputs.samples {
        let path = out_dir.join(file);
        let f =
            std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        samples.write_csv(std::io::BufWriter::new(f))?;
        written.push(file.clone());
    }

    Manifest {
        tool: "relinfo",
        version: env!("CARGO_PKG_VERSION"),
        core_version: relinfo::VERSION,
        mode: config.mode.name(),
        seed: config.seed,
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        config: serde_json::to_value(&config)?,
        outputs: written,
        started_at: started.to_rfc3339(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        wall_time_seconds: clock.elapsed().as_secs_f64(),
    }
    .write(&out_dir)?;

    match outputs.failure {
        Some(f) => Err(f.into()),
        None => Ok(()),
    }
}

fn exit_status(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailure>().is_some() {
        return 3;
    }
    match err.downcast_ref::<relinfo::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relinfo: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
