//! Command-line front end: config loading, scenario runs, fuzz campaigns and
//! artifact output.
//!
//! Exit codes: 0 success, 1 an asserted verdict was not obtained, 2 invalid
//! configuration or arguments.

pub mod config;
pub mod format;
pub mod fuzz;
pub mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use branchwise_core::conservation::Verdict;
use clap::{Args, Parser, Subcommand};

use config::{default_out_dir, parse_dims, parse_range, Family, FuzzCampaign, OutputPaths, RunConfig, Scenario, ToleranceOverrides};
use run::{execute, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario error: {0}")]
    Scenario(#[from] branchwise_core::Error),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "branchwise", version, about = "Branch-by-branch conservation scenarios and fuzzing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Path for the sweep data file (box and beamsplitter).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a seeded fuzz campaign.
    Fuzz {
        /// Dimension range, `A..B` or `A..=B`.
        #[arg(long)]
        dims: String,
        /// Seed range, `A..B` or `A..=B`.
        #[arg(long)]
        seeds: String,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long = "assert", value_parser = parse_verdict)]
        expect: Option<Verdict>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    tol_exact: Option<f64>,
    #[arg(long)]
    tol_avg: Option<f64>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    /// Output directory; defaults to $BRANCHWISE_OUT_DIR or the working directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides { exact_tol: self.tol_exact, avg_tol: self.tol_avg, cluster_tol: self.tol_cluster }
    }
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    s.parse()
}

/// Files written by a run.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub report: PathBuf,
    pub results: PathBuf,
    pub data: Option<PathBuf>,
}

fn resolve(out_dir: &Path, given: Option<&PathBuf>, default: String) -> PathBuf {
    out_dir.join(given.cloned().unwrap_or_else(|| PathBuf::from(default)))
}

pub fn write_outputs(cfg: &RunConfig, outcome: &Outcome, out_dir: &Path) -> Result<Artifacts, CliError> {
    let kind = cfg.scenario.kind().as_str();
    let arts = Artifacts {
        report: resolve(out_dir, cfg.output.report.as_ref(), format!("{kind}_report.txt")),
        results: resolve(out_dir, cfg.output.results.as_ref(), format!("{kind}_results.json")),
        data: outcome.data.as_ref().map(|_| resolve(out_dir, cfg.output.data.as_ref(), format!("{kind}_data.csv"))),
    };
    let write = |path: &Path, bytes: &[u8]| {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_owned(), source })?;
        }
        std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source })
    };
    write(&arts.report, outcome.report.as_bytes())?;
    write(&arts.results, outcome.results_json().as_bytes())?;
    if let (Some(path), Some(csv)) = (&arts.data, outcome.data_csv()) {
        write(path, &csv?)?;
    }
    Ok(arts)
}

fn build_config(command: &Command) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    match command {
        Command::Run { config, seed, csv, common } => {
            let mut cfg = RunConfig::load(config)?;
            cfg.tolerances = common.overrides().apply(cfg.tolerances)?;
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(path) = csv {
                cfg.output.data = Some(path.clone());
            }
            Ok((cfg, common.out_dir.clone()))
        }
        Command::Fuzz { dims, seeds, family, expect, seed, common } => {
            let campaign = FuzzCampaign {
                dims: parse_dims(dims).map_err(|e| CliError::Config(format!("--dims: {e}")))?,
                seeds: parse_range(seeds).map_err(|e| CliError::Config(format!("--seeds: {e}")))?,
                family: *family,
            };
            let cfg = RunConfig {
                scenario: Scenario::Fuzz(campaign),
                tolerances: common.overrides().apply(Default::default())?,
                seed: seed.unwrap_or(0),
                output: OutputPaths::default(),
                expect: *expect,
            };
            Ok((cfg, common.out_dir.clone()))
        }
    }
}

/// Parses arguments, runs, writes artifacts and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = build_config(&cli.command).and_then(|(cfg, out_dir)| {
        let outcome = execute(&cfg)?;
        let arts = write_outputs(&cfg, &outcome, &out_dir.unwrap_or_else(default_out_dir))?;
        Ok((outcome, arts))
    });
    match result {
        Ok((outcome, arts)) => {
            print!("{}", outcome.report);
            eprintln!("wrote {}", arts.report.display());
            eprintln!("wrote {}", arts.results.display());
            if let Some(d) = &arts.data {
                eprintln!("wrote {}", d.display());
            }
            if outcome.assertion_failures.is_empty() {
                EXIT_OK
            } else {
                for (check, verdict) in outcome.assertion_failures.iter().take(10) {
                    eprintln!("assertion failed: {check}: got {verdict}");
                }
                EXIT_ASSERTION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
