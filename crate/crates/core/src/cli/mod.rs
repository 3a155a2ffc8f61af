//! Command-line harness: `selftest`, `verify`, `scan` and `gap-study`.
//!
//! Exit codes: 0 success, 1 verification failure (or runtime error), 2 usage error.
//! Diagnostics go to stderr; CSV goes to `--out` or stdout.

mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{
    gap_scan_sampled, write_csv_to, Campaign, Ensemble, SampleConfig, ScanRecord, DEFAULT_SPREAD, RNG_ID,
};
use crate::inequalities::{Inequality, DEFAULT_TOL_REL};

pub use selftest::{run_selftest, CheckOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "finsler-spd", version, about = "Finsler geometry of positive-definite matrices: verification harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the built-in invariant suite.
    Selftest(CliConfig),
    /// Run a campaign and fail on any unsatisfied inequality.
    Verify(CliConfig),
    /// Run a campaign and emit CSV without failing on violations.
    Scan(CliConfig),
    /// Distance lower-bound gap along a near-commuting path.
    GapStudy(CliConfig),
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Matrix dimensions (comma list).
    #[arg(long = "dim", value_delimiter = ',', default_values_t = [2usize, 3, 5])]
    pub dims: Vec<usize>,

    /// Schatten exponents (comma list).
    #[arg(long = "p", value_delimiter = ',', default_values_t = [1.1, 1.5, 2.0, 3.0, 4.0])]
    pub p: Vec<f64>,

    /// Samples per dimension.
    #[arg(long, default_value_t = 100)]
    pub samples: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// generic, commuting_pair, commuting_triple, gamma_commuting_triple or near_commuting(EPS).
    #[arg(long, default_value = "generic")]
    pub ensemble: String,

    /// Inequality identifiers (comma list) or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub ineq: Vec<String>,

    /// Perturbation sizes for gap-study (ascending, comma list).
    #[arg(long = "eps-grid", value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    pub eps_grid: Vec<f64>,

    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Relative tolerance for declaring an inequality satisfied.
    #[arg(long, default_value_t = DEFAULT_TOL_REL)]
    pub tol: f64,
}

impl CliConfig {
    /// Parses `--ineq`; `None` means `all`.
    fn inequalities(&self) -> Result<Option<Vec<Inequality>>, Error> {
        if self.ineq.iter().any(|s| s == "all") {
            return Ok(None);
        }
        self.ineq.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>().map(Some)
    }

    fn configs(&self) -> Result<Vec<SampleConfig>, Error> {
        let ensemble: Ensemble = self.ensemble.parse()?;
        self.dims
            .iter()
            .map(|&d| SampleConfig::new(d, DEFAULT_SPREAD, ensemble, self.seed))
            .collect()
    }

    fn check_tol(&self) -> Result<(), Error> {
        if self.tol >= 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("--tol must be a nonnegative number, got {}", self.tol)))
        }
    }

    /// Provenance lines for the CSV preamble.
    fn preamble(&self, subcommand: &str) -> Vec<String> {
        let join = |v: Vec<String>| v.join(",");
        vec![
            format!("finsler-spd {subcommand}"),
            format!("dim={}", join(self.dims.iter().map(|d| d.to_string()).collect())),
            format!("p={}", join(self.p.iter().map(|p| p.to_string()).collect())),
            format!("samples={}", self.samples),
            format!("seed={}", self.seed),
            format!("ensemble={}", self.ensemble),
            format!("ineq={}", self.ineq.join(",")),
            format!("eps_grid={}", join(self.eps_grid.iter().map(|e| e.to_string()).collect())),
            format!("tol={}", self.tol),
            format!("spread={DEFAULT_SPREAD}"),
            format!("rng={RNG_ID}"),
        ]
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } | Error::UnprovenRange(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Runs the harness on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n\n{}", Cli::command().render_usage());
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Selftest(cfg) => {
            let outcomes = run_selftest(cfg.seed);
            let mut failed = 0;
            for o in &outcomes {
                if o.passed {
                    let _ = writeln!(stderr, "ok    {}", o.name);
                } else {
                    failed += 1;
                    let _ = writeln!(stderr, "FAIL  {}: {}", o.name, o.detail);
                }
            }
            let _ = writeln!(stderr, "{} checks, {} failed", outcomes.len(), failed);
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Verify(cfg) => {
            let rows = campaign_rows(cfg)?;
            emit(cfg, "verify", &rows, stdout)?;
            let bad: Vec<&ScanRecord> = rows.iter().filter(|r| !r.satisfied).collect();
            let _ = writeln!(stderr, "{} rows, {} unsatisfied", rows.len(), bad.len());
            for r in bad.iter().take(20) {
                let _ = writeln!(
                    stderr,
                    "  violation: {} p={} dim={} index={} gap={:e}",
                    r.inequality, r.p, r.dim, r.index, r.gap
                );
            }
            Ok(if bad.is_empty() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Scan(cfg) => {
            let rows = campaign_rows(cfg)?;
            emit(cfg, "scan", &rows, stdout)?;
            let _ = writeln!(stderr, "{} rows", rows.len());
            Ok(EXIT_OK)
        }
        Command::GapStudy(cfg) => {
            cfg.check_tol()?;
            for &p in &cfg.p {
                Inequality::DistanceLowerBound.validate(p)?;
            }
            let mut rows = Vec::new();
            for config in cfg.configs()? {
                let config = SampleConfig {
                    ensemble: Ensemble::NearCommuting(0.0),
                    ..config
                };
                for &p in &cfg.p {
                    rows.extend(gap_scan_sampled(&config, &cfg.eps_grid, p)?);
                }
            }
            emit(cfg, "gap-study", &rows, stdout)?;
            let _ = writeln!(stderr, "{} rows", rows.len());
            Ok(EXIT_OK)
        }
    }
}

fn campaign_rows(cfg: &CliConfig) -> Result<Vec<ScanRecord>, Failure> {
    cfg.check_tol()?;
    let selected = cfg.inequalities()?;
    let configs = cfg.configs()?;
    let campaigns = configs
        .into_iter()
        .map(|config| {
            let c = match &selected {
                Some(list) => Campaign::new(config, list, &cfg.p, cfg.samples)?,
                None => Campaign::applicable(config, &Inequality::ALL, &cfg.p, cfg.samples),
            };
            Ok(c.with_tolerance(cfg.tol))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut rows = Vec::new();
    for c in campaigns {
        rows.extend(c.run()?);
    }
    Ok(rows)
}

fn emit(cfg: &CliConfig, subcommand: &str, rows: &[ScanRecord], stdout: &mut dyn Write) -> Result<(), Failure> {
    let preamble = cfg.preamble(subcommand);
    match &cfg.out {
        Some(path) => crate::experiments::write_csv_with_preamble(rows, &preamble, path)?,
        None => write_csv_to(rows, &preamble, stdout)?,
    }
    Ok(())
}
