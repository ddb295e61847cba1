//! The `drl` command line: compile, check, refine, sat, order.

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::algebra::rational::{parse_rational, ratio};
use crate::algebra::Rational;

pub use commands::{cmd_check, cmd_compile, cmd_order, cmd_refine, cmd_sat, LayerSource, RefineFiles};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSAT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{message}")]
    Input { path: PathBuf, message: String },
    #[error("unsatisfiable: {0}")]
    Unsat(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsat(_) => EXIT_UNSAT,
            CliError::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_ERROR,
        }
    }

    pub(crate) fn input(path: &Path, message: impl fmt::Display) -> Self {
        CliError::Input { path: path.to_path_buf(), message: format!(" {message}") }
    }
}

/// Variable-ordering request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSpec {
    Given,
    /// `None` means "use --seed".
    Random(Option<u64>),
    Corr,
    Kde(usize),
    File(PathBuf),
}

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("given", None) => Ok(OrderSpec::Given),
            ("random", None) => Ok(OrderSpec::Random(None)),
            ("random", Some(a)) => a.parse().map(|s| OrderSpec::Random(Some(s))).map_err(|_| format!("bad seed `{a}`")),
            ("corr", None) => Ok(OrderSpec::Corr),
            ("kde", None) => Ok(OrderSpec::Kde(32)),
            ("kde", Some(a)) => match a.parse() {
                Ok(b) if b >= 2 => Ok(OrderSpec::Kde(b)),
                _ => Err(format!("bad bin count `{a}` (need an integer >= 2)")),
            },
            ("file", Some(p)) if !p.is_empty() => Ok(OrderSpec::File(PathBuf::from(p))),
            _ => Err(format!("expected given|random[:SEED]|corr|kde[:BINS]|file:PATH, got `{s}`")),
        }
    }
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    match parse_rational(s) {
        Ok(r) if r > ratio(0, 1) => Ok(r),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

/// Knobs shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct Tuning {
    /// Precision for strict inequalities (`1/1000000`, `1e-6`, ...).
    #[arg(long, default_value = "1/1000000", value_parser = positive_rational)]
    pub epsilon: Rational,
    /// Satisfaction tolerance.
    #[arg(long, default_value = "1e-9", value_parser = positive_f64)]
    pub tau: f64,
    #[arg(long, default_value = "10000", value_parser = positive_usize)]
    pub max_clauses: usize,
    #[arg(long, default_value = "500000", value_parser = positive_usize)]
    pub max_resolvents: usize,
    /// given | random[:SEED] | corr | kde[:BINS] | file:PATH
    #[arg(long, default_value = "given")]
    pub order: OrderSpec,
    /// Seed for `--order random`.
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, default_value = "1", value_parser = positive_usize)]
    pub parallelism: usize,
}

impl Default for Tuning {
    fn default() -> Self {
        RunConfig::default().tuning
    }
}

/// Resolved configuration of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tuning: Tuning,
    pub skip_errors: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tuning: Tuning {
                epsilon: ratio(1, 1_000_000),
                tau: 1e-9,
                max_clauses: 10_000,
                max_resolvents: 500_000,
                order: OrderSpec::Given,
                seed: 0,
                parallelism: 1,
            },
            skip_errors: false,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "drl", version, about = "Compile linear constraints and refine numeric records to satisfy them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a constraint file into an elimination-chain artifact.
    Compile {
        #[arg(long)]
        constraints: PathBuf,
        /// CSV whose header names the variables.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Real data, for the corr/kde orderings.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Artifact path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Violation metrics of a CSV.
    Check {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Metrics JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Refine every row of a CSV.
    Refine {
        #[arg(long, required_unless_present = "compiled", conflicts_with = "compiled")]
        constraints: Option<PathBuf>,
        /// Precompiled artifact instead of --constraints.
        #[arg(long)]
        compiled: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Refined CSV (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Provenance JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write `<out>.jacobian.csv`.
        #[arg(long, requires = "out")]
        jacobian: bool,
        #[arg(long)]
        skip_errors: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Decide satisfiability.
    Sat {
        #[arg(long)]
        constraints: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Compute a variable ordering and print it as an ordering file.
    Order {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Restrict to the variables of this file.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs a parsed command; `out` receives primary output, `err` diagnostics.
pub fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Compile { constraints, data, reference, out: path, tuning } => {
            let cfg = RunConfig { tuning, skip_errors: false };
            cmd_compile(&constraints, data.as_deref(), reference.as_deref(), path.as_deref(), &cfg, out, err)
        }
        Command::Check { constraints, data, report, tuning } => {
            cmd_check(&constraints, &data, report.as_deref(), &RunConfig { tuning, skip_errors: false }, out)
        }
        Command::Refine {
            constraints,
            compiled,
            data,
            reference,
            out: path,
            report,
            jacobian,
            skip_errors,
            tuning,
        } => {
            let cfg = RunConfig { tuning, skip_errors };
            let source = match (constraints, compiled) {
                (_, Some(c)) => LayerSource::Compiled(c),
                (Some(c), None) => LayerSource::Constraints(c),
                (None, None) => return Err(CliError::Usage("one of --constraints or --compiled is required".into())),
            };
            let files = RefineFiles { data, reference, out: path, report, jacobian };
            cmd_refine(&source, &files, &cfg, out, err)
        }
        Command::Sat { constraints, tuning } => cmd_sat(&constraints, &RunConfig { tuning, skip_errors: false }, out),
        Command::Order { data, reference, constraints, out: path, tuning } => cmd_order(
            &data,
            reference.as_deref(),
            constraints.as_deref(),
            path.as_deref(),
            &RunConfig { tuning, skip_errors: false },
            out,
        ),
    }
}

/// Full entry point: argument parsing, execution, exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
