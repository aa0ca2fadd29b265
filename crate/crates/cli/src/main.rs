//! `valuerank`: rank candidate actions against a user's value profile and
//! evaluate the rankings against human orderings.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error,
//! 3 remote assessor failure.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use valuerank::assessor::{AssessorError, ASSESSOR_URL_ENV, DEFAULT_MAX_IN_FLIGHT};
use valuerank::dataset::DatasetError;
use valuerank::scoring::{DEFAULT_SIGMOID_SCALE, DEFAULT_WEIGHT};
use valuerank::{Method, Variant};

#[derive(Parser, Debug)]
#[command(name = "valuerank", version, about = "Personalised action ranking and alignment evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank every case's actions for one subject
    Rank(RankArgs),
    /// Compare model rankings with human rankings
    Evaluate(EvaluateArgs),
    /// Run the evaluation once per ranking backend, side by side
    CompareMcdm(CompareArgs),
    /// Threshold accuracy and MAE of predicted objective scores
    AssessAccuracy(AccuracyArgs),
    /// Check input files and report every violation
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ScoringArgs {
    /// Weight of the preference discrepancy term, in [0, 1]
    #[arg(long, default_value_t = DEFAULT_WEIGHT, value_parser = parse_unit)]
    pub w: f64,

    /// Steepness of the preference sigmoid
    #[arg(long, default_value_t = DEFAULT_SIGMOID_SCALE, value_parser = parse_positive)]
    pub sigmoid_scale: f64,
}

#[derive(Args, Debug, Clone)]
pub struct AssessorArgs {
    /// Fetch objective scores from a remote assessor instead of the case file
    #[arg(long, env = ASSESSOR_URL_ENV, value_name = "URL")]
    pub assessor_url: Option<String>,

    /// Per-request timeout for the remote assessor
    #[arg(long, value_name = "SECS", default_value_t = 30.0, value_parser = parse_positive)]
    pub assessor_timeout: f64,

    /// Maximum concurrent assessor requests
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_IN_FLIGHT, value_parser = parse_count)]
    pub assessor_in_flight: usize,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long, value_name = "PATH")]
    pub cases: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub preferences: PathBuf,

    /// Subject whose preferences are used (optional if the file holds one)
    #[arg(long, value_name = "ID")]
    pub subject: Option<String>,

    #[arg(long, default_value_t = Method::Promethee)]
    pub method: Method,

    #[arg(long, default_value_t = Variant::Full)]
    pub variant: Variant,

    #[command(flatten)]
    pub scoring: ScoringArgs,

    /// Include every intermediate quantity in the JSON output
    #[arg(long)]
    pub explain: bool,

    /// Output directory; JSON goes to standard output when omitted
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads for ranking (defaults to the number of CPUs)
    #[arg(long, value_name = "N", value_parser = parse_count)]
    pub jobs: Option<usize>,

    #[command(flatten)]
    pub assessor: AssessorArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "PATH")]
    pub cases: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub preferences: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub responses: PathBuf,

    #[arg(long, default_value_t = Method::Promethee)]
    pub method: Method,

    #[arg(long, default_value_t = Variant::Full)]
    pub variant: Variant,

    #[command(flatten)]
    pub scoring: ScoringArgs,

    /// Output directory for CSV, JSON and the run manifest
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub assessor: AssessorArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, value_name = "PATH")]
    pub cases: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub preferences: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub responses: PathBuf,

    #[arg(long, default_value_t = Variant::Full)]
    pub variant: Variant,

    #[command(flatten)]
    pub scoring: ScoringArgs,

    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub assessor: AssessorArgs,
}

#[derive(Args, Debug)]
pub struct AccuracyArgs {
    /// CSV of predicted scores, one header row then one row per sample
    #[arg(long, value_name = "PATH")]
    pub predicted: PathBuf,

    /// CSV of gold scores with the same header and row count
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,

    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.05], value_parser = parse_positive)]
    pub thresholds: Vec<f64>,

    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_name = "PATH")]
    pub cases: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub preferences: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub responses: Option<PathBuf>,
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{v} is outside [0, 1]"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("{v} must be a positive number"));
    }
    Ok(v)
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|c| c.is::<AssessorError>()) {
        return 3;
    }
    let io = err.chain().any(|c| {
        c.is::<std::io::Error>() || matches!(c.downcast_ref::<DatasetError>(), Some(DatasetError::Io { .. }))
    });
    if io {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Rank(args) => commands::rank(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::CompareMcdm(args) => commands::compare_mcdm(args),
        Command::AssessAccuracy(args) => commands::assess_accuracy(args),
        Command::Validate(args) => commands::validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
