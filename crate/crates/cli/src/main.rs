//! `epgaps`: command-line front end over the core library.
//!
//! Exit codes: 0 success, 1 library or I/O error (one JSON line on stderr),
//! 2 a checker found a violated invariant, 64 usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "epgaps", version, about = "Prime-gap combinatorics toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primes up to a bound.
    Sieve(SieveArgs),
    /// Consecutive gaps `d_n = p_n - p_{n-1}` up to a bound.
    Gaps(LimitArgs),
    /// Classify a linear form in consecutive primes and count sign changes.
    Form(FormArgs),
    /// Running records of the dominant-gap ratio.
    Records(RecordsArgs),
    /// Indices with `d_n > d_{n+1} + d_{n+2}`.
    Superdominant(LimitArgs),
    /// Admissibility and smoothness of a tuple, or a numeric realization of
    /// the exponent schedule.
    Tuple(TupleArgs),
    /// Column-partition construction.
    #[command(subcommand)]
    Ept(EptCommand),
    #[command(name = "ept-params", hide = true)]
    EptParams(ParamsArgs),
    #[command(name = "ept-verify", hide = true)]
    EptVerify(VerifyArgs),
    #[command(name = "ept-simulate", hide = true)]
    EptSimulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum EptCommand {
    /// Derived parameters and their identities.
    Params(ParamsArgs),
    /// Identity, monotonicity, decomposition and counting checks.
    Verify(VerifyArgs),
    /// Placement simulator for the peak selection and its claims.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    /// Upper bound on the primes considered.
    #[arg(long)]
    pub limit: u64,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    #[arg(long)]
    pub limit: u64,
    /// Sieve segment length in odd numbers.
    #[arg(long)]
    pub segment_size: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    /// Comma-separated integer coefficients, e.g. `-1,2,-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: IntList,
    /// Largest index `n` evaluated.
    #[arg(long)]
    pub limit: usize,
    /// First index `n` evaluated.
    #[arg(long, default_value_t = 1)]
    pub from: usize,
    /// Number of sign-change positions listed in the JSON report.
    #[arg(long, default_value_t = 100)]
    pub positions: usize,
}

#[derive(Debug, Args)]
pub struct RecordsArgs {
    #[arg(long)]
    pub limit: u64,
    /// Window radius.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Damping exponent is `c1 * exp(-c2 * ell)`; `--c1 0` gives exact
    /// ratio records.
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
}

#[derive(Debug, Args)]
pub struct TupleArgs {
    /// Comma-separated offsets.
    #[arg(long, conflicts_with_all = ["h_file", "ell"])]
    pub h: Option<UIntList>,
    /// File of offsets separated by commas or whitespace.
    #[arg(long, conflicts_with = "ell")]
    pub h_file: Option<PathBuf>,
    /// Smoothness bound for pairwise differences.
    #[arg(long)]
    pub w: Option<u64>,
    /// Realize the exponent schedule at this window size.
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long, default_value_t = 1, requires = "ell")]
    pub k_mult: u64,
    /// Natural log of the scale `N`.
    #[arg(long, requires = "ell")]
    pub log_n: Option<f64>,
    /// Round every increment up to a multiple of `w#`.
    #[arg(long, requires_all = ["ell", "w"])]
    pub repair: bool,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub ell: u64,
    /// `k` is this multiple of `2(16m + 1)`.
    #[arg(long, default_value_t = 1)]
    pub k_mult: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, default_value_t = 1)]
    pub k_mult: u64,
    /// Check this many random pairs instead of all of them.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of index pairs the exhaustive check may enumerate.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, conflicts_with = "toy")]
    pub ell: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub k_mult: u64,
    /// Generalized shape `C,J,K,L`.
    #[arg(long)]
    pub toy: Option<UIntList>,
    /// Enumerate every placement (toy shapes only).
    #[arg(long, requires = "toy")]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smallest number of occupied parts per placement.
    #[arg(long)]
    pub min_occupied: Option<u64>,
    /// Largest number of placements evaluated.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Emit one JSON line per placement, then the summary line.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone)]
pub struct IntList(pub Vec<i64>);

#[derive(Debug, Clone)]
pub struct UIntList(pub Vec<u64>);

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse()
                .map_err(|_| format!("`{x}` is not a valid integer"))
        })
        .collect()
}

impl FromStr for IntList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(IntList)
    }
}

impl FromStr for UIntList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(UIntList)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(64)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::CheckFailed) => ExitCode::from(2),
        // A closed downstream pipe (`| head`) is not a failure.
        Err(commands::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.kind(), "message": e.to_string() })
            );
            ExitCode::from(1)
        }
    }
}
