//! The `essmin` command-line tool.
//!
//! ```text
//! essmin analyze  points.txt
//! essmin classify points.txt --weights power:1,1 --class S
//! essmin criteria --g power:1 --mode b
//! essmin construct lemma61 --g power:1 --depth 15 --out run/
//! essmin verify --sequence run/sequence.txt --measure run/measure.txt
//! ```
//!
//! Reports are JSON (schema `essmin-report/1`). Exit status is `0` when a
//! verdict was computed, `1` on bad input and `2` when the request was
//! refused with a certificate.

pub mod commands;
pub mod format;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Refused { reason: String, certificate: String },
}

impl CliError {
    fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Refused { reason, certificate } => write!(f, "refused: {reason} ({certificate})"),
        }
    }
}

impl From<essmin::Error> for CliError {
    fn from(e: essmin::Error) -> Self {
        match e {
            essmin::Error::Refused { reason, certificate } => CliError::Refused { reason, certificate },
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "essmin", version, about = "Nontangential counting and essential minorants on the unit disk")]
pub struct Cli {
    /// Stolz aperture; overrides the `alpha` line of a sequence file.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separation, Blaschke sum and the counting distribution of a sequence.
    Analyze(AnalyzeArgs),
    /// Membership of a sequence in S_w, L_v or P_w.
    Classify(ClassifyArgs),
    /// Essential-minorant criteria for a decay bound.
    Criteria(CriteriaArgs),
    /// Build an explicit sequence (and measure) for a decay bound.
    Construct(ConstructArgs),
    /// Check a harmonic witness against a sequence.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Largest n reported in the coverage table.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Deepest level to which ring and Cantor records are expanded.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Compare m(n) with 1/g̃(n) for this decay bound.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    S,
    L,
    P,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub weights: String,
    #[arg(long, value_enum, ignore_case = true)]
    pub class: ClassArg,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Σ 1/g̃(n) < ∞.
    B,
    /// Σ w_n/g̃(n) < ∞.
    Sum,
    /// limsup g̃(⌊n/C⌋) v_n = ∞ off every thin E.
    Limsup,
    /// The annulus-integral form of the summatory condition.
    Summatory,
}

#[derive(Debug, Args)]
pub struct CriteriaArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long, value_enum, ignore_case = true)]
    pub mode: Mode,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    /// Largest C tried by the search, or the C of a single instance with --E.
    #[arg(long = "C")]
    pub c: Option<usize>,
    /// Comma-separated exceptional set for a single limsup instance.
    #[arg(long = "E")]
    pub e: Option<String>,
    #[arg(long = "E-budget", default_value_t = 1.0)]
    pub e_budget: f64,
    #[arg(long, default_value_t = 2.0)]
    pub eta1: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Lemma61,
    NecessityThm2,
    Rings,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub variant: Variant,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// v for necessity-thm2, w for the ring membership report.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long = "C", default_value_t = 1)]
    pub c: usize,
    #[arg(long = "E")]
    pub e: Option<String>,
    /// Companions per point in necessity-thm2.
    #[arg(long, default_value_t = essmin::construction::DEFAULT_THICKENING)]
    pub thickening: usize,
    /// Ring levels: `geometric:start,ratio`, `arithmetic:start,step` or `explicit:n0,n1,…`.
    #[arg(long)]
    pub levels: Option<String>,
    /// Rings summarised in the report.
    #[arg(long, default_value_t = 8)]
    pub rings: usize,
    /// Directory receiving the sequence, measure and report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub sequence: PathBuf,
    #[arg(long)]
    pub measure: PathBuf,
    /// Targets for points without a `target` field are g̃ at their radius.
    #[arg(long)]
    pub g: Option<String>,
    /// `calibrate` or a positive number.
    #[arg(long = "C", default_value = "calibrate")]
    pub c: String,
    /// Use half of the chosen C.
    #[arg(long)]
    pub halve: bool,
    /// Also check inclusion and domination of the counting function.
    #[arg(long)]
    pub pipeline: bool,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    commands::dispatch(&cli)
}
