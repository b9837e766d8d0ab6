//! `citenorm` command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage or input errors, 1 on internal
//! failures (for example an unwritable output directory).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use citenorm_core::{Counting, Window};

#[derive(Parser, Debug)]
#[command(name = "citenorm", version, about = "Field-normalized journal indicators and fairness tests")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output directory; created when missing
    #[arg(long, global = true, env = "CITENORM_OUT", default_value = "citenorm-out")]
    pub out: PathBuf,

    /// Report files to write: human-readable TSV, structured JSON, or both
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// Mirror the primary table on standard output
    #[arg(long, global = true)]
    pub stdout: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Structured,
    Both,
}

impl Format {
    pub fn tsv(self) -> bool {
        self != Format::Structured
    }

    pub fn structured(self) -> bool {
        self != Format::Tsv
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the three input files and write a canonical dataset bundle
    Ingest(IngestArgs),
    /// Compute indicator tables from a bundle
    Indicators(IndicatorArgs),
    /// Run the top-z% fairness test on indicator tables
    Fairness(FairnessArgs),
    /// Correlation matrix, per-decile correlations, ECDFs and KS distances
    Correlate(CorrelateArgs),
    /// Generate a synthetic set of input files
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Directory holding journals.tsv, publications.tsv and citations.tsv
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub journals: Option<PathBuf>,
    #[arg(long)]
    pub publications: Option<PathBuf>,
    #[arg(long)]
    pub citations: Option<PathBuf>,
    /// Clusters with fewer journals are excluded with their journals
    #[arg(long, default_value_t = 10)]
    pub min_cluster_size: usize,
    /// Census year; defaults to the latest citing year
    #[arg(long)]
    pub census_year: Option<i32>,
    #[arg(long, value_enum, default_value_t = UnknownCited::Drop)]
    pub unknown_cited: UnknownCited,
    #[arg(long, value_enum, default_value_t = ZeroRefs::Drop)]
    pub zero_refs: ZeroRefs,
    /// Field delimiter of the input files
    #[arg(long, default_value_t = '\t')]
    pub delimiter: char,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum UnknownCited {
    Drop,
    Error,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ZeroRefs {
    Drop,
    Error,
}

#[derive(Args, Debug)]
pub struct IndicatorArgs {
    /// Dataset bundle written by `ingest` [default: the output directory]
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::ImpactFactor)]
    pub kind: Kind,
    /// Citation window: 2, 5 or all [default: 2, or all for total-cites and cp-ratio]
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, value_parser = parse_counting, default_value = "integer")]
    pub counting: Counting,
    /// Also write the cluster-mean rescaled table
    #[arg(long)]
    pub rescaled: bool,
    /// Write every supported indicator, raw and rescaled
    #[arg(long, conflicts_with_all = ["kind", "window", "counting"])]
    pub all: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Kind {
    ImpactFactor,
    TotalCites,
    CpRatio,
    NumeratorOnly,
}

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse::<Window>().map_err(|e| e.to_string())
}

fn parse_counting(s: &str) -> Result<Counting, String> {
    s.parse::<Counting>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct FairnessArgs {
    /// Indicator table files
    #[arg(required = true)]
    pub tables: Vec<PathBuf>,
    /// Bundle whose journals file defines the clusters [default: the output directory]
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Size of the top set, in percent
    #[arg(long, default_value_t = 10.0)]
    pub z: f64,
    #[arg(long, default_value_t = 0.90)]
    pub ci_level: f64,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    /// Indicator table files; the first is the decile baseline
    pub tables: Vec<PathBuf>,
    /// Bundle whose journals file defines the clusters [default: the output directory]
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Number of bins for per-decile correlations
    #[arg(long, default_value_t = 10)]
    pub deciles: usize,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Built-in profile name (paper2010) or a JSON profile file
    #[arg(long, default_value = "paper2010")]
    pub profile: String,
    /// Overrides the profile seed
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }
}

pub type Outcome = Result<(), Failure>;

pub trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn internal(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn internal(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

/// Joins the error chain, skipping causes already spelled out by the
/// message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in e.chain() {
        let part = cause.to_string();
        if !text.contains(&part) {
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&part);
        }
    }
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(&cli.global, a),
        Command::Indicators(a) => commands::indicators(&cli.global, a),
        Command::Fairness(a) => commands::fairness(&cli.global, a),
        Command::Correlate(a) => commands::correlate(&cli.global, a),
        Command::Synth(a) => commands::synth(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(e) | Failure::Internal(e)) = &f;
            eprintln!("error: {}", describe(e));
            ExitCode::from(f.code())
        }
    }
}
