//! Command-line front end for the citation-verifiability toolkit: extract
//! citations from a wiki XML export, validate their identifiers, resolve
//! book-link access, score and rank articles, and aggregate pageviews.

mod commands;
mod error;
mod output;
mod settings;
mod transport;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::CliError;
use settings::Settings;

#[derive(Debug, Parser)]
#[command(name = "wikiverify", version, about, propagate_version = true)]
pub struct Cli {
    /// JSON run-configuration file; command-line flags override it
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory output files are written to (default ".")
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Pageview project code articles are counted under (default "en")
    #[arg(long, global = true, value_name = "CODE")]
    pub project: Option<String>,

    /// Comma-separated score models: preset names (model1..model4) and/or
    /// paths to score-model JSON files
    #[arg(long, global = true, value_name = "LIST")]
    pub models: Option<String>,

    /// Override every selected model's zero-denominator policy
    #[arg(long, global = true, value_enum, value_name = "POLICY")]
    pub zero_denominator_policy: Option<PolicyArg>,

    /// JSONL fixture mapping volume ids to resolution records
    #[arg(long, global = true, value_name = "PATH")]
    pub resolver_fixture: Option<PathBuf>,

    /// Resolve volume ids against the live catalog API; the key is read
    /// from GOOGLE_BOOKS_API_KEY
    #[arg(long, global = true)]
    pub live: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract citations from a wiki XML export into citations.jsonl
    Extract {
        /// XML export, plain or gzip/bzip2 compressed
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Validate identifiers and resolve volume access into annotated.jsonl
    Validate {
        /// Extracted citations (default <output-dir>/citations.jsonl)
        #[arg(long, value_name = "PATH")]
        citations: Option<PathBuf>,
    },
    /// Score articles under the selected models
    Score {
        /// Annotated citations (default <output-dir>/annotated.jsonl)
        #[arg(long, value_name = "PATH")]
        annotated: Option<PathBuf>,
    },
    /// Rank articles per model by score
    Rank {
        /// Annotated citations (default <output-dir>/annotated.jsonl)
        #[arg(long, value_name = "PATH")]
        annotated: Option<PathBuf>,
    },
    /// Compare every other selected model's ranking against the first
    Compare {
        /// Annotated citations (default <output-dir>/annotated.jsonl)
        #[arg(long, value_name = "PATH")]
        annotated: Option<PathBuf>,
        /// Rows in each movers block (default 5)
        #[arg(long, value_name = "N")]
        movers: Option<usize>,
    },
    /// Aggregate pageviews and keep the most-viewed eligible articles
    Topn {
        /// Pageview files, plain or gzip/bzip2 compressed (repeatable)
        #[arg(long = "pageviews", value_name = "PATH", num_args = 1..)]
        pageviews: Vec<PathBuf>,
        /// Citations file whose article titles define eligibility
        /// (optional filter)
        #[arg(long, value_name = "PATH")]
        citations: Option<PathBuf>,
        /// Rows kept (default 5000)
        #[arg(long, value_name = "N")]
        top_n: Option<usize>,
    },
}

/// Command-line face of the zero-denominator policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Zero,
    One,
    Renormalize,
}

impl From<PolicyArg> for wikiverify::scoring::ZeroDenominatorPolicy {
    fn from(policy: PolicyArg) -> Self {
        match policy {
            PolicyArg::Zero => Self::Zero,
            PolicyArg::One => Self::One,
            PolicyArg::Renormalize => Self::Renormalize,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(cli)?;
    match &cli.command {
        Command::Extract { .. } => commands::extract::run(&settings),
        Command::Validate { .. } => commands::validate::run(&settings),
        Command::Score { .. } => commands::score::run(&settings),
        Command::Rank { .. } => commands::rank::run(&settings),
        Command::Compare { .. } => commands::compare::run(&settings),
        Command::Topn { .. } => commands::topn::run(&settings),
    }
}
