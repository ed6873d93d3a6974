use std::fmt;

use wikiverify::access::AccessError;
use wikiverify::ingest::IngestError;
use wikiverify::ranking::RankingError;
use wikiverify::scoring::ScoringError;

/// Failure classes with distinct process exit codes: unreadable or
/// malformed input exits 2, resolver problems exit 3, configuration
/// problems exit 4, and anything else (output I/O) exits 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Resolver(String),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resolver(_) => 3,
            CliError::Config(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Resolver(msg) => write!(f, "resolver error: {msg}"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<AccessError> for CliError {
    fn from(err: AccessError) -> Self {
        CliError::Resolver(err.to_string())
    }
}

impl From<RankingError> for CliError {
    fn from(err: RankingError) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<ScoringError> for CliError {
    fn from(err: ScoringError) -> Self {
        match err {
            ScoringError::UnknownPreset { .. } | ScoringError::InvalidModel { .. } => {
                CliError::Config(err.to_string())
            }
            _ => CliError::Input(err.to_string()),
        }
    }
}
