//! Streaming input: wiki XML exports and hourly pageview count files.

pub mod dump;
pub mod pageviews;

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use dump::{stream_dump, DumpStream};
pub use pageviews::{
    aggregate_pageviews, normalize_title, parse_pageview_line, select_top, LineOutcome,
    PageviewRecord, PageviewStats,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed export at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("export truncated at byte {offset}: end of input inside a page element")]
    Truncated { offset: u64 },
}

/// Container format of an input file, detected from magic bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compression {
    Plain,
    Gzip,
    Bzip2,
}

/// Sniffs the container from a file's first bytes.
pub fn detect_compression(prefix: &[u8]) -> Compression {
    if prefix.starts_with(&[0x1f, 0x8b]) {
        Compression::Gzip
    } else if prefix.starts_with(b"BZh") {
        Compression::Bzip2
    } else {
        Compression::Plain
    }
}

/// Opens a possibly-compressed input file as a buffered byte stream.
/// Multi-member gzip/bzip2 files (the usual dump packaging) decode fully.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = BufReader::new(file);
    let compression = detect_compression(reader.fill_buf()?);
    Ok(match compression {
        Compression::Plain => Box::new(reader),
        Compression::Gzip => Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(reader))),
        Compression::Bzip2 => Box::new(BufReader::new(bzip2::bufread::MultiBzDecoder::new(reader))),
    })
}
