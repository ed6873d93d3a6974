//! Audit the verifiability of wiki citations.
//!
//! The pipeline has five stages, each usable on its own:
//!
//! 1. [`wikitext`] extracts citations (refs, citation templates, bare ISBN
//!    magic words) from raw wiki markup.
//! 2. [`ident`] validates ISBN checksums and DOI syntax and pulls Google
//!    Books volume ids out of URLs.
//! 3. [`access`] resolves Google Books viewability (fixture-backed or live)
//!    and classifies open-access status of journal citations.
//! 4. [`scoring`] tallies per-article profiles and applies weighted score
//!    models over component proportions.
//! 5. [`ranking`] ranks articles per model and compares rankings.
//!
//! [`ingest`] streams MediaWiki XML exports and pageview count files so the
//! pipeline runs over full dumps in constant memory.

use serde::{Deserialize, Serialize};

pub mod access;
pub mod ident;
pub mod ingest;
pub mod ranking;
pub mod scoring;
pub mod wikitext;

/// Byte range into a source string. `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// True when `other` lies entirely within `self`.
    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// The spanned slice of `text`.
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}
