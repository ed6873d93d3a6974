//! Pageview line parsing with arbitrary lines and project codes: no
//! panics, and title normalization must hold its promises.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ingest::{normalize_title, parse_pageview_line};

fuzz_target!(|input: (&str, &str)| {
    let (line, project) = input;
    let _ = parse_pageview_line(line, project);
    let normalized = normalize_title(line);
    assert!(!normalized.contains('_'));
});
