//! DOI normalization and syntax checks: no panics, and normalization is
//! idempotent once every known prefix has been stripped.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ident::{normalize_doi, validate_doi_syntax};

fuzz_target!(|raw: &str| {
    let _ = validate_doi_syntax(raw);
    if let Some(normalized) = normalize_doi(raw) {
        assert!(!normalized.is_empty());
        assert_eq!(normalize_doi(&normalized).as_deref(), Some(normalized.as_str()));
    }
});
