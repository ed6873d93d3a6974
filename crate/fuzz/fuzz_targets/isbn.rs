//! ISBN handling over arbitrary strings: normalization and validation
//! must not panic, normalized forms have a legal length, and validation
//! must agree between the raw and normalized spellings.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ident::{checksum_isbn10, checksum_isbn13, normalize_isbn, validate_isbn};

fuzz_target!(|raw: &str| {
    let status = validate_isbn(raw);
    if let Ok(normalized) = normalize_isbn(raw) {
        assert!(normalized.len() == 10 || normalized.len() == 13);
        assert_eq!(validate_isbn(&normalized), status);
        if normalized.len() == 10 {
            let _ = checksum_isbn10(&normalized);
        } else {
            let _ = checksum_isbn13(&normalized);
        }
    }
});
