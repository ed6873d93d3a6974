//! Volume-id extraction from arbitrary URLs: no panics, and any id that
//! comes back obeys the documented character set.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ident::extract_google_books_id;

fuzz_target!(|url: &str| {
    if let Some(id) = extract_google_books_id(url) {
        assert!(!id.is_empty());
        assert!(id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-'));
    }
});
