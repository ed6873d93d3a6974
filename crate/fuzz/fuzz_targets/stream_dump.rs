//! Export streaming over arbitrary bytes: the iterator must only ever
//! yield well-formed pages or errors, never panic, and always terminate.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ingest::stream_dump;

fuzz_target!(|data: &[u8]| {
    for page in stream_dump(data) {
        match page {
            Ok(page) => assert!(!page.title.is_empty()),
            Err(_) => break,
        }
    }
});
