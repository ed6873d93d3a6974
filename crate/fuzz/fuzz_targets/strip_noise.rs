//! Noise blanking must preserve byte length (spans stay valid offsets)
//! and be idempotent: a second pass finds nothing left to blank.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::wikitext::strip_noise;

fuzz_target!(|text: &str| {
    let stripped = strip_noise(text);
    assert_eq!(stripped.len(), text.len());
    assert_eq!(strip_noise(&stripped), stripped);
});
