//! Footnote scanning over arbitrary text: every span must nest correctly
//! inside the input, and the accessors must slice without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::wikitext::find_ref_spans;

fuzz_target!(|text: &str| {
    for r in find_ref_spans(text) {
        assert!(r.span.start <= r.inner_span.start);
        assert!(r.inner_span.start <= r.inner_span.end);
        assert!(r.inner_span.end <= r.span.end);
        assert!(r.span.end <= text.len());
        for offset in [r.span.start, r.span.end, r.inner_span.start, r.inner_span.end] {
            assert!(text.is_char_boundary(offset));
        }
        let _ = r.name();
        let _ = r.inner(text);
        if r.self_closing {
            assert!(r.inner(text).is_empty());
        }
    }
});
