//! Template scanning over arbitrary text: spans must stay inside the
//! input and land on character boundaries, malformed regions included.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::wikitext::parse_templates;

fuzz_target!(|text: &str| {
    let scan = parse_templates(text);
    for template in &scan.templates {
        let span = template.source_span;
        assert!(span.start < span.end && span.end <= text.len());
        assert!(text.is_char_boundary(span.start) && text.is_char_boundary(span.end));
        assert!(text[span.start..].starts_with("{{"));
        // canonical re-serialization must itself scan without panicking
        let _ = parse_templates(&template.to_wikitext());
    }
    for span in &scan.malformed_spans {
        assert!(span.start < span.end && span.end <= text.len());
        assert!(text.is_char_boundary(span.start) && text.is_char_boundary(span.end));
    }
});
