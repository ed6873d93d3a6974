//! Full citation extraction over arbitrary wikitext: must not panic, and
//! every citation must point at a real span with at most one identifier
//! per family.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::ident::Identifier;
use wikiverify::wikitext::{extract_citations, ExtractorConfig, WikiPage};

fuzz_target!(|text: &str| {
    let page = WikiPage {
        title: "Fuzz".to_string(),
        page_id: 1,
        wikitext: text.to_string(),
    };
    let config = ExtractorConfig::default();
    for citation in extract_citations(&page, &config) {
        let span = citation.source_span;
        assert!(span.start <= span.end && span.end <= text.len());
        assert!(text.is_char_boundary(span.start) && text.is_char_boundary(span.end));

        let mut isbns = 0;
        let mut dois = 0;
        let mut volume_ids = 0;
        for identifier in &citation.identifiers {
            match identifier {
                Identifier::Isbn { .. } => isbns += 1,
                Identifier::Doi { .. } => dois += 1,
                Identifier::GoogleBooksId { .. } => volume_ids += 1,
                Identifier::OpenAccessLink { .. } => {}
            }
        }
        assert!(isbns <= 1 && dois <= 1 && volume_ids <= 1);
    }
});
