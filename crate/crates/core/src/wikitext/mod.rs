//! Citation extraction from wiki markup.
//!
//! Parsing is lenient end to end: malformed markup degrades into flags on
//! the affected citations, never into an error for the page.

pub mod refs;
pub mod templates;

use std::collections::HashSet;
use std::sync::LazyLock;

use indexmap::IndexMap;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::ident::{extract_google_books_id, Identifier};
use crate::Span;

pub use refs::{find_ref_spans, RefSpan};
pub use templates::{parse_templates, RawTemplate, TemplateScan};

/// One page of a wiki export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiPage {
    pub title: String,
    pub page_id: u64,
    pub wikitext: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CitationKind {
    Book,
    Journal,
    Web,
    News,
    Other,
}

/// Whether a citation sits inside a `<ref>` or free in the article body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchoring {
    Inline,
    Free,
}

/// One extracted citation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Citation {
    pub article_title: String,
    pub kind: CitationKind,
    pub anchoring: Anchoring,
    pub ref_name: Option<String>,
    /// Template parameters; positional parameters appear under "1", "2", ...
    pub params: IndexMap<String, String>,
    /// At most one ISBN, one DOI, and one Google Books id each; when a
    /// parameter family repeats, the first occurrence wins.
    pub identifiers: Vec<Identifier>,
    pub flags: Vec<String>,
    /// Recognized template name, absent for bare-identifier citations.
    pub template: Option<String>,
    pub source_span: Span,
}

impl Citation {
    pub fn isbn(&self) -> Option<&Identifier> {
        self.identifiers
            .iter()
            .find(|i| matches!(i, Identifier::Isbn { .. }))
    }

    pub fn doi(&self) -> Option<&Identifier> {
        self.identifiers
            .iter()
            .find(|i| matches!(i, Identifier::Doi { .. }))
    }

    pub fn google_books_id(&self) -> Option<&str> {
        self.identifiers.iter().find_map(|i| match i {
            Identifier::GoogleBooksId { id } => Some(id.as_str()),
            _ => None,
        })
    }
}

/// Flag values attached to citations extracted from imperfect markup.
pub const FLAG_MALFORMED_REF: &str = "malformed_ref";
pub const FLAG_MALFORMED_TEMPLATE: &str = "malformed_template";
pub const FLAG_BARE_ISBN: &str = "bare_isbn";

const DEFAULT_CITATION_TEMPLATES: &[&str] = &[
    "cite book",
    "cite journal",
    "cite web",
    "cite news",
    "citation",
    "cite conference",
    "cite thesis",
    "cite paper",
    "cite document",
    "cite study",
];

const DEFAULT_JOURNAL_MARKERS: &[&str] = &[
    "journal",
    "study",
    "dissertation",
    "paper",
    "document",
    "thesis",
    "conference",
];

/// Extraction knobs. Template names and kind markers are matched against
/// lowercased, whitespace-normalized names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractorConfig {
    pub citation_templates: Vec<String>,
    pub journal_markers: Vec<String>,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        ExtractorConfig {
            citation_templates: DEFAULT_CITATION_TEMPLATES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            journal_markers: DEFAULT_JOURNAL_MARKERS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl ExtractorConfig {
    pub fn is_citation_template(&self, name: &str) -> bool {
        self.citation_templates.iter().any(|t| t == name)
    }
}

/// Blanks HTML comments and `<nowiki>` spans with spaces so later passes
/// ignore them. The output has the same byte length as the input, keeping
/// every span a valid offset into the original text. Unterminated noise
/// runs to the end of text.
pub fn strip_noise(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = bytes.to_vec();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"<!--") {
            let end = find_sub(bytes, b"-->", i + 4)
                .map(|p| p + 3)
                .unwrap_or(bytes.len());
            blank(&mut out, i, end);
            i = end;
        } else if is_nowiki_open(bytes, i) {
            let tag_end = memchr_from(bytes, b'>', i).map(|p| p + 1);
            match tag_end {
                Some(te) if bytes[..te].ends_with(b"/>") => {
                    blank(&mut out, i, te);
                    i = te;
                }
                Some(te) => {
                    let end = find_sub_ci(bytes, b"</nowiki>", te)
                        .map(|p| p + 9)
                        .unwrap_or(bytes.len());
                    blank(&mut out, i, end);
                    i = end;
                }
                None => {
                    blank(&mut out, i, bytes.len());
                    i = bytes.len();
                }
            }
        } else {
            i += 1;
        }
    }
    String::from_utf8(out).expect("space fill keeps utf-8 valid")
}

fn is_nowiki_open(bytes: &[u8], i: usize) -> bool {
    bytes.len() >= i + 7
        && bytes[i] == b'<'
        && bytes[i + 1..i + 7].eq_ignore_ascii_case(b"nowiki")
        && matches!(bytes.get(i + 7), None | Some(b'>') | Some(b'/'))
        || bytes.len() >= i + 8
            && bytes[i] == b'<'
            && bytes[i + 1..i + 7].eq_ignore_ascii_case(b"nowiki")
            && bytes[i + 7].is_ascii_whitespace()
}

fn blank(out: &mut [u8], from: usize, to: usize) {
    for b in &mut out[from..to] {
        *b = b' ';
    }
}

fn find_sub(bytes: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    bytes[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| from + p)
}

fn find_sub_ci(bytes: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    bytes[from..]
        .windows(needle.len())
        .position(|w| w.eq_ignore_ascii_case(needle))
        .map(|p| from + p)
}

fn memchr_from(bytes: &[u8], needle: u8, from: usize) -> Option<usize> {
    bytes[from..].iter().position(|&b| b == needle).map(|p| from + p)
}

/// Maps a template name and params to a citation kind. Book wins first (by
/// name or an explicit `type`), then any journal marker in the name or
/// `type`, then the web/news names; everything else is `Other`.
/// `ref_context` is accepted for rule evolution; the default rules ignore it.
pub fn classify_citation(
    template_name: &str,
    params: &IndexMap<String, String>,
    _ref_context: Option<&str>,
    config: &ExtractorConfig,
) -> CitationKind {
    let type_param = params
        .get("type")
        .map(|v| v.trim().to_lowercase())
        .unwrap_or_default();
    if template_name == "cite book" || type_param == "book" {
        return CitationKind::Book;
    }
    if config
        .journal_markers
        .iter()
        .any(|m| template_name.contains(m.as_str()) || type_param.contains(m.as_str()))
    {
        return CitationKind::Journal;
    }
    match template_name {
        "cite web" => CitationKind::Web,
        "cite news" => CitationKind::News,
        _ => CitationKind::Other,
    }
}

// Bare ISBN magic word: an optional 978/979 prefix, nine digits with single
// optional separators, and a final digit or X. Shaped candidates that fail
// the checksum still become citations with an invalid ISBN.
static BARE_ISBN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"ISBN\s+((?:97[89][ \-]?)?(?:[0-9][ \-]?){9}[0-9Xx])").unwrap()
});

fn find_bare_isbn(text: &str, within: Span) -> Option<(Span, String)> {
    let hay = within.slice(text);
    let caps = BARE_ISBN_RE.captures(hay)?;
    let all = caps.get(0).unwrap();
    let num = caps.get(1).unwrap();
    Some((
        Span::new(within.start + all.start(), within.start + all.end()),
        num.as_str().to_string(),
    ))
}

const ISBN_PARAM_KEYS: &[&str] = &["isbn", "isbn13"];

fn is_url_param(key: &str) -> bool {
    key == "url" || key.ends_with("url")
}

/// Extracts all citations from one page.
///
/// One citation per inline ref definition carrying a recognized payload (a
/// citation template, else a bare ISBN magic word), plus one per free
/// citation template outside any ref. Self-closing refs and repeated
/// definitions of the same ref name are reuses and add nothing. Citations
/// come back in document order.
pub fn extract_citations(page: &WikiPage, config: &ExtractorConfig) -> Vec<Citation> {
    let stripped = strip_noise(&page.wikitext);
    let refs = find_ref_spans(&stripped);
    let scan = parse_templates(&stripped);

    // Recognized templates, skipping ones nested inside another recognized
    // template (the outer occurrence carries the citation).
    let candidates: Vec<&RawTemplate> = scan
        .templates
        .iter()
        .filter(|t| config.is_citation_template(&t.name))
        .collect();
    let candidates: Vec<&RawTemplate> = candidates
        .iter()
        .filter(|t| {
            !candidates.iter().any(|outer| {
                outer.source_span != t.source_span && outer.source_span.contains(&t.source_span)
            })
        })
        .copied()
        .collect();

    let mut citations = Vec::new();
    let mut seen_names: HashSet<String> = HashSet::new();
    for r in refs.iter().filter(|r| !r.self_closing) {
        if let Some(name) = r.name() {
            if seen_names.contains(name) {
                continue; // repeated definition of a named ref counts once
            }
        }
        let mut flags = Vec::new();
        if r.malformed {
            flags.push(FLAG_MALFORMED_REF.to_string());
        }
        if scan
            .malformed_spans
            .iter()
            .any(|m| m.overlaps(&r.inner_span))
        {
            flags.push(FLAG_MALFORMED_TEMPLATE.to_string());
        }
        let ref_name = r.name().map(str::to_string);
        let built = match candidates
            .iter()
            .find(|t| r.inner_span.contains(&t.source_span))
        {
            Some(t) => Some(template_citation(
                page,
                t,
                Anchoring::Inline,
                ref_name.clone(),
                flags,
                config,
            )),
            None => find_bare_isbn(&stripped, r.inner_span).map(|(span, raw)| {
                flags.push(FLAG_BARE_ISBN.to_string());
                Citation {
                    article_title: page.title.clone(),
                    kind: CitationKind::Book,
                    anchoring: Anchoring::Inline,
                    ref_name: ref_name.clone(),
                    params: IndexMap::new(),
                    identifiers: vec![Identifier::isbn(&raw)],
                    flags,
                    template: None,
                    source_span: span,
                }
            }),
        };
        if let Some(citation) = built {
            if let Some(name) = &ref_name {
                seen_names.insert(name.clone());
            }
            citations.push(citation);
        }
    }

    for t in &candidates {
        let in_ref = refs
            .iter()
            .any(|r| !r.self_closing && r.inner_span.contains(&t.source_span));
        if !in_ref {
            citations.push(template_citation(
                page,
                t,
                Anchoring::Free,
                None,
                Vec::new(),
                config,
            ));
        }
    }

    citations.sort_by_key(|c| c.source_span.start);
    citations
}

fn template_citation(
    page: &WikiPage,
    t: &RawTemplate,
    anchoring: Anchoring,
    ref_name: Option<String>,
    flags: Vec<String>,
    config: &ExtractorConfig,
) -> Citation {
    let mut params = IndexMap::new();
    for (i, v) in t.positional_params.iter().enumerate() {
        params.insert((i + 1).to_string(), v.clone());
    }
    for (k, v) in &t.named_params {
        params.entry(k.clone()).or_insert_with(|| v.clone());
    }

    let mut identifiers = Vec::new();
    let mut have_isbn = false;
    let mut have_doi = false;
    let mut have_gb = false;
    for (key, value) in &t.named_params {
        if value.is_empty() {
            continue;
        }
        if !have_isbn && ISBN_PARAM_KEYS.contains(&key.as_str()) {
            identifiers.push(Identifier::isbn(value));
            have_isbn = true;
        } else if !have_doi && key == "doi" {
            identifiers.push(Identifier::doi(value));
            have_doi = true;
        } else if !have_gb && is_url_param(key) {
            if let Some(id) = extract_google_books_id(value) {
                identifiers.push(Identifier::GoogleBooksId { id });
                have_gb = true;
            }
        }
    }

    let kind = classify_citation(&t.name, &params, None, config);
    Citation {
        article_title: page.title.clone(),
        kind,
        anchoring,
        ref_name,
        params,
        identifiers,
        flags,
        template: Some(t.name.clone()),
        source_span: t.source_span,
    }
}


#[cfg(test)]
mod classify_tests {
    use super::*;

    fn cfg() -> ExtractorConfig {
        ExtractorConfig::default()
    }

    fn no_params() -> IndexMap<String, String> {
        IndexMap::new()
    }

    #[test]
    fn book_by_name_or_type() {
        assert_eq!(
            classify_citation("cite book", &no_params(), None, &cfg()),
            CitationKind::Book
        );
        let mut p = no_params();
        p.insert("type".into(), "Book".into());
        assert_eq!(
            classify_citation("citation", &p, None, &cfg()),
            CitationKind::Book
        );
    }

    #[test]
    fn journal_markers_in_name_or_type() {
        for name in [
            "cite journal",
            "cite paper",
            "cite document",
            "cite thesis",
            "cite conference",
            "cite study",
        ] {
            assert_eq!(
                classify_citation(name, &no_params(), None, &cfg()),
                CitationKind::Journal,
                "{name}"
            );
        }
        let mut p = no_params();
        p.insert("type".into(), "Dissertation".into());
        assert_eq!(
            classify_citation("citation", &p, None, &cfg()),
            CitationKind::Journal
        );
    }

    #[test]
    fn web_news_other() {
        assert_eq!(
            classify_citation("cite web", &no_params(), None, &cfg()),
            CitationKind::Web
        );
        assert_eq!(
            classify_citation("cite news", &no_params(), None, &cfg()),
            CitationKind::News
        );
        assert_eq!(
            classify_citation("citation", &no_params(), None, &cfg()),
            CitationKind::Other
        );
    }

    #[test]
    fn book_beats_journal_type() {
        let mut p = no_params();
        p.insert("type".into(), "book".into());
        assert_eq!(
            classify_citation("cite journal", &p, None, &cfg()),
            CitationKind::Book
        );
    }
}

#[cfg(test)]
mod extract_tests {
    use super::*;
    use crate::ident::IsbnForm;

    fn page(wikitext: &str) -> WikiPage {
        WikiPage {
            title: "Test".into(),
            page_id: 1,
            wikitext: wikitext.into(),
        }
    }

    fn extract(text: &str) -> Vec<Citation> {
        extract_citations(&page(text), &ExtractorConfig::default())
    }

    #[test]
    fn inline_template_citation() {
        let cs = extract("a<ref>{{cite book|title=T|isbn=0-306-40615-2}}</ref>b");
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert_eq!(c.kind, CitationKind::Book);
        assert_eq!(c.anchoring, Anchoring::Inline);
        assert_eq!(c.template.as_deref(), Some("cite book"));
        match c.isbn().unwrap() {
            Identifier::Isbn {
                normalized, form, ..
            } => {
                assert_eq!(normalized.as_deref(), Some("0306406152"));
                assert_eq!(*form, Some(IsbnForm::Ten));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn free_template_citation() {
        let cs = extract("body {{cite journal|title=J|doi=10.1000/182}} more");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].anchoring, Anchoring::Free);
        assert_eq!(cs[0].kind, CitationKind::Journal);
    }

    #[test]
    fn named_ref_reuse_counts_once() {
        let text = r#"<ref name="x">{{cite book|isbn=0306406152}}</ref> t <ref name="x"/>"#;
        let cs = extract(text);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].ref_name.as_deref(), Some("x"));
    }

    #[test]
    fn repeated_named_definition_counts_once() {
        let text = r#"<ref name=x>{{cite book|isbn=0306406152}}</ref><ref name=x>{{cite book|isbn=097522980X}}</ref>"#;
        let cs = extract(text);
        assert_eq!(cs.len(), 1);
    }

    #[test]
    fn reuse_before_definition_counts_once() {
        let text = r#"<ref name="x"/> body <ref name="x">{{cite web|url=http://e.com}}</ref>"#;
        let cs = extract(text);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].kind, CitationKind::Web);
    }

    #[test]
    fn bare_isbn_ref_yields_book_citation() {
        let cs = extract("<ref>Smith 2001. ISBN 0-9752298-0-X.</ref>");
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert_eq!(c.kind, CitationKind::Book);
        assert!(c.template.is_none());
        assert!(c.flags.iter().any(|f| f == FLAG_BARE_ISBN));
        match c.isbn().unwrap() {
            Identifier::Isbn { normalized, .. } => {
                assert_eq!(normalized.as_deref(), Some("097522980X"));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn bare_isbn_outside_refs_ignored() {
        assert!(extract("Body text ISBN 0-306-40615-2 no ref.").is_empty());
    }

    #[test]
    fn template_beats_bare_isbn_in_same_ref() {
        let cs = extract("<ref>{{cite book|isbn=0306406152}} ISBN 097522980X</ref>");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].template.as_deref(), Some("cite book"));
    }

    #[test]
    fn ref_without_payload_yields_nothing() {
        assert!(extract("<ref>just prose, no identifier</ref>").is_empty());
    }

    #[test]
    fn one_citation_per_ref_first_template_wins() {
        let cs = extract("<ref>{{cite book|isbn=0306406152}}{{cite web|url=http://e.com}}</ref>");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].kind, CitationKind::Book);
    }

    #[test]
    fn nested_citation_inside_wrapper_counts() {
        // The wrapper is not a recognized citation template; the inner one is.
        let cs = extract("{{refn|{{cite book|isbn=0-306-40615-2}}}}");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].kind, CitationKind::Book);
        assert_eq!(cs[0].anchoring, Anchoring::Free);
    }

    #[test]
    fn nested_citation_inside_citation_not_double_counted() {
        let cs = extract("<ref>{{cite book|isbn=0306406152|chapter={{cite journal|title=odd}}}}</ref>");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].kind, CitationKind::Book);
    }

    #[test]
    fn comments_and_nowiki_do_not_produce_citations() {
        let text = "<!-- {{cite book|isbn=1}} --> <nowiki>{{cite book|isbn=0306406152}}</nowiki> {{cite book|isbn=097522980X}}";
        let cs = extract(text);
        assert_eq!(cs.len(), 1);
        match cs[0].isbn().unwrap() {
            Identifier::Isbn { raw, .. } => assert_eq!(raw, "097522980X"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn google_books_id_from_any_url_param() {
        let cs = extract(
            "<ref>{{cite news|title=N|url=https://books.google.co.uk/books?id=G4abcd00}}</ref>",
        );
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].kind, CitationKind::News);
        assert_eq!(cs[0].google_books_id(), Some("G4abcd00"));
    }

    #[test]
    fn first_identifier_occurrence_wins() {
        let cs = extract("<ref>{{cite book|isbn=0306406152|isbn13=9780306406157}}</ref>");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].identifiers.len(), 1);
        match cs[0].isbn().unwrap() {
            Identifier::Isbn { raw, .. } => assert_eq!(raw, "0306406152"),
            _ => unreachable!(),
        }
        // the extra value stays visible in params
        assert_eq!(cs[0].params.get("isbn13").unwrap(), "9780306406157");
    }

    #[test]
    fn malformed_ref_still_counts_with_flag() {
        let cs = extract("x<ref>{{cite web|url=http://e.com}}");
        assert_eq!(cs.len(), 1);
        assert!(cs[0].flags.iter().any(|f| f == FLAG_MALFORMED_REF));
        assert_eq!(cs[0].kind, CitationKind::Web);
    }

    #[test]
    fn malformed_template_flagged() {
        let cs = extract("<ref>{{cite book|isbn=0306406152}}</ref><ref>{{cite book|broken</ref>");
        assert_eq!(cs.len(), 1); // the broken ref has no parseable payload
        assert!(!cs[0].flags.iter().any(|f| f == FLAG_MALFORMED_TEMPLATE));
    }

    #[test]
    fn citation_spans_lie_inside_page_and_contain_name() {
        let text = "a<ref>{{cite book|isbn=0306406152}}</ref> {{cite web|url=http://e.com}}";
        let p = page(text);
        for c in extract_citations(&p, &ExtractorConfig::default()) {
            assert!(c.source_span.end <= p.wikitext.len());
            let slice = c.source_span.slice(&p.wikitext);
            assert!(slice.contains(c.template.as_deref().unwrap()), "{slice}");
        }
    }

    #[test]
    fn document_order_is_stable() {
        let text = "{{cite web|url=http://a.com}} <ref>{{cite book|isbn=0306406152}}</ref> {{cite news|title=n}}";
        let kinds: Vec<_> = extract(text).iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![CitationKind::Web, CitationKind::Book, CitationKind::News]
        );
    }

    #[test]
    fn determinism_same_input_same_output() {
        let text = r#"<ref name=a>{{cite book|isbn=0306406152}}</ref>{{cite journal|doi=10.1000/182}}<ref>ISBN 097522980X</ref>"#;
        let a = extract(text);
        let b = extract(text);
        assert_eq!(a, b);
    }
}
