//! Brace-nested `{{...}}` template parsing.
//!
//! Parameters split on `|` only at nesting depth zero; both `{{ }}` and
//! `[[ ]]` pairs contribute to depth, so pipes inside wikilinks stay inside
//! their parameter. Inner templates remain verbatim in the enclosing
//! parameter value and are also reported as entries of their own.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::Span;

/// One parsed template occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTemplate {
    /// Lowercased, whitespace-normalized template name.
    pub name: String,
    pub positional_params: Vec<String>,
    /// Named parameters in source order; on duplicate keys the first wins.
    pub named_params: IndexMap<String, String>,
    pub source_span: Span,
}

impl RawTemplate {
    /// Canonical re-serialization: `{{name|pos|key=value}}`.
    pub fn to_wikitext(&self) -> String {
        let mut out = String::from("{{");
        out.push_str(&self.name);
        for p in &self.positional_params {
            out.push('|');
            out.push_str(p);
        }
        for (k, v) in &self.named_params {
            out.push('|');
            out.push_str(k);
            out.push('=');
            out.push_str(v);
        }
        out.push_str("}}");
        out
    }

    /// Equality ignoring the source span (for round-trip checks).
    pub fn content_eq(&self, other: &RawTemplate) -> bool {
        self.name == other.name
            && self.positional_params == other.positional_params
            && self.named_params == other.named_params
    }
}

/// Result of scanning a text for templates.
#[derive(Debug, Clone, Default)]
pub struct TemplateScan {
    /// All templates, nested included, in document order (outer first).
    pub templates: Vec<RawTemplate>,
    /// Regions where a `{{` had no balanced close; parsing skipped them.
    pub malformed_spans: Vec<Span>,
}

/// Scans `text` for templates. Unbalanced occurrences are recorded in
/// `malformed_spans` and skipped; scanning resumes just past the open braces
/// so well-formed inner templates are still found.
pub fn parse_templates(text: &str) -> TemplateScan {
    let bytes = text.as_bytes();
    let mut scan = TemplateScan::default();
    let mut i = 0;
    while i + 1 < bytes.len() {
        if bytes[i] == b'{' && bytes[i + 1] == b'{' {
            let mut parsed = Vec::new();
            match parse_at(text, i, &mut parsed) {
                Some(end) => {
                    scan.templates.append(&mut parsed);
                    i = end;
                }
                None => {
                    scan.malformed_spans.push(Span::new(i, text.len()));
                    i += 2;
                }
            }
        } else {
            i += 1;
        }
    }
    scan.templates.sort_by_key(|t| t.source_span.start);
    scan
}

/// Parses the template opening at `open`, pushing it (and nested templates)
/// onto `out`. Returns the offset past `}}`, or `None` when the text ends
/// before the braces balance; in that case `out` additions must be discarded
/// by the caller.
fn parse_at(text: &str, open: usize, out: &mut Vec<RawTemplate>) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = open + 2;
    let mut link_depth = 0usize;
    let mut seg_start = i;
    let mut segments: Vec<Span> = Vec::new();
    loop {
        if i >= bytes.len() {
            return None;
        }
        if i + 1 < bytes.len() {
            match (bytes[i], bytes[i + 1]) {
                (b'{', b'{') => {
                    i = parse_at(text, i, out)?;
                    continue;
                }
                (b'}', b'}') if link_depth == 0 => {
                    segments.push(Span::new(seg_start, i));
                    let span = Span::new(open, i + 2);
                    if let Some(t) = build_template(text, span, &segments) {
                        out.push(t);
                    }
                    return Some(i + 2);
                }
                (b'[', b'[') => {
                    link_depth += 1;
                    i += 2;
                    continue;
                }
                (b']', b']') if link_depth > 0 => {
                    link_depth -= 1;
                    i += 2;
                    continue;
                }
                _ => {}
            }
        }
        if bytes[i] == b'|' && link_depth == 0 {
            segments.push(Span::new(seg_start, i));
            seg_start = i + 1;
        }
        i += 1;
    }
}

/// Assembles a template from its depth-zero segments. Empty names (`{{}}`,
/// `{{|x}}`) parse to no template.
fn build_template(text: &str, span: Span, segments: &[Span]) -> Option<RawTemplate> {
    let name = normalize_name(segments[0].slice(text));
    if name.is_empty() {
        return None;
    }
    let mut positional = Vec::new();
    let mut named = IndexMap::new();
    for seg in &segments[1..] {
        let raw = seg.slice(text);
        match top_level_eq(raw) {
            Some(eq) => {
                let key = normalize_name(&raw[..eq]);
                if key.is_empty() {
                    positional.push(raw.to_string());
                } else {
                    named.entry(key).or_insert_with(|| raw[eq + 1..].trim().to_string());
                }
            }
            None => positional.push(raw.to_string()),
        }
    }
    Some(RawTemplate {
        name,
        positional_params: positional,
        named_params: named,
        source_span: span,
    })
}

/// Lowercases and collapses internal whitespace.
fn normalize_name(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Position of the first `=` outside nested `{{ }}` / `[[ ]]` structure.
fn top_level_eq(segment: &str) -> Option<usize> {
    let bytes = segment.as_bytes();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if i + 1 < bytes.len() {
            match (bytes[i], bytes[i + 1]) {
                (b'{', b'{') | (b'[', b'[') => {
                    depth += 1;
                    i += 2;
                    continue;
                }
                (b'}', b'}') | (b']', b']') if depth > 0 => {
                    depth -= 1;
                    i += 2;
                    continue;
                }
                _ => {}
            }
        }
        if bytes[i] == b'=' && depth == 0 {
            return Some(i);
        }
        i += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_one(text: &str) -> RawTemplate {
        let scan = parse_templates(text);
        assert_eq!(scan.templates.len(), 1, "{text}");
        scan.templates.into_iter().next().unwrap()
    }

    #[test]
    fn parses_named_and_positional_params() {
        let t = parse_one("{{cite book|last=Smith|first=J.|title=X|sole}}");
        assert_eq!(t.name, "cite book");
        assert_eq!(t.positional_params, vec!["sole"]);
        assert_eq!(t.named_params.get("last").unwrap(), "Smith");
        assert_eq!(t.named_params.get("first").unwrap(), "J.");
        assert_eq!(t.named_params.get("title").unwrap(), "X");
    }

    #[test]
    fn name_is_lowercased_and_whitespace_normalized() {
        let t = parse_one("{{ Cite\n  Book |title=T}}");
        assert_eq!(t.name, "cite book");
    }

    #[test]
    fn nested_templates_reported_and_kept_verbatim() {
        let text = "{{cite journal|title={{lang|fr|Le Monde}}|doi=10.1000/182}}";
        let scan = parse_templates(text);
        assert_eq!(scan.templates.len(), 2);
        let outer = &scan.templates[0];
        let inner = &scan.templates[1];
        assert_eq!(outer.name, "cite journal");
        assert_eq!(
            outer.named_params.get("title").unwrap(),
            "{{lang|fr|Le Monde}}"
        );
        assert_eq!(inner.name, "lang");
        assert_eq!(inner.positional_params, vec!["fr", "Le Monde"]);
        assert!(outer.source_span.contains(&inner.source_span));
    }

    #[test]
    fn pipes_inside_wikilinks_do_not_split() {
        let t = parse_one("{{cite book|title=[[A|B]] and [[C]]|isbn=1}}");
        assert_eq!(t.named_params.get("title").unwrap(), "[[A|B]] and [[C]]");
        assert_eq!(t.named_params.get("isbn").unwrap(), "1");
    }

    #[test]
    fn equals_inside_links_or_templates_stays_positional() {
        let scan = parse_templates("{{foo|[[a=b]]|{{x|k=v}}}}");
        assert_eq!(scan.templates.len(), 2); // foo plus nested x
        let t = &scan.templates[0];
        assert_eq!(t.positional_params.len(), 2);
        assert_eq!(t.positional_params[0], "[[a=b]]");
        assert_eq!(t.positional_params[1], "{{x|k=v}}");
    }

    #[test]
    fn first_duplicate_key_wins() {
        let t = parse_one("{{cite book|isbn=first|isbn=second}}");
        assert_eq!(t.named_params.get("isbn").unwrap(), "first");
    }

    #[test]
    fn empty_name_parses_to_no_template() {
        assert!(parse_templates("{{}}").templates.is_empty());
        assert!(parse_templates("{{|x}}").templates.is_empty());
        assert!(parse_templates("{{  }}").templates.is_empty());
    }

    #[test]
    fn unbalanced_braces_flagged_inner_recovered() {
        let scan = parse_templates("{{outer|{{inner|a=b}} tail");
        assert_eq!(scan.templates.len(), 1);
        assert_eq!(scan.templates[0].name, "inner");
        assert!(!scan.malformed_spans.is_empty());
    }

    #[test]
    fn spans_index_the_source(){
        let text = "x {{cite web|url=u}} y";
        let scan = parse_templates(text);
        let t = &scan.templates[0];
        assert_eq!(t.source_span.slice(text), "{{cite web|url=u}}");
    }

    #[test]
    fn round_trip_reparses_to_equal_content() {
        let cases = [
            "{{cite book|last=Smith|first=J.|title=X}}",
            "{{citation|plain|k=v}}",
            "{{cite journal|title={{lang|fr|X}}|doi=10.1000/182}}",
        ];
        for case in cases {
            let scan = parse_templates(case);
            let top = &scan.templates[0];
            let re = top.to_wikitext();
            let rescan = parse_templates(&re);
            assert!(
                rescan.templates[0].content_eq(top),
                "{case} -> {re} -> {:?}",
                rescan.templates[0]
            );
        }
    }

    #[test]
    fn document_order_outer_first() {
        let text = "{{a|{{b}}}} {{c}}";
        let names: Vec<_> = parse_templates(text)
            .templates
            .iter()
            .map(|t| t.name.clone())
            .collect();
        assert_eq!(names, vec!["a", "b", "c"]);
    }
}
