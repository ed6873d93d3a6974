//! `<ref>` tag scanning.
//!
//! Tag matching is case-insensitive and attribute quoting is tolerant
//! (double, single, or none). Refs do not nest; an unterminated ref runs to
//! the next ref opening or end of text and is flagged malformed.

use indexmap::IndexMap;

use crate::Span;

/// One `<ref>` occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct RefSpan {
    /// Tag attributes with lowercased keys; first occurrence wins.
    pub attrs: IndexMap<String, String>,
    /// The whole occurrence, opening tag through closing tag.
    pub span: Span,
    /// The payload between the tags; empty for self-closing refs.
    pub inner_span: Span,
    /// Self-closing refs (`<ref name="x"/>`) reuse a named definition.
    pub self_closing: bool,
    pub malformed: bool,
}

impl RefSpan {
    pub fn name(&self) -> Option<&str> {
        self.attrs.get("name").map(String::as_str)
    }

    pub fn inner<'a>(&self, text: &'a str) -> &'a str {
        self.inner_span.slice(text)
    }
}

/// Finds every `<ref .. >..</ref>` and `<ref .. />` occurrence in order.
pub fn find_ref_spans(text: &str) -> Vec<RefSpan> {
    let bytes = text.as_bytes();
    let mut refs = Vec::new();
    let mut i = 0;
    while let Some(start) = find_ref_open(bytes, i) {
        let tag = parse_tag(text, start + 4);
        let Some(tag) = tag else {
            // Tag never closed; the occurrence swallows the rest of the text.
            refs.push(RefSpan {
                attrs: parse_attrs(&text[start + 4..]),
                span: Span::new(start, text.len()),
                inner_span: Span::new(text.len(), text.len()),
                self_closing: false,
                malformed: true,
            });
            break;
        };
        if tag.self_closing {
            refs.push(RefSpan {
                attrs: tag.attrs,
                span: Span::new(start, tag.end),
                inner_span: Span::new(tag.end, tag.end),
                self_closing: true,
                malformed: false,
            });
            i = tag.end;
            continue;
        }
        // Refs never nest: a close past the next ref opening belongs to that
        // ref, so the search is bounded by it.
        let next_open = find_ref_open(bytes, tag.end).unwrap_or(text.len());
        match find_ref_close(&bytes[..next_open], tag.end) {
            Some((close_start, close_end)) => {
                refs.push(RefSpan {
                    attrs: tag.attrs,
                    span: Span::new(start, close_end),
                    inner_span: Span::new(tag.end, close_start),
                    self_closing: false,
                    malformed: false,
                });
                i = close_end;
            }
            None => {
                // No closing tag: the ref runs to the next ref opening or EOF.
                refs.push(RefSpan {
                    attrs: tag.attrs,
                    span: Span::new(start, next_open),
                    inner_span: Span::new(tag.end, next_open),
                    self_closing: false,
                    malformed: true,
                });
                i = next_open;
            }
        }
    }
    refs
}

/// Next `<ref` at or after `from`, where the following char ends the tag
/// name (so `<references>` does not match).
fn find_ref_open(bytes: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i + 4 <= bytes.len() {
        if bytes[i] == b'<' && bytes[i + 1..i + 4].eq_ignore_ascii_case(b"ref") {
            match bytes.get(i + 4) {
                None | Some(b'>') | Some(b'/') => return Some(i),
                Some(c) if c.is_ascii_whitespace() => return Some(i),
                _ => {}
            }
        }
        i += 1;
    }
    None
}

/// First `</ref >`-style closing tag at or after `from`; returns its
/// (start, end) offsets.
fn find_ref_close(bytes: &[u8], from: usize) -> Option<(usize, usize)> {
    let mut i = from;
    while i + 5 <= bytes.len() {
        if bytes[i] == b'<'
            && bytes[i + 1] == b'/'
            && bytes[i + 2..i + 5].eq_ignore_ascii_case(b"ref")
        {
            let mut j = i + 5;
            while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                j += 1;
            }
            if bytes.get(j) == Some(&b'>') {
                return Some((i, j + 1));
            }
        }
        i += 1;
    }
    None
}

struct TagParse {
    attrs: IndexMap<String, String>,
    /// Offset just past the `>`.
    end: usize,
    self_closing: bool,
}

/// Parses the remainder of an opening tag starting just past `<ref`.
/// Returns `None` when the text ends before `>`.
fn parse_tag(text: &str, from: usize) -> Option<TagParse> {
    let bytes = text.as_bytes();
    let mut attrs = IndexMap::new();
    let mut i = from;
    let mut slash_seen = false;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let &c = bytes.get(i)?;
        match c {
            b'>' => {
                return Some(TagParse {
                    attrs,
                    end: i + 1,
                    self_closing: slash_seen,
                });
            }
            b'/' => {
                slash_seen = true;
                i += 1;
            }
            _ if is_attr_key_byte(c) => {
                slash_seen = false;
                let key_start = i;
                while i < bytes.len() && is_attr_key_byte(bytes[i]) {
                    i += 1;
                }
                let key = text[key_start..i].to_ascii_lowercase();
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                let value = if bytes.get(i) == Some(&b'=') {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    match bytes.get(i) {
                        Some(&q @ (b'"' | b'\'')) => {
                            let vstart = i + 1;
                            let vend = memchr(bytes, q, vstart)?;
                            i = vend + 1;
                            text[vstart..vend].to_string()
                        }
                        _ => {
                            let vstart = i;
                            while i < bytes.len()
                                && !bytes[i].is_ascii_whitespace()
                                && bytes[i] != b'>'
                                && bytes[i] != b'/'
                            {
                                i += 1;
                            }
                            text[vstart..i].to_string()
                        }
                    }
                } else {
                    String::new()
                };
                attrs.entry(key).or_insert(value);
            }
            _ => i += 1,
        }
    }
}

fn is_attr_key_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b':')
}

fn memchr(bytes: &[u8], needle: u8, from: usize) -> Option<usize> {
    bytes[from..].iter().position(|&b| b == needle).map(|p| from + p)
}

/// Best-effort attribute recovery for a tag that never closed.
fn parse_attrs(rest: &str) -> IndexMap<String, String> {
    parse_tag(&format!("{rest}>"), 0)
        .map(|t| t.attrs)
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_plain_ref_with_inner_text() {
        let text = "a<ref>{{cite web|url=u}}</ref>b";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 1);
        let r = &refs[0];
        assert_eq!(r.inner(text), "{{cite web|url=u}}");
        assert_eq!(r.span.slice(text), "<ref>{{cite web|url=u}}</ref>");
        assert!(!r.self_closing);
        assert!(!r.malformed);
    }

    #[test]
    fn parses_attribute_quoting_styles() {
        let text = r#"<ref name="a">x</ref><ref name='b'>y</ref><ref name=c group=note>z</ref>"#;
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 3);
        assert_eq!(refs[0].name(), Some("a"));
        assert_eq!(refs[1].name(), Some("b"));
        assert_eq!(refs[2].name(), Some("c"));
        assert_eq!(refs[2].attrs.get("group").unwrap(), "note");
    }

    #[test]
    fn self_closing_is_reuse_with_empty_inner() {
        let text = r#"<ref name="x"/> and <ref name = "y" />"#;
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 2);
        assert!(refs.iter().all(|r| r.self_closing));
        assert!(refs.iter().all(|r| r.inner_span.is_empty()));
        assert_eq!(refs[0].name(), Some("x"));
        assert_eq!(refs[1].name(), Some("y"));
    }

    #[test]
    fn case_insensitive_tags() {
        let text = "<REF NAME=z>body</REF>";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 1);
        assert_eq!(refs[0].name(), Some("z"));
        assert_eq!(refs[0].inner(text), "body");
    }

    #[test]
    fn references_tag_is_not_a_ref() {
        assert!(find_ref_spans("<references/>").is_empty());
        assert!(find_ref_spans("<references>x</references>").is_empty());
    }

    #[test]
    fn unterminated_ref_extends_to_next_ref_and_is_flagged() {
        let text = "<ref>{{cite web|url=u}} <ref>ok</ref>";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 2);
        assert!(refs[0].malformed);
        assert_eq!(refs[0].inner(text), "{{cite web|url=u}} ");
        assert!(!refs[1].malformed);
        assert_eq!(refs[1].inner(text), "ok");
    }

    #[test]
    fn unterminated_ref_extends_to_eof() {
        let text = "x<ref name=t>{{cite book|isbn=1}}";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 1);
        assert!(refs[0].malformed);
        assert_eq!(refs[0].name(), Some("t"));
        assert_eq!(refs[0].inner(text), "{{cite book|isbn=1}}");
    }

    #[test]
    fn unclosed_tag_swallows_rest() {
        let text = "a<ref name=q";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 1);
        assert!(refs[0].malformed);
        assert_eq!(refs[0].name(), Some("q"));
        assert!(refs[0].inner_span.is_empty());
    }

    #[test]
    fn spaced_closing_tag_accepted() {
        let text = "<ref>x</ref >y";
        let refs = find_ref_spans(text);
        assert_eq!(refs.len(), 1);
        assert_eq!(refs[0].inner(text), "x");
    }
}
