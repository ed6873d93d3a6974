//! Streaming reader for MediaWiki XML exports.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::IngestError;
use crate::wikitext::WikiPage;

/// Streams article pages out of an XML export. Memory use is bounded by
/// the largest single page, not the file: each page's state is dropped as
/// soon as it is yielded.
pub fn stream_dump<R: BufRead>(reader: R) -> DumpStream<R> {
    DumpStream {
        reader: Reader::from_reader(reader),
        buf: Vec::new(),
        page: None,
        capture: None,
        capture_buf: String::new(),
        done: false,
    }
}

/// Iterator over `page` elements. Namespace data, when present, filters
/// non-article pages (`ns` ≠ 0); pages with empty titles are skipped. The
/// first error is yielded once, after which the stream is exhausted.
pub struct DumpStream<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    page: Option<PageState>,
    capture: Option<Capture>,
    capture_buf: String,
    done: bool,
}

#[derive(Default)]
struct PageState {
    title: String,
    ns: Option<i64>,
    page_id: Option<u64>,
    in_revision: bool,
    revision_text: Option<String>,
    page_text: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Capture {
    Title,
    Ns,
    Id,
    Text,
}

impl<R: BufRead> DumpStream<R> {
    fn fail(&mut self, message: String) -> IngestError {
        self.done = true;
        IngestError::Xml {
            offset: self.reader.error_position(),
            message,
        }
    }
}

impl<R: BufRead> Iterator for DumpStream<R> {
    type Item = Result<WikiPage, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event,
                Err(e) => return Some(Err(self.fail(e.to_string()))),
            };
            match event {
                Event::Eof => {
                    self.done = true;
                    if self.page.is_some() {
                        return Some(Err(IngestError::Truncated {
                            offset: self.reader.buffer_position(),
                        }));
                    }
                    return None;
                }
                Event::Start(start) => {
                    let name = start.local_name();
                    match name.as_ref() {
                        b"page" => {
                            self.page = Some(PageState::default());
                            self.capture = None;
                        }
                        b"revision" => {
                            if let Some(page) = &mut self.page {
                                page.in_revision = true;
                                page.revision_text = None;
                            }
                        }
                        b"title" | b"ns" | b"id" => {
                            if let Some(page) = &self.page {
                                if !page.in_revision {
                                    let capture = match name.as_ref() {
                                        b"title" => Some(Capture::Title),
                                        b"ns" => Some(Capture::Ns),
                                        // revisions and contributors carry
                                        // ids of their own; only the first
                                        // page-level id is the page id
                                        b"id" if page.page_id.is_none() => Some(Capture::Id),
                                        _ => None,
                                    };
                                    if capture.is_some() {
                                        self.capture = capture;
                                        self.capture_buf.clear();
                                    }
                                }
                            }
                        }
                        b"text" if self.page.as_ref().is_some_and(|p| p.in_revision) => {
                            self.capture = Some(Capture::Text);
                            self.capture_buf.clear();
                        }
                        _ => {}
                    }
                }
                Event::Empty(start) => {
                    if start.local_name().as_ref() == b"text" {
                        if let Some(page) = &mut self.page {
                            if page.in_revision {
                                page.revision_text = Some(String::new());
                            }
                        }
                    }
                }
                Event::Text(text) => {
                    if self.capture.is_some() {
                        match text.xml10_content() {
                            Ok(content) => self.capture_buf.push_str(&content),
                            Err(e) => return Some(Err(self.fail(e.to_string()))),
                        }
                    }
                }
                Event::CData(cdata) => {
                    if self.capture.is_some() {
                        match cdata.decode() {
                            Ok(content) => self.capture_buf.push_str(&content),
                            Err(e) => return Some(Err(self.fail(e.to_string()))),
                        }
                    }
                }
                Event::GeneralRef(entity) => {
                    if self.capture.is_some() {
                        match entity.resolve_char_ref() {
                            Ok(Some(ch)) => self.capture_buf.push(ch),
                            Ok(None) => match entity.decode() {
                                Ok(name) => match name.as_ref() {
                                    "amp" => self.capture_buf.push('&'),
                                    "lt" => self.capture_buf.push('<'),
                                    "gt" => self.capture_buf.push('>'),
                                    "quot" => self.capture_buf.push('"'),
                                    "apos" => self.capture_buf.push('\''),
                                    other => {
                                        let message =
                                            format!("unresolvable entity reference &{other};");
                                        return Some(Err(self.fail(message)));
                                    }
                                },
                                Err(e) => return Some(Err(self.fail(e.to_string()))),
                            },
                            Err(e) => return Some(Err(self.fail(e.to_string()))),
                        }
                    }
                }
                Event::End(end) => {
                    let name = end.local_name();
                    if let Some(capture) = self.capture {
                        let matches = matches!(
                            (capture, name.as_ref()),
                            (Capture::Title, b"title")
                                | (Capture::Ns, b"ns")
                                | (Capture::Id, b"id")
                                | (Capture::Text, b"text")
                        );
                        if matches {
                            self.capture = None;
                            if let Some(page) = &mut self.page {
                                let value = std::mem::take(&mut self.capture_buf);
                                match capture {
                                    Capture::Title => page.title = value,
                                    Capture::Ns => page.ns = value.trim().parse().ok(),
                                    Capture::Id => page.page_id = value.trim().parse().ok(),
                                    Capture::Text => page.revision_text = Some(value),
                                }
                            }
                            continue;
                        }
                    }
                    match name.as_ref() {
                        b"revision" => {
                            if let Some(page) = &mut self.page {
                                page.in_revision = false;
                                // the newest revision with text supersedes
                                if let Some(text) = page.revision_text.take() {
                                    page.page_text = Some(text);
                                }
                            }
                        }
                        b"page" => {
                            if let Some(page) = self.page.take() {
                                let is_article = page.ns.unwrap_or(0) == 0;
                                if is_article && !page.title.is_empty() {
                                    return Some(Ok(WikiPage {
                                        title: page.title,
                                        page_id: page.page_id.unwrap_or(0),
                                        wikitext: page.page_text.unwrap_or_default(),
                                    }));
                                }
                            }
                        }
                        _ => {}
                    }
                }
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(xml: &str) -> Vec<Result<WikiPage, IngestError>> {
        stream_dump(xml.as_bytes()).collect()
    }

    fn pages(xml: &str) -> Vec<WikiPage> {
        collect(xml).into_iter().map(|r| r.unwrap()).collect()
    }

    const THREE_PAGES: &str = r#"<mediawiki>
  <page>
    <title>Alpha</title>
    <ns>0</ns>
    <id>1</id>
    <revision><id>100</id><text>{{cite book|isbn=0306406152}}</text></revision>
  </page>
  <page>
    <title>Beta</title>
    <ns>0</ns>
    <id>2</id>
    <revision><id>200</id><text>plain text</text></revision>
  </page>
  <page>
    <title>Gamma</title>
    <ns>0</ns>
    <id>3</id>
    <revision><id>300</id><text>more</text></revision>
  </page>
</mediawiki>"#;

    #[test]
    fn fixture_round_trip() {
        let out = pages(THREE_PAGES);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].title, "Alpha");
        assert_eq!(out[0].page_id, 1);
        assert_eq!(out[0].wikitext, "{{cite book|isbn=0306406152}}");
        assert_eq!(out[1].title, "Beta");
        assert_eq!(out[2].title, "Gamma");
    }

    #[test]
    fn non_article_namespace_skipped() {
        let xml = r#"<mediawiki>
  <page><title>Template:Infobox</title><ns>10</ns><id>5</id>
    <revision><text>template body</text></revision></page>
  <page><title>Kept</title><ns>0</ns><id>6</id>
    <revision><text>body</text></revision></page>
</mediawiki>"#;
        let out = pages(xml);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].title, "Kept");
    }

    #[test]
    fn missing_ns_counts_as_article() {
        let xml = "<x><page><title>T</title><id>7</id><revision><text>b</text></revision></page></x>";
        assert_eq!(pages(xml).len(), 1);
    }

    #[test]
    fn empty_title_skipped() {
        let xml = "<x><page><title></title><id>8</id><revision><text>b</text></revision></page></x>";
        assert!(pages(xml).is_empty());
    }

    #[test]
    fn page_id_is_first_id_not_revision_id() {
        let xml = "<x><page><title>T</title><id>42</id><revision><id>9000</id><text>b</text></revision></page></x>";
        assert_eq!(pages(xml)[0].page_id, 42);
    }

    #[test]
    fn last_revision_text_wins() {
        let xml = r#"<x><page><title>T</title><id>1</id>
            <revision><id>1</id><text>old</text></revision>
            <revision><id>2</id><text>new</text></revision>
        </page></x>"#;
        assert_eq!(pages(xml)[0].wikitext, "new");
    }

    #[test]
    fn entities_and_cdata_decoded() {
        let xml = "<x><page><title>A &amp; B &#233;</title><id>1</id><revision><text><![CDATA[a <ref> & b]]> &lt;tail&gt;</text></revision></page></x>";
        let out = pages(xml);
        assert_eq!(out[0].title, "A & B é");
        assert_eq!(out[0].wikitext, "a <ref> & b <tail>");
    }

    #[test]
    fn self_closing_text_is_empty_page() {
        let xml = r#"<x><page><title>T</title><id>1</id><revision><text bytes="0"/></revision></page></x>"#;
        assert_eq!(pages(xml)[0].wikitext, "");
    }

    #[test]
    fn concatenated_exports_stream_in_order() {
        let both = format!("{THREE_PAGES}\n{}", THREE_PAGES.replace("Alpha", "Delta"));
        let titles: Vec<_> = pages(&both).into_iter().map(|p| p.title).collect();
        assert_eq!(titles, vec!["Alpha", "Beta", "Gamma", "Delta", "Beta", "Gamma"]);
    }

    #[test]
    fn malformed_xml_reports_offset_and_stops() {
        let xml = "<x><page><title>Ok</title><id>1</id><revision><text>b</text></revision></page><page><title>Bad</wrong></page></x>";
        let results = collect(xml);
        assert_eq!(results.len(), 2);
        assert!(results[0].is_ok());
        match &results[1] {
            Err(IngestError::Xml { offset, .. }) => assert!(*offset > 0),
            other => panic!("expected xml error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_export_is_an_error() {
        let xml = "<x><page><title>T</title><id>1</id><revision><text>never closed";
        let results = collect(xml);
        assert_eq!(results.len(), 1);
        assert!(matches!(
            results[0],
            Err(IngestError::Truncated { offset } | IngestError::Xml { offset, .. }) if offset > 0
        ));
    }

    #[test]
    fn unknown_entity_is_an_error() {
        let xml = "<x><page><title>T</title><id>1</id><revision><text>a &unknown; b</text></revision></page></x>";
        let results = collect(xml);
        assert_eq!(results.len(), 1);
        match &results[0] {
            Err(IngestError::Xml { message, .. }) => assert!(message.contains("unknown")),
            other => panic!("expected xml error, got {other:?}"),
        }
    }

    #[test]
    fn streaming_does_not_buffer_all_pages() {
        // take(1) on a long export must not consume the remaining pages
        let mut xml = String::from("<mediawiki>");
        for i in 0..1000 {
            xml.push_str(&format!(
                "<page><title>P{i}</title><id>{i}</id><revision><text>body {i}</text></revision></page>"
            ));
        }
        xml.push_str("</mediawiki>");
        let mut stream = stream_dump(xml.as_bytes());
        let first = stream.next().unwrap().unwrap();
        assert_eq!(first.title, "P0");
        drop(stream);
    }
}
