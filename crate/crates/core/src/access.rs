//! Access resolution: what a reader can actually reach.
//!
//! Book links are resolved against a volume catalog through the [`Resolver`]
//! trait — a JSONL fixture for reproducible runs, or a live HTTP client
//! built over an injectable [`Transport`]. Journal citations are classified
//! by open-access evidence without any network traffic.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::ident::{HostClass, Identifier, ValidationStatus};
use crate::wikitext::{Citation, CitationKind};

/// How much of a resolved volume a reader can view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Viewability {
    Full,
    Partial,
    None,
    Unknown,
}

/// Open-access standing of a journal citation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OaStatus {
    /// Carries a link whose host and shape identify an open repository.
    ConfirmedOpen,
    /// Has a well-formed persistent identifier but no open-repository link.
    IdentifierUnconfirmed,
    /// No usable identifier at all.
    NoIdentifier,
}

/// Catalog answer for one volume id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolverRecord {
    #[serde(rename = "id")]
    pub google_books_id: String,
    pub exists: bool,
    pub viewability: Viewability,
    /// True when the lookup failed transiently and could be retried.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub retryable: bool,
}

impl ResolverRecord {
    pub fn missing(id: &str) -> Self {
        ResolverRecord {
            google_books_id: id.to_string(),
            exists: false,
            viewability: Viewability::Unknown,
            retryable: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum AccessError {
    #[error("fixture read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture line {line} is not a valid record: {source}")]
    BadRecord {
        line: usize,
        source: serde_json::Error,
    },
    #[error("fixture line {line}: duplicate volume id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("fixture line {line}: existing volume {id:?} has viewability \"unknown\"")]
    UnknownViewability { line: usize, id: String },
}

/// Resolves Google Books volume ids to catalog records. Implementations
/// must be total: every id gets a record, unknown ids come back with
/// `exists: false` and unknown viewability.
pub trait Resolver {
    fn resolve(&self, id: &str) -> ResolverRecord;

    /// Resolves many ids. The default is sequential; implementations with
    /// batched backends override it.
    fn resolve_batch(&self, ids: &[&str]) -> Vec<ResolverRecord> {
        ids.iter().map(|id| self.resolve(id)).collect()
    }
}

impl<R: Resolver + ?Sized> Resolver for &R {
    fn resolve(&self, id: &str) -> ResolverRecord {
        (**self).resolve(id)
    }

    fn resolve_batch(&self, ids: &[&str]) -> Vec<ResolverRecord> {
        (**self).resolve_batch(ids)
    }
}

impl<R: Resolver + ?Sized> Resolver for Box<R> {
    fn resolve(&self, id: &str) -> ResolverRecord {
        (**self).resolve(id)
    }

    fn resolve_batch(&self, ids: &[&str]) -> Vec<ResolverRecord> {
        (**self).resolve_batch(ids)
    }
}

/// Fixed catalog loaded from JSONL: one record per line, each line an
/// object with `id`, `exists`, and (for existing volumes) `viewability`.
#[derive(Debug, Clone, Default)]
pub struct FixtureResolver {
    records: HashMap<String, ResolverRecord>,
}

impl FixtureResolver {
    pub fn from_path(path: &Path) -> Result<Self, AccessError> {
        Self::from_reader(File::open(path)?)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, AccessError> {
        #[derive(Deserialize)]
        struct Line {
            id: String,
            exists: bool,
            viewability: Option<Viewability>,
        }

        let mut records = HashMap::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line)
                .map_err(|source| AccessError::BadRecord { line: line_no, source })?;
            let viewability = match (parsed.exists, parsed.viewability) {
                (true, Some(v)) if v != Viewability::Unknown => v,
                (true, _) => {
                    return Err(AccessError::UnknownViewability {
                        line: line_no,
                        id: parsed.id,
                    })
                }
                // A volume that does not exist has nothing to view.
                (false, _) => Viewability::None,
            };
            let record = ResolverRecord {
                google_books_id: parsed.id.clone(),
                exists: parsed.exists,
                viewability,
                retryable: false,
            };
            if records.insert(parsed.id.clone(), record).is_some() {
                return Err(AccessError::DuplicateId {
                    line: line_no,
                    id: parsed.id,
                });
            }
        }
        Ok(FixtureResolver { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl Resolver for FixtureResolver {
    fn resolve(&self, id: &str) -> ResolverRecord {
        self.records
            .get(id)
            .cloned()
            .unwrap_or_else(|| ResolverRecord::missing(id))
    }
}

/// Memoizing wrapper: each distinct id reaches the inner resolver once.
pub struct CachedResolver<R> {
    inner: R,
    cache: Mutex<HashMap<String, ResolverRecord>>,
    lookups: AtomicU64,
}

impl<R: Resolver> CachedResolver<R> {
    pub fn new(inner: R) -> Self {
        CachedResolver {
            inner,
            cache: Mutex::new(HashMap::new()),
            lookups: AtomicU64::new(0),
        }
    }

    /// Number of lookups that reached the inner resolver.
    pub fn lookups(&self) -> u64 {
        self.lookups.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> R {
        self.inner
    }
}

impl<R: Resolver> Resolver for CachedResolver<R> {
    fn resolve(&self, id: &str) -> ResolverRecord {
        let mut cache = self.cache.lock().expect("resolver cache poisoned");
        if let Some(hit) = cache.get(id) {
            return hit.clone();
        }
        // The lock is held across the inner call so concurrent misses on
        // the same id cannot trigger duplicate upstream traffic.
        self.lookups.fetch_add(1, Ordering::Relaxed);
        let record = self.inner.resolve(id);
        cache.insert(id.to_string(), record.clone());
        record
    }
}

/// One rule for recognizing an open-repository link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OaRule {
    /// Host suffix the URL must end with (exact match or dot-boundary).
    pub host_suffix: String,
    /// If set, some URL path segment must equal this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_segment: Option<String>,
    /// Template parameter names that alone confirm the link family.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub param_names: Vec<String>,
    /// Host class recorded on the extracted identifier.
    pub host_class: HostClass,
}

/// Open-access recognition rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OaConfig {
    pub rules: Vec<OaRule>,
}

impl Default for OaConfig {
    fn default() -> Self {
        OaConfig {
            rules: vec![
                OaRule {
                    host_suffix: "arxiv.org".into(),
                    path_segment: None,
                    param_names: vec!["arxiv".into(), "eprint".into()],
                    host_class: HostClass::ArXiv,
                },
                OaRule {
                    host_suffix: "ncbi.nlm.nih.gov".into(),
                    path_segment: Some("pmc".into()),
                    param_names: vec!["pmc".into()],
                    host_class: HostClass::Pmc,
                },
            ],
        }
    }
}

fn host_matches(host: &str, suffix: &str) -> bool {
    host == suffix || host.ends_with(&format!(".{suffix}"))
}

fn url_matches_rule(url: &str, rule: &OaRule) -> bool {
    let Ok(parsed) = Url::parse(url.trim()) else {
        return false;
    };
    if !matches!(parsed.scheme(), "http" | "https") {
        return false;
    }
    let Some(host) = parsed.host_str() else {
        return false;
    };
    if !host_matches(&host.to_lowercase(), &rule.host_suffix) {
        return false;
    }
    match &rule.path_segment {
        None => true,
        Some(seg) => parsed
            .path_segments()
            .map(|mut segs| segs.any(|s| s.eq_ignore_ascii_case(seg)))
            .unwrap_or(false),
    }
}

/// Finds open-repository evidence on a citation: either a parameter a rule
/// names outright (`arxiv=`, `pmc=`, ...) or a URL parameter pointing at a
/// rule's host.
pub fn find_open_access_link(citation: &Citation, config: &OaConfig) -> Option<Identifier> {
    for rule in &config.rules {
        for name in &rule.param_names {
            if let Some(value) = citation.params.get(name) {
                if !value.trim().is_empty() {
                    return Some(Identifier::OpenAccessLink {
                        host_class: rule.host_class,
                        raw_url: value.trim().to_string(),
                    });
                }
            }
        }
    }
    for (key, value) in &citation.params {
        if !(key == "url" || key.ends_with("url")) || value.trim().is_empty() {
            continue;
        }
        for rule in &config.rules {
            if url_matches_rule(value, rule) {
                return Some(Identifier::OpenAccessLink {
                    host_class: rule.host_class,
                    raw_url: value.trim().to_string(),
                });
            }
        }
    }
    None
}

/// Classifies a journal citation's open-access standing.
pub fn classify_open_access(citation: &Citation, config: &OaConfig) -> OaStatus {
    if find_open_access_link(citation, config).is_some() {
        return OaStatus::ConfirmedOpen;
    }
    let has_valid_doi = citation.doi().is_some_and(|d| match d {
        Identifier::Doi { raw, .. } => {
            crate::ident::validate_doi_syntax(raw) == ValidationStatus::Valid
        }
        _ => false,
    });
    if has_valid_doi {
        OaStatus::IdentifierUnconfirmed
    } else {
        OaStatus::NoIdentifier
    }
}

/// Everything resolution adds on top of an extracted citation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CitationAnnotations {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isbn: Option<ValidationStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doi: Option<ValidationStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub google_books: Option<ResolverRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oa: Option<OaStatus>,
}

/// A citation joined with its validation and resolution results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedCitation {
    pub citation: Citation,
    pub validation: CitationAnnotations,
}

/// Validates a citation's identifiers and resolves its book link.
/// Journal citations additionally get an open-access status.
pub fn annotate<R: Resolver + ?Sized>(
    citation: Citation,
    resolver: &R,
    oa_config: &OaConfig,
) -> AnnotatedCitation {
    let mut validation = CitationAnnotations::default();
    for identifier in &citation.identifiers {
        match identifier {
            Identifier::Isbn { normalized, .. } => {
                if validation.isbn.is_none() {
                    validation.isbn = Some(match normalized {
                        Some(n) => crate::ident::validate_isbn(n),
                        None => ValidationStatus::Invalid,
                    });
                }
            }
            Identifier::Doi { raw, .. } => {
                if validation.doi.is_none() {
                    validation.doi = Some(crate::ident::validate_doi_syntax(raw));
                }
            }
            Identifier::GoogleBooksId { id } => {
                if validation.google_books.is_none() {
                    validation.google_books = Some(resolver.resolve(id));
                }
            }
            Identifier::OpenAccessLink { .. } => {}
        }
    }
    if citation.kind == CitationKind::Journal {
        validation.oa = Some(classify_open_access(&citation, oa_config));
    }
    AnnotatedCitation {
        citation,
        validation,
    }
}

/// Minimal HTTP response for the live resolver.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Error)]
#[error("transport failure: {0}")]
pub struct TransportError(pub String);

/// HTTP GET abstraction so the library core stays network-free. The CLI
/// supplies a real client; tests supply stubs.
pub trait Transport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;
}

/// Settings for the live volume catalog client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LiveConfig {
    pub endpoint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub api_key: Option<String>,
    pub requests_per_second: f64,
    pub batch_size: usize,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            endpoint: "https://www.googleapis.com/books/v1/volumes".into(),
            api_key: None,
            requests_per_second: 1.0,
            batch_size: 40,
        }
    }
}

/// Rate-capped catalog client over an injected [`Transport`].
///
/// Responses map conservatively: only a definite 200 or 404 produces a
/// non-retryable record; anything else (throttling, server errors,
/// transport failures, unparseable bodies) is unknown and retryable.
pub struct LiveResolver<T> {
    transport: T,
    config: LiveConfig,
    last_request: Mutex<Option<Instant>>,
}

impl<T: Transport> LiveResolver<T> {
    pub fn new(transport: T, config: LiveConfig) -> Self {
        LiveResolver {
            transport,
            config,
            last_request: Mutex::new(None),
        }
    }

    fn throttle(&self) {
        if self.config.requests_per_second <= 0.0 {
            return;
        }
        let min_gap = Duration::from_secs_f64(1.0 / self.config.requests_per_second);
        let mut last = self.last_request.lock().expect("throttle lock poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < min_gap {
                std::thread::sleep(min_gap - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn volume_url(&self, id: &str) -> String {
        let mut url = format!("{}/{}", self.config.endpoint.trim_end_matches('/'), id);
        if let Some(key) = &self.api_key() {
            url.push_str("?key=");
            url.push_str(key);
        }
        url
    }

    fn api_key(&self) -> Option<String> {
        self.config.api_key.clone()
    }

    fn record_from_response(id: &str, response: HttpResponse) -> ResolverRecord {
        match response.status {
            200 => {
                let viewability = serde_json::from_str::<serde_json::Value>(&response.body)
                    .ok()
                    .and_then(|v| {
                        v.pointer("/accessInfo/viewability")
                            .and_then(|s| s.as_str())
                            .map(str::to_string)
                    });
                match viewability.as_deref() {
                    Some("ALL_PAGES") => ResolverRecord {
                        google_books_id: id.to_string(),
                        exists: true,
                        viewability: Viewability::Full,
                        retryable: false,
                    },
                    Some("PARTIAL") => ResolverRecord {
                        google_books_id: id.to_string(),
                        exists: true,
                        viewability: Viewability::Partial,
                        retryable: false,
                    },
                    Some("NO_PAGES") => ResolverRecord {
                        google_books_id: id.to_string(),
                        exists: true,
                        viewability: Viewability::None,
                        retryable: false,
                    },
                    _ => ResolverRecord {
                        google_books_id: id.to_string(),
                        exists: true,
                        viewability: Viewability::Unknown,
                        retryable: false,
                    },
                }
            }
            404 => ResolverRecord {
                google_books_id: id.to_string(),
                exists: false,
                viewability: Viewability::None,
                retryable: false,
            },
            _ => ResolverRecord {
                google_books_id: id.to_string(),
                exists: false,
                viewability: Viewability::Unknown,
                retryable: true,
            },
        }
    }
}

impl<T: Transport> Resolver for LiveResolver<T> {
    fn resolve(&self, id: &str) -> ResolverRecord {
        self.throttle();
        match self.transport.get(&self.volume_url(id)) {
            Ok(response) => Self::record_from_response(id, response),
            Err(_) => ResolverRecord {
                google_books_id: id.to_string(),
                exists: false,
                viewability: Viewability::Unknown,
                retryable: true,
            },
        }
    }

    fn resolve_batch(&self, ids: &[&str]) -> Vec<ResolverRecord> {
        let mut out = Vec::with_capacity(ids.len());
        for chunk in ids.chunks(self.config.batch_size.max(1)) {
            for id in chunk {
                out.push(self.resolve(id));
            }
        }
        out
    }
}


#[cfg(test)]
mod cache_tests {
    use super::*;

    #[test]
    fn second_lookup_hits_cache() {
        let inner = FixtureResolver::from_reader(
            r#"{"id":"G1","exists":true,"viewability":"full"}"#.as_bytes(),
        )
        .unwrap();
        let cached = CachedResolver::new(inner);
        assert_eq!(cached.resolve("G1"), cached.resolve("G1"));
        cached.resolve("G2");
        cached.resolve("G2");
        assert_eq!(cached.lookups(), 2); // one per distinct id
    }
}


#[cfg(test)]
mod annotate_tests {
    use super::*;
    use crate::wikitext::{extract_citations, ExtractorConfig, WikiPage};

    fn resolve_page(wikitext: &str) -> Vec<AnnotatedCitation> {
        let page = WikiPage {
            title: "T".into(),
            page_id: 1,
            wikitext: wikitext.into(),
        };
        let resolver = FixtureResolver::from_reader(
            r#"{"id":"G1","exists":true,"viewability":"full"}"#.as_bytes(),
        )
        .unwrap();
        extract_citations(&page, &ExtractorConfig::default())
            .into_iter()
            .map(|c| annotate(c, &resolver, &OaConfig::default()))
            .collect()
    }

    #[test]
    fn book_gets_isbn_status_and_resolution() {
        let out = resolve_page(
            "<ref>{{cite book|isbn=0-306-40615-2|url=https://books.google.com/books?id=G1}}</ref>",
        );
        assert_eq!(out.len(), 1);
        let v = &out[0].validation;
        assert_eq!(v.isbn, Some(ValidationStatus::Valid));
        let rec = v.google_books.as_ref().unwrap();
        assert!(rec.exists);
        assert_eq!(rec.viewability, Viewability::Full);
        assert!(v.oa.is_none());
    }

    #[test]
    fn bad_isbn_marked_invalid() {
        let out = resolve_page("<ref>{{cite book|isbn=0306406151}}</ref>");
        assert_eq!(out[0].validation.isbn, Some(ValidationStatus::Invalid));
    }

    #[test]
    fn journal_gets_oa_and_doi_status() {
        let out = resolve_page("<ref>{{cite journal|title=J|doi=10.1000/182}}</ref>");
        let v = &out[0].validation;
        assert_eq!(v.doi, Some(ValidationStatus::Valid));
        assert_eq!(v.oa, Some(OaStatus::IdentifierUnconfirmed));
        assert!(v.isbn.is_none());
    }

    #[test]
    fn unknown_volume_id_annotated_as_missing() {
        let out = resolve_page(
            "<ref>{{cite book|isbn=0306406152|url=https://books.google.com/books?id=zzzz}}</ref>",
        );
        let rec = out[0].validation.google_books.as_ref().unwrap();
        assert!(!rec.exists);
        assert_eq!(rec.viewability, Viewability::Unknown);
    }
}
