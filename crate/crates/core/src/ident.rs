//! Identifier handling: ISBN normalization and checksums, DOI syntax
//! validation, and Google Books volume-id extraction from URLs.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

/// Digit count of an ISBN, serialized as the bare number 10 or 13.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum IsbnForm {
    Ten,
    Thirteen,
}

impl From<IsbnForm> for u8 {
    fn from(f: IsbnForm) -> u8 {
        match f {
            IsbnForm::Ten => 10,
            IsbnForm::Thirteen => 13,
        }
    }
}

impl TryFrom<u8> for IsbnForm {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            10 => Ok(IsbnForm::Ten),
            13 => Ok(IsbnForm::Thirteen),
            other => Err(format!("isbn form must be 10 or 13, got {other}")),
        }
    }
}

/// Host family of a recognized open-access link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HostClass {
    #[serde(rename = "arxiv")]
    ArXiv,
    #[serde(rename = "pmc")]
    Pmc,
}

/// One identifier attached to a citation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Identifier {
    Isbn {
        raw: String,
        normalized: Option<String>,
        form: Option<IsbnForm>,
    },
    Doi {
        raw: String,
        normalized: Option<String>,
    },
    GoogleBooksId {
        id: String,
    },
    OpenAccessLink {
        host_class: HostClass,
        raw_url: String,
    },
}

impl Identifier {
    /// Builds an ISBN identifier from a raw parameter value, normalizing
    /// when possible. Garbled values keep `raw` with no normalized form.
    pub fn isbn(raw: &str) -> Identifier {
        let normalized = normalize_isbn(raw).ok();
        let form = normalized.as_deref().map(|n| {
            if n.len() == 10 {
                IsbnForm::Ten
            } else {
                IsbnForm::Thirteen
            }
        });
        Identifier::Isbn {
            raw: raw.to_string(),
            normalized,
            form,
        }
    }

    /// Builds a DOI identifier from a raw parameter value.
    pub fn doi(raw: &str) -> Identifier {
        Identifier::Doi {
            raw: raw.to_string(),
            normalized: normalize_doi(raw),
        }
    }
}

/// Validation outcome for a single identifier. `Absent` applies at the
/// citation level: the citation carries no identifier of that family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationStatus {
    Valid,
    Invalid,
    Absent,
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsbnError {
    #[error("not an isbn: {0:?}")]
    NotAnIsbn(String),
}

/// Strips separators and an optional leading `ISBN` label, uppercases `x`,
/// and checks shape. The result is 10 or 13 chars of `[0-9X]`, with `X`
/// allowed only as the final char of a 10-char form.
pub fn normalize_isbn(raw: &str) -> Result<String, IsbnError> {
    let mut s = raw.trim();
    let upper = s.to_ascii_uppercase();
    if let Some(rest) = upper.strip_prefix("ISBN") {
        s = &s[s.len() - rest.len()..];
        s = s.trim_start();
        s = s.strip_prefix(':').unwrap_or(s).trim_start();
    }
    let err = || IsbnError::NotAnIsbn(raw.to_string());
    let mut out = String::with_capacity(13);
    for c in s.chars() {
        match c {
            '-' | ' ' => {}
            '0'..='9' => out.push(c),
            'x' | 'X' => out.push('X'),
            _ => return Err(err()),
        }
    }
    match out.len() {
        10 => {
            if out[..9].bytes().all(|b| b.is_ascii_digit()) {
                Ok(out)
            } else {
                Err(err())
            }
        }
        13 => {
            if out.bytes().all(|b| b.is_ascii_digit()) {
                Ok(out)
            } else {
                Err(err())
            }
        }
        _ => Err(err()),
    }
}

/// ISBN-10 checksum over a normalized 10-char string: with descending
/// weights 10..1 (check char `X` counting as 10), the weighted sum must be
/// divisible by 11.
pub fn checksum_isbn10(isbn: &str) -> Result<bool, IsbnError> {
    let b = isbn.as_bytes();
    if b.len() != 10 {
        return Err(IsbnError::NotAnIsbn(isbn.to_string()));
    }
    let mut sum: u32 = 0;
    for (i, &c) in b.iter().enumerate() {
        let value = match c {
            b'0'..=b'9' => u32::from(c - b'0'),
            b'X' | b'x' if i == 9 => 10,
            _ => return Err(IsbnError::NotAnIsbn(isbn.to_string())),
        };
        sum += (10 - i as u32) * value;
    }
    Ok(sum.is_multiple_of(11))
}

/// ISBN-13 checksum over a normalized 13-digit string: with alternating
/// weights 1,3,1,3,... the weighted sum must be divisible by 10.
pub fn checksum_isbn13(isbn: &str) -> Result<bool, IsbnError> {
    let b = isbn.as_bytes();
    if b.len() != 13 || !b.iter().all(u8::is_ascii_digit) {
        return Err(IsbnError::NotAnIsbn(isbn.to_string()));
    }
    let mut sum: u32 = 0;
    for (i, &c) in b.iter().enumerate() {
        let weight = if i % 2 == 0 { 1 } else { 3 };
        sum += weight * u32::from(c - b'0');
    }
    Ok(sum.is_multiple_of(10))
}

/// Total validation of a raw ISBN value. Values that cannot be normalized
/// (wrong length, stray chars, misplaced `X`) are `Invalid`, never `Absent`:
/// a garbled ISBN is still a failed verifiability signal.
pub fn validate_isbn(raw: &str) -> ValidationStatus {
    let Ok(normalized) = normalize_isbn(raw) else {
        return ValidationStatus::Invalid;
    };
    let ok = if normalized.len() == 10 {
        checksum_isbn10(&normalized)
    } else {
        checksum_isbn13(&normalized)
    };
    match ok {
        Ok(true) => ValidationStatus::Valid,
        _ => ValidationStatus::Invalid,
    }
}

const DOI_PREFIXES: &[&str] = &[
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "https://doi.org/",
    "http://doi.org/",
    "dx.doi.org/",
    "doi.org/",
    "urn:doi:",
    "info:doi:",
    "doi:",
];

/// Strips a leading `doi:` label or resolver URL prefix. Returns the bare
/// candidate, or `None` when nothing remains.
pub fn normalize_doi(raw: &str) -> Option<String> {
    let mut s = raw.trim();
    'outer: loop {
        let lower = s.to_ascii_lowercase();
        for prefix in DOI_PREFIXES {
            if lower.starts_with(prefix) {
                s = s[prefix.len()..].trim_start();
                continue 'outer;
            }
        }
        break;
    }
    if s.is_empty() {
        None
    } else {
        Some(s.to_string())
    }
}

static DOI_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^10\.\d{4,}(?:\.\d+)*/\S+$").unwrap());

/// Syntactic DOI validation: after prefix stripping the value must look like
/// `10.<registrant of 4+ digits, optionally dotted>/<non-empty suffix>`.
/// No resolution is attempted.
pub fn validate_doi_syntax(raw: &str) -> ValidationStatus {
    match normalize_doi(raw) {
        Some(doi) if DOI_RE.is_match(&doi) => ValidationStatus::Valid,
        _ => ValidationStatus::Invalid,
    }
}

fn is_valid_gb_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Pulls a Google Books volume id out of a URL. Recognizes
/// `books.google.<tld>` hosts and `google.<tld>/books` paths; the `id` query
/// parameter wins, then the `/books/edition/<title>/<id>` path form.
/// Returns `None` for other hosts or when no well-formed id is present.
pub fn extract_google_books_id(url_str: &str) -> Option<String> {
    let url = Url::parse(url_str.trim()).ok()?;
    if !matches!(url.scheme(), "http" | "https") {
        return None;
    }
    let host = url.host_str()?.to_ascii_lowercase();
    let labels: Vec<&str> = host.split('.').collect();
    let books_host = labels.len() >= 3 && labels[0] == "books" && labels[1] == "google";
    let bare = if labels.first() == Some(&"www") {
        &labels[1..]
    } else {
        &labels[..]
    };
    let google_host = bare.len() >= 2 && bare[0] == "google";
    if !books_host && !google_host {
        return None;
    }
    let segments: Vec<&str> = url
        .path_segments()
        .map(|s| s.filter(|p| !p.is_empty()).collect())
        .unwrap_or_default();
    if !books_host && segments.first() != Some(&"books") {
        return None;
    }
    for (key, value) in url.query_pairs() {
        if key == "id" && is_valid_gb_id(&value) {
            return Some(value.into_owned());
        }
    }
    if let Some(pos) = segments.iter().position(|s| *s == "edition") {
        if let Some(id) = segments.get(pos + 2) {
            if is_valid_gb_id(id) {
                return Some((*id).to_string());
            }
        }
    }
    None
}

#[cfg(test)]
mod isbn_tests {
    use super::*;

    #[test]
    fn normalize_strips_separators_and_label() {
        assert_eq!(normalize_isbn("0-306-40615-2").unwrap(), "0306406152");
        assert_eq!(
            normalize_isbn("ISBN 978-0-306-40615-7").unwrap(),
            "9780306406157"
        );
        assert_eq!(normalize_isbn("isbn: 0 306 40615 2").unwrap(), "0306406152");
        assert_eq!(normalize_isbn("097522980x").unwrap(), "097522980X");
    }

    #[test]
    fn normalize_rejects_garbage() {
        assert!(normalize_isbn("").is_err());
        assert!(normalize_isbn("hello").is_err());
        assert!(normalize_isbn("12345").is_err());
        assert!(normalize_isbn("030640615299").is_err()); // 12 chars
        assert!(normalize_isbn("03064061529991").is_err()); // 14 chars
        assert!(normalize_isbn("030640615X2").is_err()); // X not final
        assert!(normalize_isbn("978030640615X").is_err()); // X in 13-form
        assert!(normalize_isbn("0306–40615–2").is_err()); // non-ascii dashes
    }

    #[test]
    fn checksum10_known_vectors() {
        // 0306406152: 0*10+3*9+0*8+6*7+4*6+0*5+6*4+1*3+5*2+2*1 = 132 = 12*11
        assert!(checksum_isbn10("0306406152").unwrap());
        // 097522980X: sum 264 = 24*11, X contributes 10*1
        assert!(checksum_isbn10("097522980X").unwrap());
        assert!(checksum_isbn10("080442957X").unwrap());
        assert!(!checksum_isbn10("0306406153").unwrap());
        assert!(checksum_isbn10("030640615").is_err());
        assert!(checksum_isbn10("030640615a").is_err());
    }

    #[test]
    fn checksum13_known_vectors() {
        // 9780306406157: 9+21+8+0+3+0+6+12+0+18+1+15+7 = 100
        assert!(checksum_isbn13("9780306406157").unwrap());
        assert!(checksum_isbn13("9780804429573").unwrap());
        assert!(!checksum_isbn13("9780306406156").unwrap());
        assert!(checksum_isbn13("978030640615").is_err());
        assert!(checksum_isbn13("978030640615X").is_err());
    }

    #[test]
    fn validate_is_total() {
        assert_eq!(validate_isbn("0-306-40615-2"), ValidationStatus::Valid);
        assert_eq!(validate_isbn("ISBN 0-306-40615-2"), ValidationStatus::Valid);
        assert_eq!(validate_isbn("0-306-40615-3"), ValidationStatus::Invalid);
        assert_eq!(validate_isbn("banana"), ValidationStatus::Invalid);
        assert_eq!(validate_isbn(""), ValidationStatus::Invalid);
        assert_eq!(validate_isbn("9780306406157"), ValidationStatus::Valid);
    }

    #[test]
    fn identifier_constructor_keeps_garbled_raw() {
        let id = Identifier::isbn("not-an-isbn");
        match id {
            Identifier::Isbn {
                raw,
                normalized,
                form,
            } => {
                assert_eq!(raw, "not-an-isbn");
                assert!(normalized.is_none());
                assert!(form.is_none());
            }
            other => panic!("unexpected identifier {other:?}"),
        }
    }

    #[test]
    fn isbn_form_serializes_as_number() {
        let id = Identifier::isbn("0306406152");
        let json = serde_json::to_string(&id).unwrap();
        assert!(json.contains("\"form\":10"), "{json}");
        let back: Identifier = serde_json::from_str(&json).unwrap();
        assert_eq!(back, id);
    }
}

#[cfg(test)]
mod doi_tests {
    use super::*;

    #[test]
    fn accepts_plain_and_prefixed() {
        assert_eq!(validate_doi_syntax("10.1000/182"), ValidationStatus::Valid);
        assert_eq!(
            validate_doi_syntax("doi:10.1000/182"),
            ValidationStatus::Valid
        );
        assert_eq!(
            validate_doi_syntax("DOI:10.1038/nphys1170"),
            ValidationStatus::Valid
        );
        assert_eq!(
            validate_doi_syntax("https://doi.org/10.1000/182"),
            ValidationStatus::Valid
        );
        assert_eq!(
            validate_doi_syntax("http://dx.doi.org/10.1000.10/abc"),
            ValidationStatus::Valid
        );
    }

    #[test]
    fn rejects_bad_directory_or_registrant() {
        assert_eq!(validate_doi_syntax("11.1000/182"), ValidationStatus::Invalid);
        assert_eq!(validate_doi_syntax("10.999/x"), ValidationStatus::Invalid);
        assert_eq!(validate_doi_syntax("10.1000"), ValidationStatus::Invalid);
        assert_eq!(validate_doi_syntax("10.1000/"), ValidationStatus::Invalid);
        assert_eq!(validate_doi_syntax(""), ValidationStatus::Invalid);
        assert_eq!(validate_doi_syntax("doi:"), ValidationStatus::Invalid);
    }

    #[test]
    fn normalize_strips_prefixes() {
        assert_eq!(normalize_doi("doi:10.1000/182").as_deref(), Some("10.1000/182"));
        assert_eq!(
            normalize_doi("https://doi.org/10.1000/182").as_deref(),
            Some("10.1000/182")
        );
        assert_eq!(normalize_doi("   "), None);
    }
}

#[cfg(test)]
mod google_books_tests {
    use super::*;

    #[test]
    fn extracts_id_query_param() {
        assert_eq!(
            extract_google_books_id("https://books.google.com/books?id=zyTCAlFPjgYC&pg=PA50"),
            Some("zyTCAlFPjgYC".to_string())
        );
        assert_eq!(
            extract_google_books_id("http://books.google.co.uk/books?id=AbC-_123"),
            Some("AbC-_123".to_string())
        );
    }

    #[test]
    fn extracts_edition_path_form() {
        assert_eq!(
            extract_google_books_id(
                "https://www.google.com/books/edition/Some_Title/zyTCAlFPjgYC?hl=en"
            ),
            Some("zyTCAlFPjgYC".to_string())
        );
        assert_eq!(
            extract_google_books_id("https://books.google.com/books/edition/T/IdId99"),
            Some("IdId99".to_string())
        );
    }

    #[test]
    fn rejects_foreign_hosts_and_paths() {
        assert_eq!(
            extract_google_books_id("https://example.com/books?id=zyTCAlFPjgYC"),
            None
        );
        assert_eq!(
            extract_google_books_id("https://play.google.com/books?id=zyTCAlFPjgYC"),
            None
        );
        assert_eq!(
            extract_google_books_id("https://www.google.com/search?id=zyTCAlFPjgYC"),
            None
        );
        assert_eq!(extract_google_books_id("not a url"), None);
        assert_eq!(
            extract_google_books_id("ftp://books.google.com/books?id=zyTCAlFPjgYC"),
            None
        );
    }

    #[test]
    fn rejects_malformed_ids() {
        assert_eq!(
            extract_google_books_id("https://books.google.com/books?id="),
            None
        );
        assert_eq!(
            extract_google_books_id("https://books.google.com/books?id=a%20b"),
            None
        );
        assert_eq!(extract_google_books_id("https://books.google.com/books"), None);
    }

    #[test]
    fn id_param_wins_over_edition_path() {
        assert_eq!(
            extract_google_books_id(
                "https://www.google.com/books/edition/T/pathId00?id=queryId0"
            ),
            Some("queryId0".to_string())
        );
    }
}
