use std::io::Write;

use serde::Serialize;
use wikiverify::access::{
    annotate, AnnotatedCitation, CachedResolver, FixtureResolver, LiveResolver, OaStatus,
    Resolver, Viewability,
};
use wikiverify::ident::ValidationStatus;
use wikiverify::wikitext::{Citation, CitationKind};

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;
use crate::transport::UreqTransport;

#[derive(Debug, Default, Serialize)]
struct ValidateSummary {
    citations_total: u64,
    isbn: IsbnSummary,
    google_books: GoogleBooksSummary,
    journals: JournalSummary,
}

/// ISBN tallies over book citations.
#[derive(Debug, Default, Serialize)]
struct IsbnSummary {
    books_total: u64,
    valid: u64,
    invalid: u64,
    absent: u64,
}

/// Volume-link tallies. `valid` means the id resolved to an existing
/// volume; `invalid` means a definitive miss; `unresolved` means the
/// lookup could not be settled. Viewability buckets cover valid ids.
#[derive(Debug, Default, Serialize)]
struct GoogleBooksSummary {
    ids_total: u64,
    valid: u64,
    invalid: u64,
    unresolved: u64,
    full: u64,
    partial: u64,
    none: u64,
}

#[derive(Debug, Default, Serialize)]
struct JournalSummary {
    total: u64,
    with_doi: u64,
    confirmed_open: u64,
    identifier_unconfirmed: u64,
    no_identifier: u64,
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let citations_path = settings.citations_path();
    let citations: Vec<Citation> = output::read_jsonl(&citations_path)?;

    let needs_resolver = citations.iter().any(|c| c.google_books_id().is_some());
    let inner: Box<dyn Resolver> = if let Some(path) = &settings.resolver_fixture {
        Box::new(FixtureResolver::from_path(path)?)
    } else if settings.live {
        Box::new(LiveResolver::new(
            UreqTransport::new(),
            settings.live_config.clone(),
        ))
    } else if needs_resolver {
        return Err(CliError::Resolver(
            "volume ids present but no resolver configured: pass --resolver-fixture <path> or --live"
                .into(),
        ));
    } else {
        Box::new(FixtureResolver::default())
    };
    let resolver = CachedResolver::new(inner);

    let annotated: Vec<AnnotatedCitation> = citations
        .into_iter()
        .map(|citation| annotate(citation, &resolver, &settings.oa))
        .collect();

    let annotated_path = output::prepare(&settings.output_dir, "annotated.jsonl")?;
    let mut writer = output::jsonl_writer(&annotated_path)?;
    for record in &annotated {
        output::write_jsonl_line(&mut writer, &annotated_path, record)?;
    }
    writer
        .flush()
        .map_err(|err| output::io_err(&annotated_path, err))?;

    let summary = summarize(&annotated);
    let summary_path = output::prepare(&settings.output_dir, "validate_summary.json")?;
    output::write_json(&summary_path, &summary)?;

    println!(
        "validate: {} citations, {} resolver lookups",
        summary.citations_total,
        resolver.lookups()
    );
    output::print_table(
        &["tally", "count"],
        &[
            vec!["books_total".into(), summary.isbn.books_total.to_string()],
            vec!["isbn_valid".into(), summary.isbn.valid.to_string()],
            vec!["isbn_invalid".into(), summary.isbn.invalid.to_string()],
            vec!["isbn_absent".into(), summary.isbn.absent.to_string()],
            vec![
                "gb_ids_total".into(),
                summary.google_books.ids_total.to_string(),
            ],
            vec!["gb_valid".into(), summary.google_books.valid.to_string()],
            vec![
                "gb_invalid".into(),
                summary.google_books.invalid.to_string(),
            ],
            vec![
                "gb_unresolved".into(),
                summary.google_books.unresolved.to_string(),
            ],
            vec!["gb_full".into(), summary.google_books.full.to_string()],
            vec![
                "gb_partial".into(),
                summary.google_books.partial.to_string(),
            ],
            vec!["gb_none".into(), summary.google_books.none.to_string()],
            vec!["journals_total".into(), summary.journals.total.to_string()],
            vec![
                "journals_with_doi".into(),
                summary.journals.with_doi.to_string(),
            ],
            vec![
                "journals_confirmed_open".into(),
                summary.journals.confirmed_open.to_string(),
            ],
            vec![
                "journals_identifier_unconfirmed".into(),
                summary.journals.identifier_unconfirmed.to_string(),
            ],
            vec![
                "journals_no_identifier".into(),
                summary.journals.no_identifier.to_string(),
            ],
        ],
    );
    println!(
        "wrote {} and {}",
        annotated_path.display(),
        summary_path.display()
    );
    Ok(())
}

fn summarize(records: &[AnnotatedCitation]) -> ValidateSummary {
    let mut summary = ValidateSummary::default();
    for record in records {
        summary.citations_total += 1;
        if record.citation.kind == CitationKind::Book {
            summary.isbn.books_total += 1;
            match record.validation.isbn {
                Some(ValidationStatus::Valid) => summary.isbn.valid += 1,
                Some(_) => summary.isbn.invalid += 1,
                None => summary.isbn.absent += 1,
            }
        }
        if let Some(resolution) = &record.validation.google_books {
            summary.google_books.ids_total += 1;
            if resolution.viewability == Viewability::Unknown {
                summary.google_books.unresolved += 1;
            } else if resolution.exists {
                summary.google_books.valid += 1;
                match resolution.viewability {
                    Viewability::Full => summary.google_books.full += 1,
                    Viewability::Partial => summary.google_books.partial += 1,
                    Viewability::None => summary.google_books.none += 1,
                    Viewability::Unknown => {}
                }
            } else {
                summary.google_books.invalid += 1;
            }
        }
        if record.citation.kind == CitationKind::Journal {
            summary.journals.total += 1;
            if record.validation.doi == Some(ValidationStatus::Valid) {
                summary.journals.with_doi += 1;
            }
            match record.validation.oa {
                Some(OaStatus::ConfirmedOpen) => summary.journals.confirmed_open += 1,
                Some(OaStatus::IdentifierUnconfirmed) => {
                    summary.journals.identifier_unconfirmed += 1
                }
                Some(OaStatus::NoIdentifier) => summary.journals.no_identifier += 1,
                None => {}
            }
        }
    }
    summary
}
