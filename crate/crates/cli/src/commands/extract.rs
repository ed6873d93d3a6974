use std::io::Write;

use serde::Serialize;
use wikiverify::ingest::{open_input, stream_dump};
use wikiverify::wikitext::{
    extract_citations, Anchoring, CitationKind, FLAG_BARE_ISBN, FLAG_MALFORMED_REF,
    FLAG_MALFORMED_TEMPLATE,
};

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;

#[derive(Debug, Default, Serialize)]
struct ExtractSummary {
    articles_processed: u64,
    articles_with_citations: u64,
    citations_total: u64,
    by_kind: KindTally,
    by_anchoring: AnchoringTally,
    flags: FlagTally,
}

#[derive(Debug, Default, Serialize)]
struct KindTally {
    book: u64,
    journal: u64,
    web: u64,
    news: u64,
    other: u64,
}

#[derive(Debug, Default, Serialize)]
struct AnchoringTally {
    inline: u64,
    free: u64,
}

#[derive(Debug, Default, Serialize)]
struct FlagTally {
    malformed_ref: u64,
    malformed_template: u64,
    bare_isbn: u64,
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let Some(dump) = settings.dump.as_ref() else {
        return Err(CliError::Input(
            "no export to read: pass --dump <path> or set \"dump\" in the config file".into(),
        ));
    };
    let reader = open_input(dump)?;

    let citations_path = output::prepare(&settings.output_dir, "citations.jsonl")?;
    let mut writer = output::jsonl_writer(&citations_path)?;

    let mut summary = ExtractSummary::default();
    for page in stream_dump(reader) {
        let page = page?;
        let citations = extract_citations(&page, &settings.extractor);
        summary.articles_processed += 1;
        if !citations.is_empty() {
            summary.articles_with_citations += 1;
        }
        for citation in &citations {
            summary.citations_total += 1;
            match citation.kind {
                CitationKind::Book => summary.by_kind.book += 1,
                CitationKind::Journal => summary.by_kind.journal += 1,
                CitationKind::Web => summary.by_kind.web += 1,
                CitationKind::News => summary.by_kind.news += 1,
                CitationKind::Other => summary.by_kind.other += 1,
            }
            match citation.anchoring {
                Anchoring::Inline => summary.by_anchoring.inline += 1,
                Anchoring::Free => summary.by_anchoring.free += 1,
            }
            for flag in &citation.flags {
                match flag.as_str() {
                    FLAG_MALFORMED_REF => summary.flags.malformed_ref += 1,
                    FLAG_MALFORMED_TEMPLATE => summary.flags.malformed_template += 1,
                    FLAG_BARE_ISBN => summary.flags.bare_isbn += 1,
                    _ => {}
                }
            }
            output::write_jsonl_line(&mut writer, &citations_path, citation)?;
        }
    }
    writer
        .flush()
        .map_err(|err| output::io_err(&citations_path, err))?;

    let summary_path = output::prepare(&settings.output_dir, "extract_summary.json")?;
    output::write_json(&summary_path, &summary)?;

    println!(
        "extract: {} articles, {} with citations, {} citations",
        summary.articles_processed, summary.articles_with_citations, summary.citations_total
    );
    output::print_table(
        &["tally", "count"],
        &[
            vec!["book".into(), summary.by_kind.book.to_string()],
            vec!["journal".into(), summary.by_kind.journal.to_string()],
            vec!["web".into(), summary.by_kind.web.to_string()],
            vec!["news".into(), summary.by_kind.news.to_string()],
            vec!["other".into(), summary.by_kind.other.to_string()],
            vec!["inline".into(), summary.by_anchoring.inline.to_string()],
            vec!["free".into(), summary.by_anchoring.free.to_string()],
            vec![
                "malformed_ref".into(),
                summary.flags.malformed_ref.to_string(),
            ],
            vec![
                "malformed_template".into(),
                summary.flags.malformed_template.to_string(),
            ],
            vec!["bare_isbn".into(), summary.flags.bare_isbn.to_string()],
        ],
    );
    println!(
        "wrote {} and {}",
        citations_path.display(),
        summary_path.display()
    );
    Ok(())
}
