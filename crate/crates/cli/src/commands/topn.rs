use std::collections::HashSet;

use serde::Serialize;
use wikiverify::ingest::{aggregate_pageviews, open_input, select_top, PageviewStats};
use wikiverify::wikitext::Citation;

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;

#[derive(Debug, Serialize)]
struct TopnSummary {
    files: u64,
    #[serde(flatten)]
    stats: PageviewStats,
    titles_aggregated: u64,
    eligible_filter: bool,
    rows_written: u64,
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    if settings.pageviews.is_empty() {
        return Err(CliError::Input(
            "no pageview files: pass --pageviews <path>... or set \"pageviews\" in the config file"
                .into(),
        ));
    }
    let mut readers = Vec::new();
    for path in &settings.pageviews {
        readers.push(open_input(path)?);
    }
    let (totals, stats) = aggregate_pageviews(readers, &settings.project)?;

    let eligible: HashSet<String> = match &settings.citations {
        Some(path) => {
            let citations: Vec<Citation> = output::read_jsonl(path)?;
            citations
                .into_iter()
                .map(|citation| citation.article_title)
                .collect()
        }
        None => totals.keys().cloned().collect(),
    };
    let rows = select_top(&totals, &eligible, settings.top_n);

    let path = output::prepare(&settings.output_dir, "topn.csv")?;
    let mut writer = output::csv_writer(&path)?;
    writer
        .write_record(["title", "total_count"])
        .map_err(|err| output::csv_err(&path, err))?;
    for (title, count) in &rows {
        writer
            .write_record([title.clone(), count.to_string()])
            .map_err(|err| output::csv_err(&path, err))?;
    }
    output::finish_csv(writer, &path)?;

    let summary = TopnSummary {
        files: settings.pageviews.len() as u64,
        stats,
        titles_aggregated: totals.len() as u64,
        eligible_filter: settings.citations.is_some(),
        rows_written: rows.len() as u64,
    };
    let summary_path = output::prepare(&settings.output_dir, "topn_summary.json")?;
    output::write_json(&summary_path, &summary)?;

    println!(
        "topn: {} lines over {} files ({} records, {} other-project, {} malformed); kept {} of {} titles",
        summary.stats.lines_total,
        summary.files,
        summary.stats.records,
        summary.stats.other_project,
        summary.stats.malformed,
        summary.rows_written,
        summary.titles_aggregated
    );
    let preview: Vec<Vec<String>> = rows
        .iter()
        .take(10)
        .map(|(title, count)| vec![title.clone(), count.to_string()])
        .collect();
    output::print_table(&["title", "total_count"], &preview);
    println!("wrote {} and {}", path.display(), summary_path.display());
    Ok(())
}
