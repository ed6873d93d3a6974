//! Hourly pageview count files: parsing, aggregation, top-N selection.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// One pageview line that matched the configured project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageviewRecord {
    pub project: String,
    pub title: String,
    pub count: u64,
}

/// What a single input line turned out to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineOutcome {
    Record(PageviewRecord),
    OtherProject,
    Malformed,
}

/// Parses one `project title count bytes` line. Titles are percent-decoded.
/// Lines for other projects are skipped; anything that does not fit the
/// format is malformed, never fatal.
pub fn parse_pageview_line(line: &str, project: &str) -> LineOutcome {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [line_project, raw_title, raw_count, _bytes] = fields.as_slice() else {
        return LineOutcome::Malformed;
    };
    if *line_project != project {
        return LineOutcome::OtherProject;
    }
    let Ok(title) = percent_decode_str(raw_title).decode_utf8() else {
        return LineOutcome::Malformed;
    };
    if title.is_empty() {
        return LineOutcome::Malformed;
    }
    let Ok(count) = raw_count.parse::<u64>() else {
        return LineOutcome::Malformed;
    };
    LineOutcome::Record(PageviewRecord {
        project: line_project.to_string(),
        title: title.into_owned(),
        count,
    })
}

/// Pageview titles use underscores where page titles use spaces; both sides
/// of any join normalize underscores to spaces, everything else untouched.
pub fn normalize_title(title: &str) -> String {
    title.replace('_', " ")
}

/// Tallies from one aggregation run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageviewStats {
    pub lines_total: u64,
    pub records: u64,
    pub other_project: u64,
    pub malformed: u64,
}

/// Sums counts per normalized title across any number of files.
pub fn aggregate_pageviews<R: BufRead>(
    readers: Vec<R>,
    project: &str,
) -> Result<(HashMap<String, u64>, PageviewStats), IngestError> {
    let mut totals: HashMap<String, u64> = HashMap::new();
    let mut stats = PageviewStats::default();
    for reader in readers {
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            stats.lines_total += 1;
            match parse_pageview_line(&line, project) {
                LineOutcome::Record(record) => {
                    stats.records += 1;
                    *totals.entry(normalize_title(&record.title)).or_insert(0) += record.count;
                }
                LineOutcome::OtherProject => stats.other_project += 1,
                LineOutcome::Malformed => stats.malformed += 1,
            }
        }
    }
    Ok((totals, stats))
}

/// Keeps the eligible titles and returns the top n totals, counts
/// descending with titles ascending as the tie-break.
pub fn select_top(
    totals: &HashMap<String, u64>,
    eligible_titles: &HashSet<String>,
    n: usize,
) -> Vec<(String, u64)> {
    let eligible: HashSet<String> = eligible_titles.iter().map(|t| normalize_title(t)).collect();
    let mut rows: Vec<(String, u64)> = totals
        .iter()
        .filter(|(title, _)| eligible.contains(normalize_title(title).as_str()))
        .map(|(title, count)| (title.clone(), *count))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(n);
    rows
}
