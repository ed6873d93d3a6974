use std::collections::BTreeMap;
use std::path::Path;

use wikiverify::access::AnnotatedCitation;
use wikiverify::scoring::{build_profile, ArticleProfile};

use crate::error::CliError;
use crate::output;

/// Loads annotated citations and rolls them up into per-article profiles,
/// sorted by title.
pub fn load_profiles(path: &Path) -> Result<Vec<ArticleProfile>, CliError> {
    let annotated: Vec<AnnotatedCitation> = output::read_jsonl(path)?;
    let mut by_title: BTreeMap<String, Vec<AnnotatedCitation>> = BTreeMap::new();
    for record in annotated {
        by_title
            .entry(record.citation.article_title.clone())
            .or_default()
            .push(record);
    }
    let mut profiles = Vec::with_capacity(by_title.len());
    for (title, group) in &by_title {
        profiles.push(build_profile(title, group)?);
    }
    Ok(profiles)
}
