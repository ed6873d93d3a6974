//! Rankings within a model and rank movement between models.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::ArticleScore;

/// One article's position in a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedArticle {
    pub rank: u64,
    pub title: String,
    pub score: f64,
    /// Rank of the first member of this entry's equal-score run. Entries
    /// with the same id are score ties; their relative order is the fixed
    /// title tie-break, not a meaningful distinction.
    pub tie_group_id: u64,
}

/// Articles ordered by score under one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub model_id: String,
    pub entries: Vec<RankedArticle>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankingError {
    #[error("duplicate title {0:?} in score list")]
    DuplicateTitle(String),
    #[error("scores mix models {expected:?} and {found:?}")]
    MixedModels { expected: String, found: String },
    #[error(
        "rankings cover different articles; only in base: {only_in_base:?}; only in other: {only_in_other:?}"
    )]
    TitleSetMismatch {
        only_in_base: Vec<String>,
        only_in_other: Vec<String>,
    },
}

/// Orders scores descending (ties broken by title ascending) and assigns
/// ordinal ranks 1..N. Equal scores share a tie group.
pub fn rank_articles(scores: &[ArticleScore]) -> Result<Ranking, RankingError> {
    let model_id = scores.first().map(|s| s.model_id.clone()).unwrap_or_default();
    let mut seen = BTreeSet::new();
    for s in scores {
        if s.model_id != model_id {
            return Err(RankingError::MixedModels {
                expected: model_id,
                found: s.model_id.clone(),
            });
        }
        if !seen.insert(s.title.as_str()) {
            return Err(RankingError::DuplicateTitle(s.title.clone()));
        }
    }

    let mut ordered: Vec<&ArticleScore> = scores.iter().collect();
    ordered.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.title.cmp(&b.title))
    });

    let mut entries = Vec::with_capacity(ordered.len());
    let mut tie_group_id = 0u64;
    for (idx, s) in ordered.iter().enumerate() {
        let rank = idx as u64 + 1;
        if idx == 0 || ordered[idx - 1].score.total_cmp(&s.score).is_ne() {
            tie_group_id = rank;
        }
        entries.push(RankedArticle {
            rank,
            title: s.title.clone(),
            score: s.score,
            tie_group_id,
        });
    }
    Ok(Ranking { model_id, entries })
}

/// One article's rank under two models. Positive delta means the article
/// improved (moved to a smaller rank number) under the other model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub title: String,
    pub rank_base: u64,
    pub rank_other: u64,
    pub delta: i64,
}

/// Per-article rank movement from a base model to another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankComparison {
    pub base_model_id: String,
    pub other_model_id: String,
    /// One row per title, sorted by base rank.
    pub rows: Vec<DeltaRow>,
}

/// Joins two rankings over the same articles into per-title deltas.
pub fn compare(base: &Ranking, other: &Ranking) -> Result<RankComparison, RankingError> {
    let base_titles: BTreeSet<&str> = base.entries.iter().map(|e| e.title.as_str()).collect();
    let other_titles: BTreeSet<&str> = other.entries.iter().map(|e| e.title.as_str()).collect();
    if base_titles != other_titles {
        return Err(RankingError::TitleSetMismatch {
            only_in_base: base_titles
                .difference(&other_titles)
                .map(|s| s.to_string())
                .collect(),
            only_in_other: other_titles
                .difference(&base_titles)
                .map(|s| s.to_string())
                .collect(),
        });
    }

    let other_rank: std::collections::HashMap<&str, u64> = other
        .entries
        .iter()
        .map(|e| (e.title.as_str(), e.rank))
        .collect();
    let mut rows: Vec<DeltaRow> = base
        .entries
        .iter()
        .map(|e| {
            let rank_other = other_rank[e.title.as_str()];
            DeltaRow {
                title: e.title.clone(),
                rank_base: e.rank,
                rank_other,
                delta: e.rank as i64 - rank_other as i64,
            }
        })
        .collect();
    rows.sort_by_key(|r| r.rank_base);
    Ok(RankComparison {
        base_model_id: base.model_id.clone(),
        other_model_id: other.model_id.clone(),
        rows,
    })
}

/// Largest and smallest rank movements in a comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoversReport {
    /// Top n by delta, descending (ties by title ascending).
    pub top_gainers: Vec<DeltaRow>,
    /// Bottom n by delta, ascending (ties by title ascending).
    pub top_losers: Vec<DeltaRow>,
}

/// Picks the n largest and n smallest deltas. Asking for more rows than
/// the comparison has returns them all.
pub fn top_movers(cmp: &RankComparison, n: usize) -> MoversReport {
    let mut gainers = cmp.rows.clone();
    gainers.sort_by(|a, b| b.delta.cmp(&a.delta).then_with(|| a.title.cmp(&b.title)));
    gainers.truncate(n);
    let mut losers = cmp.rows.clone();
    losers.sort_by(|a, b| a.delta.cmp(&b.delta).then_with(|| a.title.cmp(&b.title)));
    losers.truncate(n);
    MoversReport {
        top_gainers: gainers,
        top_losers: losers,
    }
}

/// Plot-ready `(rank_base, rank_other, title)` rows, sorted by base rank.
pub fn scatter_data(cmp: &RankComparison) -> Vec<(u64, u64, String)> {
    cmp.rows
        .iter()
        .map(|r| (r.rank_base, r.rank_other, r.title.clone()))
        .collect()
}

/// Renders a comparison as a standalone square scatter plot: base rank on
/// the x axis, other rank on y, both increasing away from the origin. The
/// output is deterministic for identical inputs.
pub fn scatter_svg(cmp: &RankComparison) -> String {
    const SIZE: f64 = 1000.0;
    const MARGIN: f64 = 50.0;
    let n = cmp.rows.len().max(1) as f64;
    let scale = (SIZE - 2.0 * MARGIN) / n;
    let place = |rank: u64| MARGIN + rank as f64 * scale;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    svg.push_str(&format!(
        "  <title>rank comparison: {} vs {}</title>\n",
        xml_escape(&cmp.base_model_id),
        xml_escape(&cmp.other_model_id)
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN}\" y1=\"{m2}\" x2=\"{m2}\" y2=\"{m2}\" stroke=\"black\"/>\n",
        m2 = SIZE - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{m2}\" stroke=\"black\"/>\n",
        m2 = SIZE - MARGIN
    ));
    for row in &cmp.rows {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\" fill-opacity=\"0.6\"><title>{}</title></circle>\n",
            place(row.rank_base),
            place(row.rank_other),
            xml_escape(&row.title)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
