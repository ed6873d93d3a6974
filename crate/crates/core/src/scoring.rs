//! Per-article aggregation and weighted verifiability scores.
//!
//! Annotated citations roll up into an [`ArticleProfile`] of counts, the
//! counts become seven component proportions, and a [`ScoreModel`] turns
//! the proportions into a single weighted score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::{AnnotatedCitation, OaStatus, Viewability};
use crate::ident::ValidationStatus;
use crate::wikitext::CitationKind;

/// Citation outcome counts for one article.
///
/// Google Books counts cover citations of every kind that carry a volume
/// id; a record whose viewability is unknown (unresolved lookup) is left
/// out of all Google Books counts, since neither existence nor viewability
/// is established. Viewability breakdowns cover working (existing) volumes
/// only, so `gb_full + gb_partial + gb_none == gb_valid <= gb_links_total`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArticleProfile {
    pub title: String,
    pub books_total: u64,
    pub isbns_present: u64,
    pub isbns_valid: u64,
    pub books_with_any_identifier: u64,
    pub gb_links_total: u64,
    pub gb_valid: u64,
    pub gb_full: u64,
    pub gb_partial: u64,
    pub gb_none: u64,
    pub journals_total: u64,
    pub journals_with_doi: u64,
    pub journals_confirmed_oa: u64,
    pub journals_no_identifier: u64,
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error(
        "citation in {title:?} at offset {offset} carries a volume id but no resolver record"
    )]
    MissingResolution { title: String, offset: usize },
    #[error("journal citation in {title:?} at offset {offset} has no open-access status")]
    MissingOaStatus { title: String, offset: usize },
    #[error("citation in {title:?} at offset {offset} has no {what} validation status")]
    MissingValidation {
        title: String,
        offset: usize,
        what: &'static str,
    },
    #[error("unknown score model preset {name:?}; available presets: {available}")]
    UnknownPreset { name: String, available: String },
    #[error("score model {model_id:?} rejected: {reason}")]
    InvalidModel { model_id: String, reason: String },
}

/// Rolls validated, resolved citations up into one article's counts.
///
/// Every citation must already carry the annotations its identifiers call
/// for; a gap is a caller bug and comes back as an error naming the
/// citation rather than a silent miscount.
pub fn build_profile(
    title: &str,
    citations: &[AnnotatedCitation],
) -> Result<ArticleProfile, ScoringError> {
    let mut p = ArticleProfile {
        title: title.to_string(),
        ..ArticleProfile::default()
    };
    for ac in citations {
        let c = &ac.citation;
        let v = &ac.validation;
        let offset = c.source_span.start;

        let mut working_gb = false;
        if c.google_books_id().is_some() {
            let record = v
                .google_books
                .as_ref()
                .ok_or_else(|| ScoringError::MissingResolution {
                    title: title.to_string(),
                    offset,
                })?;
            working_gb = record.exists;
            if record.viewability != Viewability::Unknown {
                p.gb_links_total += 1;
                if record.exists {
                    p.gb_valid += 1;
                    match record.viewability {
                        Viewability::Full => p.gb_full += 1,
                        Viewability::Partial => p.gb_partial += 1,
                        Viewability::None => p.gb_none += 1,
                        Viewability::Unknown => unreachable!("filtered above"),
                    }
                }
            }
        }

        match c.kind {
            CitationKind::Book => {
                p.books_total += 1;
                let isbn_status = match c.isbn() {
                    Some(_) => Some(v.isbn.ok_or_else(|| ScoringError::MissingValidation {
                        title: title.to_string(),
                        offset,
                        what: "isbn",
                    })?),
                    None => None,
                };
                if let Some(status) = isbn_status {
                    p.isbns_present += 1;
                    if status == ValidationStatus::Valid {
                        p.isbns_valid += 1;
                    }
                }
                if isbn_status == Some(ValidationStatus::Valid) || working_gb {
                    p.books_with_any_identifier += 1;
                }
            }
            CitationKind::Journal => {
                p.journals_total += 1;
                if c.doi().is_some() {
                    let status = v.doi.ok_or_else(|| ScoringError::MissingValidation {
                        title: title.to_string(),
                        offset,
                        what: "doi",
                    })?;
                    if status == ValidationStatus::Valid {
                        p.journals_with_doi += 1;
                    }
                }
                match v.oa.ok_or_else(|| ScoringError::MissingOaStatus {
                    title: title.to_string(),
                    offset,
                })? {
                    OaStatus::ConfirmedOpen => p.journals_confirmed_oa += 1,
                    OaStatus::NoIdentifier => p.journals_no_identifier += 1,
                    OaStatus::IdentifierUnconfirmed => {}
                }
            }
            CitationKind::Web | CitationKind::News | CitationKind::Other => {}
        }
    }
    Ok(p)
}

/// What a proportion becomes when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroDenominatorPolicy {
    /// Treat the component as fully unverifiable (0).
    #[default]
    Zero,
    /// Treat the component as trivially satisfied (1).
    One,
    /// Drop the component; remaining weights apply unchanged.
    Renormalize,
}

/// The seven score components. `None` marks a component excluded under the
/// renormalize policy; under the other policies every field is present.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentProportions {
    pub p_isbn_valid: Option<f64>,
    pub p_gb_valid: Option<f64>,
    pub p_journal_doi: Option<f64>,
    pub p_book_identifier: Option<f64>,
    pub p_journal_oa: Option<f64>,
    pub p_gb_full: Option<f64>,
    pub p_gb_partial: Option<f64>,
}

impl ComponentProportions {
    pub fn as_array(&self) -> [Option<f64>; 7] {
        [
            self.p_isbn_valid,
            self.p_gb_valid,
            self.p_journal_doi,
            self.p_book_identifier,
            self.p_journal_oa,
            self.p_gb_full,
            self.p_gb_partial,
        ]
    }
}

fn proportion(numerator: u64, denominator: u64, policy: ZeroDenominatorPolicy) -> Option<f64> {
    if denominator == 0 {
        match policy {
            ZeroDenominatorPolicy::Zero => Some(0.0),
            ZeroDenominatorPolicy::One => Some(1.0),
            ZeroDenominatorPolicy::Renormalize => None,
        }
    } else {
        Some(numerator as f64 / denominator as f64)
    }
}

/// Derives the seven component proportions from an article's counts.
pub fn compute_proportions(
    profile: &ArticleProfile,
    policy: ZeroDenominatorPolicy,
) -> ComponentProportions {
    ComponentProportions {
        p_isbn_valid: proportion(profile.isbns_valid, profile.isbns_present, policy),
        p_gb_valid: proportion(profile.gb_valid, profile.gb_links_total, policy),
        p_journal_doi: proportion(profile.journals_with_doi, profile.journals_total, policy),
        p_book_identifier: proportion(
            profile.books_with_any_identifier,
            profile.books_total,
            policy,
        ),
        p_journal_oa: proportion(profile.journals_confirmed_oa, profile.journals_total, policy),
        p_gb_full: proportion(profile.gb_full, profile.gb_valid, policy),
        p_gb_partial: proportion(profile.gb_partial, profile.gb_valid, policy),
    }
}

/// Weights over the seven components, in component order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub w_isbn_valid: f64,
    pub w_gb_valid: f64,
    pub w_journal_doi: f64,
    pub w_book_identifier: f64,
    pub w_journal_oa: f64,
    pub w_gb_full: f64,
    pub w_gb_partial: f64,
}

impl Weights {
    pub const fn new(w: [f64; 7]) -> Self {
        Weights {
            w_isbn_valid: w[0],
            w_gb_valid: w[1],
            w_journal_doi: w[2],
            w_book_identifier: w[3],
            w_journal_oa: w[4],
            w_gb_full: w[5],
            w_gb_partial: w[6],
        }
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.w_isbn_valid,
            self.w_gb_valid,
            self.w_journal_doi,
            self.w_book_identifier,
            self.w_journal_oa,
            self.w_gb_full,
            self.w_gb_partial,
        ]
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut w = self.as_array();
        for v in &mut w {
            *v *= factor;
        }
        Weights::new(w)
    }
}

/// A named weighting of the seven components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub model_id: String,
    pub weights: Weights,
    #[serde(default)]
    pub zero_denominator_policy: ZeroDenominatorPolicy,
}

impl ScoreModel {
    pub fn new(model_id: &str, weights: [f64; 7]) -> Self {
        ScoreModel {
            model_id: model_id.to_string(),
            weights: Weights::new(weights),
            zero_denominator_policy: ZeroDenominatorPolicy::default(),
        }
    }

    /// Weights must be non-negative, finite, and not all zero.
    pub fn validate(&self) -> Result<(), ScoringError> {
        let w = self.weights.as_array();
        if let Some(bad) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(ScoringError::InvalidModel {
                model_id: self.model_id.clone(),
                reason: format!("weight {bad} is not a non-negative finite number"),
            });
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(ScoringError::InvalidModel {
                model_id: self.model_id.clone(),
                reason: "all weights are zero".into(),
            });
        }
        Ok(())
    }
}

pub const PRESET_MODEL_IDS: [&str; 4] = ["model1", "model2", "model3", "model4"];

/// The four built-in weightings.
pub fn preset_models() -> Vec<ScoreModel> {
    vec![
        ScoreModel::new("model1", [1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.5]),
        ScoreModel::new("model2", [2.0, 2.0, 0.0, 0.0, 1.0, 1.0, 0.5]),
        ScoreModel::new("model3", [1.0, 1.0, 0.0, 0.0, 2.0, 2.0, 1.0]),
        ScoreModel::new("model4", [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5]),
    ]
}

/// Looks a preset up by id.
pub fn preset(name: &str) -> Result<ScoreModel, ScoringError> {
    preset_models()
        .into_iter()
        .find(|m| m.model_id == name)
        .ok_or_else(|| ScoringError::UnknownPreset {
            name: name.to_string(),
            available: PRESET_MODEL_IDS.join(", "),
        })
}

/// One article's score under one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleScore {
    pub title: String,
    pub model_id: String,
    pub score: f64,
    pub proportions: ComponentProportions,
}

/// Weighted sum over the present components. Components excluded by the
/// renormalize policy contribute nothing; the other weights apply as-is.
pub fn score(title: &str, proportions: &ComponentProportions, model: &ScoreModel) -> ArticleScore {
    let total: f64 = model
        .weights
        .as_array()
        .iter()
        .zip(proportions.as_array())
        .filter_map(|(w, p)| p.map(|p| w * p))
        .sum();
    ArticleScore {
        title: title.to_string(),
        model_id: model.model_id.clone(),
        score: total,
        proportions: *proportions,
    }
}

/// Convenience: proportions (under the model's policy) plus score in one step.
pub fn score_profile(profile: &ArticleProfile, model: &ScoreModel) -> ArticleScore {
    let proportions = compute_proportions(profile, model.zero_denominator_policy);
    score(&profile.title, &proportions, model)
}
