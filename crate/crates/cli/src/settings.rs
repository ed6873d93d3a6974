use std::collections::BTreeSet;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wikiverify::access::{LiveConfig, OaConfig};
use wikiverify::scoring::{preset, ScoreModel, ZeroDenominatorPolicy, PRESET_MODEL_IDS};
use wikiverify::wikitext::ExtractorConfig;

use crate::error::CliError;
use crate::{Cli, Command};

/// Run-configuration file. Every field is optional; command-line flags
/// override anything set here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub dump: Option<PathBuf>,
    pub citations: Option<PathBuf>,
    pub annotated: Option<PathBuf>,
    pub pageviews: Vec<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub project: Option<String>,
    pub models: Vec<String>,
    pub zero_denominator_policy: Option<ZeroDenominatorPolicy>,
    pub resolver_fixture: Option<PathBuf>,
    pub top_n: Option<usize>,
    pub movers: Option<usize>,
    pub extractor: Option<ExtractorConfig>,
    pub oa: Option<OaConfig>,
    pub live: Option<LiveFileConfig>,
}

/// Live-resolver settings accepted from the config file. The API key is
/// deliberately not accepted here; it comes from the GOOGLE_BOOKS_API_KEY
/// environment variable only.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiveFileConfig {
    pub endpoint: Option<String>,
    pub requests_per_second: Option<f64>,
    pub batch_size: Option<usize>,
}

/// Everything a command needs, after merging defaults, the config file,
/// and command-line flags (flags win).
#[derive(Debug)]
pub struct Settings {
    pub output_dir: PathBuf,
    pub project: String,
    pub models: Vec<ScoreModel>,
    pub resolver_fixture: Option<PathBuf>,
    pub live: bool,
    pub live_config: LiveConfig,
    pub extractor: ExtractorConfig,
    pub oa: OaConfig,
    pub dump: Option<PathBuf>,
    pub citations: Option<PathBuf>,
    pub annotated: Option<PathBuf>,
    pub pageviews: Vec<PathBuf>,
    pub top_n: usize,
    pub movers: usize,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Settings, CliError> {
        let file = match &cli.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };

        let output_dir = cli
            .output_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("."));
        let project = cli
            .project
            .clone()
            .or(file.project)
            .unwrap_or_else(|| "en".to_string());

        let policy_override: Option<ZeroDenominatorPolicy> = cli
            .zero_denominator_policy
            .map(Into::into)
            .or(file.zero_denominator_policy);
        let model_tokens: Vec<String> = match &cli.models {
            Some(list) => list
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            None if !file.models.is_empty() => file.models.clone(),
            None => PRESET_MODEL_IDS.iter().map(|s| s.to_string()).collect(),
        };
        let models = load_models(&model_tokens, policy_override)?;

        let mut live_config = LiveConfig::default();
        if let Some(live) = &file.live {
            if let Some(endpoint) = &live.endpoint {
                live_config.endpoint = endpoint.clone();
            }
            if let Some(rps) = live.requests_per_second {
                live_config.requests_per_second = rps;
            }
            if let Some(batch) = live.batch_size {
                live_config.batch_size = batch;
            }
        }
        live_config.api_key = env::var("GOOGLE_BOOKS_API_KEY")
            .ok()
            .filter(|key| !key.is_empty());

        let mut settings = Settings {
            output_dir,
            project,
            models,
            resolver_fixture: cli.resolver_fixture.clone().or(file.resolver_fixture),
            live: cli.live,
            live_config,
            extractor: file.extractor.unwrap_or_default(),
            oa: file.oa.unwrap_or_default(),
            dump: file.dump,
            citations: file.citations,
            annotated: file.annotated,
            pageviews: file.pageviews,
            top_n: file.top_n.unwrap_or(5000),
            movers: file.movers.unwrap_or(5),
        };

        match &cli.command {
            Command::Extract { dump } => {
                if let Some(path) = dump {
                    settings.dump = Some(path.clone());
                }
            }
            Command::Validate { citations } => {
                if let Some(path) = citations {
                    settings.citations = Some(path.clone());
                }
            }
            Command::Score { annotated } | Command::Rank { annotated } => {
                if let Some(path) = annotated {
                    settings.annotated = Some(path.clone());
                }
            }
            Command::Compare { annotated, movers } => {
                if let Some(path) = annotated {
                    settings.annotated = Some(path.clone());
                }
                if let Some(n) = movers {
                    settings.movers = *n;
                }
            }
            Command::Topn {
                pageviews,
                citations,
                top_n,
            } => {
                if !pageviews.is_empty() {
                    settings.pageviews = pageviews.clone();
                }
                if let Some(path) = citations {
                    settings.citations = Some(path.clone());
                }
                if let Some(n) = top_n {
                    settings.top_n = *n;
                }
            }
        }

        Ok(settings)
    }

    /// Citations file to read, defaulting next to the other outputs.
    pub fn citations_path(&self) -> PathBuf {
        self.citations
            .clone()
            .unwrap_or_else(|| self.output_dir.join("citations.jsonl"))
    }

    /// Annotated-citations file to read, defaulting next to the other
    /// outputs.
    pub fn annotated_path(&self) -> PathBuf {
        self.annotated
            .clone()
            .unwrap_or_else(|| self.output_dir.join("annotated.jsonl"))
    }
}

fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read config file {}: {err}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|err| CliError::Config(format!("config file {} is invalid: {err}", path.display())))
}

/// A model file holds either one model object or an array of them.
#[derive(Deserialize)]
#[serde(untagged)]
enum ModelFile {
    One(ScoreModel),
    Many(Vec<ScoreModel>),
}

fn load_models(
    tokens: &[String],
    policy_override: Option<ZeroDenominatorPolicy>,
) -> Result<Vec<ScoreModel>, CliError> {
    if tokens.is_empty() {
        return Err(CliError::Config("no score models selected".into()));
    }
    let mut models = Vec::new();
    for token in tokens {
        if PRESET_MODEL_IDS.contains(&token.as_str()) {
            models.push(preset(token).expect("preset ids resolve"));
            continue;
        }
        let path = Path::new(token);
        if !path.exists() {
            return Err(CliError::Config(format!(
                "unknown model {token:?}: expected a preset ({}) or a path to a score-model JSON file",
                PRESET_MODEL_IDS.join(", ")
            )));
        }
        let text = fs::read_to_string(path)
            .map_err(|err| CliError::Config(format!("cannot read model file {token}: {err}")))?;
        let parsed: ModelFile = serde_json::from_str(&text)
            .map_err(|err| CliError::Config(format!("model file {token} is invalid: {err}")))?;
        match parsed {
            ModelFile::One(model) => models.push(model),
            ModelFile::Many(list) => models.extend(list),
        }
    }
    if let Some(policy) = policy_override {
        for model in &mut models {
            model.zero_denominator_policy = policy;
        }
    }
    let mut seen = BTreeSet::new();
    for model in &models {
        model.validate().map_err(CliError::from)?;
        if !seen.insert(model.model_id.clone()) {
            return Err(CliError::Config(format!(
                "model id {:?} selected more than once",
                model.model_id
            )));
        }
    }
    Ok(models)
}
