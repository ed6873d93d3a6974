use wikiverify::ranking::rank_articles;
use wikiverify::scoring::{score_profile, ArticleScore};

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;

use super::profiles;

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let profiles = profiles::load_profiles(&settings.annotated_path())?;
    for model in &settings.models {
        let scores: Vec<ArticleScore> = profiles
            .iter()
            .map(|profile| score_profile(profile, model))
            .collect();
        let ranking = rank_articles(&scores)?;

        let stem = output::file_stem_for(&model.model_id);
        let path = output::prepare(&settings.output_dir, &format!("ranking_{stem}.csv"))?;
        let mut writer = output::csv_writer(&path)?;
        writer
            .write_record(["rank", "title", "score", "tie_group"])
            .map_err(|err| output::csv_err(&path, err))?;
        for entry in &ranking.entries {
            writer
                .write_record([
                    entry.rank.to_string(),
                    entry.title.clone(),
                    output::fmt_f64(entry.score),
                    entry.tie_group_id.to_string(),
                ])
                .map_err(|err| output::csv_err(&path, err))?;
        }
        output::finish_csv(writer, &path)?;

        println!("rank: model {} -> {}", model.model_id, path.display());
        let preview: Vec<Vec<String>> = ranking
            .entries
            .iter()
            .take(10)
            .map(|entry| {
                vec![
                    entry.rank.to_string(),
                    entry.title.clone(),
                    format!("{:.2}", entry.score),
                ]
            })
            .collect();
        output::print_table(&["rank", "title", "score"], &preview);
    }
    Ok(())
}
