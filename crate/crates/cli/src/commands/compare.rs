use std::fs;

use wikiverify::ranking::{
    compare, rank_articles, scatter_data, scatter_svg, top_movers, DeltaRow, Ranking,
};
use wikiverify::scoring::{score_profile, ArticleScore};

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;

use super::profiles;

pub fn run(settings: &Settings) -> Result<(), CliError> {
    if settings.models.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two models; pass --models with the baseline first".into(),
        ));
    }
    let profiles = profiles::load_profiles(&settings.annotated_path())?;
    let rankings: Vec<Ranking> = settings
        .models
        .iter()
        .map(|model| {
            let scores: Vec<ArticleScore> = profiles
                .iter()
                .map(|profile| score_profile(profile, model))
                .collect();
            rank_articles(&scores).map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;

    let base = &rankings[0];
    for other in &rankings[1..] {
        let comparison = compare(base, other)?;
        let movers = top_movers(&comparison, settings.movers);
        let base_stem = output::file_stem_for(&comparison.base_model_id);
        let other_stem = output::file_stem_for(&comparison.other_model_id);

        let movers_path = output::prepare(
            &settings.output_dir,
            &format!("movers_{base_stem}_vs_{other_stem}.csv"),
        )?;
        let mut writer = output::csv_writer(&movers_path)?;
        writer
            .write_record(["title", "rank_base", "rank_other", "delta"])
            .map_err(|err| output::csv_err(&movers_path, err))?;
        for row in movers.top_gainers.iter().chain(movers.top_losers.iter()) {
            writer
                .write_record([
                    row.title.clone(),
                    row.rank_base.to_string(),
                    row.rank_other.to_string(),
                    row.delta.to_string(),
                ])
                .map_err(|err| output::csv_err(&movers_path, err))?;
        }
        output::finish_csv(writer, &movers_path)?;

        let scatter_path = output::prepare(
            &settings.output_dir,
            &format!("scatter_{base_stem}_vs_{other_stem}.csv"),
        )?;
        let mut writer = output::csv_writer(&scatter_path)?;
        writer
            .write_record(["rank_base", "rank_other", "title"])
            .map_err(|err| output::csv_err(&scatter_path, err))?;
        for (rank_base, rank_other, title) in scatter_data(&comparison) {
            writer
                .write_record([rank_base.to_string(), rank_other.to_string(), title])
                .map_err(|err| output::csv_err(&scatter_path, err))?;
        }
        output::finish_csv(writer, &scatter_path)?;

        let svg_path = output::prepare(
            &settings.output_dir,
            &format!("scatter_{base_stem}_vs_{other_stem}.svg"),
        )?;
        fs::write(&svg_path, scatter_svg(&comparison))
            .map_err(|err| output::io_err(&svg_path, err))?;

        println!(
            "compare: {} vs {} -> {}, {}, {}",
            comparison.base_model_id,
            comparison.other_model_id,
            movers_path.display(),
            scatter_path.display(),
            svg_path.display()
        );
        println!("top gainers:");
        output::print_table(&MOVER_HEADER, &mover_rows(&movers.top_gainers));
        println!("top losers:");
        output::print_table(&MOVER_HEADER, &mover_rows(&movers.top_losers));
    }
    Ok(())
}

const MOVER_HEADER: [&str; 4] = ["title", "rank_base", "rank_other", "delta"];

fn mover_rows(rows: &[DeltaRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| {
            vec![
                row.title.clone(),
                row.rank_base.to_string(),
                row.rank_other.to_string(),
                row.delta.to_string(),
            ]
        })
        .collect()
}
