use wikiverify::scoring::score_profile;

use crate::error::CliError;
use crate::output;
use crate::settings::Settings;

use super::profiles;

const SCORE_HEADER: [&str; 10] = [
    "title",
    "model_id",
    "score",
    "p_isbn_valid",
    "p_gb_valid",
    "p_journal_doi",
    "p_book_identifier",
    "p_journal_oa",
    "p_gb_full",
    "p_gb_partial",
];

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let profiles = profiles::load_profiles(&settings.annotated_path())?;
    for model in &settings.models {
        let stem = output::file_stem_for(&model.model_id);
        let path = output::prepare(&settings.output_dir, &format!("scores_{stem}.csv"))?;
        let mut writer = output::csv_writer(&path)?;
        writer
            .write_record(SCORE_HEADER)
            .map_err(|err| output::csv_err(&path, err))?;
        for profile in &profiles {
            let scored = score_profile(profile, model);
            let mut record = vec![
                scored.title.clone(),
                scored.model_id.clone(),
                output::fmt_f64(scored.score),
            ];
            record.extend(
                scored
                    .proportions
                    .as_array()
                    .iter()
                    .map(|p| output::fmt_opt_f64(*p)),
            );
            writer
                .write_record(&record)
                .map_err(|err| output::csv_err(&path, err))?;
        }
        output::finish_csv(writer, &path)?;
        println!(
            "score: model {}: {} articles -> {}",
            model.model_id,
            profiles.len(),
            path.display()
        );
    }
    Ok(())
}
