//! Score-model files come from users: arbitrary JSON must either produce
//! a model that validation accepts or rejects, with no panics anywhere.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::scoring::ScoreModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = serde_json::from_slice::<ScoreModel>(data) {
        let _ = model.validate();
    }
});
