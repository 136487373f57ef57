#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::io::parse_prediction_line;
use dipeval::model::{resolve_labels, LabelSet, Prediction};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = parse_prediction_line(line) {
        if let Prediction::Scores { scores } = &rec.prediction {
            // arbitrary score matrices must resolve or error, never panic
            let ls = LabelSet::default_receipt_labels();
            if let Ok(labels) = resolve_labels(scores, &ls) {
                assert_eq!(labels.len(), scores.len());
            }
        }
    }
});
