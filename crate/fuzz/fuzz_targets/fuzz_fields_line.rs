#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::align::{annotate_document, AnnotationOutcome, MatchPolicy};
use dipeval::io::parse_fields_line;
use dipeval::model::{BoundingBox, Document, Token};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = parse_fields_line(line) {
        if rec.fields.len() > 8 {
            return; // keep matching cheap on pathological inputs
        }
        let doc = Document {
            doc_id: rec.doc_id.clone(),
            creditor_id: "c".into(),
            tokens: vec![
                Token {
                    text: "Rechnung".into(),
                    bbox: BoundingBox::new(0.0, 0.0, 60.0, 15.0),
                    gt_label: None,
                },
                Token {
                    text: "40.00".into(),
                    bbox: BoundingBox::new(0.0, 20.0, 40.0, 35.0),
                    gt_label: None,
                },
            ],
        };
        // annotation over arbitrary field values must never panic, and an
        // annotated document carries a label on every token
        if let Ok(AnnotationOutcome::Annotated(annotated)) =
            annotate_document(&doc, &rec.fields, &MatchPolicy::default())
        {
            assert!(annotated.tokens.iter().all(|t| t.gt_label.is_some()));
        }
    }
});
