#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::io::parse_document_line;
use dipeval::model::{validate_corpus, Corpus, LabelSet};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_document_line(line) {
        // accepted input must survive a serialize/parse round trip
        let json = serde_json::to_string(&doc).unwrap();
        let back = parse_document_line(&json).unwrap();
        assert_eq!(back.doc_id, doc.doc_id);
        assert_eq!(back.tokens.len(), doc.tokens.len());
        // validation reports violations as data, never panics
        let corpus = Corpus {
            documents: vec![doc],
            label_set: LabelSet::default_receipt_labels(),
        };
        let _ = validate_corpus(&corpus);
    }
});
