#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::io::{parse_corpus_spec, parse_noise_spec};
use dipeval::sim::generate_corpus;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mut spec) = parse_corpus_spec(text) {
        // cap sizes so the fuzzer probes validation, not throughput
        spec.num_documents = spec.num_documents.min(4);
        spec.tokens_per_doc.0 = spec.tokens_per_doc.0.min(64);
        spec.tokens_per_doc.1 = spec.tokens_per_doc.1.min(64);
        if spec.labeled_tokens_per_doc.values().sum::<usize>() <= 64 {
            let _ = generate_corpus(&spec);
        }
    }
    let _ = parse_noise_spec(text);
});
