//! Shared test fixtures and independent oracles.
//!
//! Everything here re-derives expected values from first principles so the
//! production code paths are checked against a second route: a full DP
//! table for edit distance, a set-materializing DIP, and exact rational
//! arithmetic for the count-based metrics.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use dipeval::metrics::DipScope;
use dipeval::model::{
    BoundingBox, Corpus, Document, LabelClass, LabelSet, PredictionSet, Token, NONE_CLASS,
};

/// Full (n+1)×(m+1) DP table Levenshtein, kept deliberately naive.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        table[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = (table[i - 1][j] + 1)
                .min(table[i][j - 1] + 1)
                .min(table[i - 1][j - 1] + cost);
        }
    }
    table[n][m]
}

/// Set formulation of DIP: materializes the set of completely correct
/// documents and divides by the document count.
pub fn dip_oracle(corpus: &Corpus, preds: &PredictionSet, scope: DipScope) -> f64 {
    let mut correct: HashSet<&str> = HashSet::new();
    for doc in &corpus.documents {
        let predicted = preds.labels_for(doc, &corpus.label_set).unwrap();
        let all_ok = doc.tokens.iter().zip(&predicted).all(|(tok, pred)| {
            let gt = tok.gt_label.as_deref().unwrap_or(NONE_CLASS);
            let scoped = match scope {
                DipScope::AllTokens => true,
                DipScope::NonNoneOnly => gt != NONE_CLASS,
            };
            !scoped || pred == gt
        });
        if all_ok {
            correct.insert(doc.doc_id.as_str());
        }
    }
    correct.len() as f64 / corpus.documents.len() as f64
}

/// Exact non-negative rational, reduced on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: u128,
    pub den: u128,
}

impl Frac {
    pub fn new(num: u128, den: u128) -> Self {
        if den == 0 || num == 0 {
            // zero-denominator convention: the metric is 0
            return Self { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn label_set(n_classes: usize) -> LabelSet {
    let mut classes = vec![LabelClass {
        name: NONE_CLASS.to_string(),
        exact_match_required: false,
    }];
    for i in 1..n_classes {
        classes.push(LabelClass {
            name: format!("class{i}"),
            exact_match_required: false,
        });
    }
    LabelSet::new(classes).unwrap()
}

pub fn bbox_row(i: usize) -> BoundingBox {
    BoundingBox::new(5.0, 20.0 * i as f64, 60.0, 20.0 * i as f64 + 15.0)
}

/// Random annotated corpus with random predictions, for oracle comparisons.
pub fn random_corpus_with_preds(
    rng: &mut ChaCha20Rng,
    max_docs: usize,
    max_tokens: usize,
    max_classes: usize,
) -> (Corpus, PredictionSet) {
    let n_classes = rng.gen_range(2..=max_classes);
    let ls = label_set(n_classes);
    let names: Vec<String> = ls.classes.iter().map(|c| c.name.clone()).collect();
    let n_docs = rng.gen_range(1..=max_docs);
    let mut documents = Vec::with_capacity(n_docs);
    let mut preds = PredictionSet::default();
    for d in 0..n_docs {
        let n_tokens = rng.gen_range(1..=max_tokens);
        let tokens: Vec<Token> = (0..n_tokens)
            .map(|t| Token {
                text: format!("tok{t}"),
                bbox: bbox_row(t),
                gt_label: Some(names[rng.gen_range(0..names.len())].clone()),
            })
            .collect();
        let labels: Vec<String> = (0..n_tokens)
            .map(|t| {
                // bias toward correct so corpora are not uniformly wrong
                if rng.gen_bool(0.7) {
                    tokens[t].gt_label.clone().unwrap()
                } else {
                    names[rng.gen_range(0..names.len())].clone()
                }
            })
            .collect();
        let doc_id = format!("doc{d}");
        preds.insert_labels(doc_id.clone(), labels);
        documents.push(Document {
            doc_id,
            creditor_id: format!("cred{}", rng.gen_range(0..4)),
            tokens,
        });
    }
    (
        Corpus {
            documents,
            label_set: ls,
        },
        preds,
    )
}

pub fn random_ascii_string(rng: &mut ChaCha20Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| (b'a' + rng.gen_range(0..6u8)) as char) // small alphabet provokes collisions
        .collect()
}
