//! Synthetic corpus generation and controlled prediction noise.
//!
//! The simulator exists to make the F1-vs-DIP divergence visible without a
//! trained model: token errors are injected independently at a per-class
//! rate, so per-class F1 degrades linearly in epsilon while DIP collapses
//! as the product of per-token survival probabilities.
//!
//! Generation is deterministic: each document draws from its own RNG seeded
//! by `mix(seed, doc_index)`, so documents can be produced in any order or
//! in parallel with identical results.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{
    BoundingBox, Corpus, Document, LabelClass, LabelSet, PredictionSet, Token, NONE_CLASS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub num_documents: usize,
    pub num_creditors: usize,
    /// Inclusive token-count range per document.
    pub tokens_per_doc: (usize, usize),
    /// Labeled tokens per document, per class. Classes absent from the map
    /// get no labeled tokens.
    pub labeled_tokens_per_doc: BTreeMap<String, usize>,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        let labeled = LabelSet::default_receipt_labels()
            .business_classes()
            .map(|c| (c.to_string(), 1))
            .collect();
        Self {
            num_documents: 100,
            num_creditors: 10,
            tokens_per_doc: (12, 18),
            labeled_tokens_per_doc: labeled,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfusionTarget {
    /// Wrong label drawn uniformly from every other class, background included.
    Uniform,
    /// Business tokens degrade to the background class (missed detections).
    ToNone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub per_class_error_rate: BTreeMap<String, f64>,
    pub confusion_target: ConfusionTarget,
    pub seed: u64,
}

impl NoiseSpec {
    /// Same error rate for every business class; the background class stays clean.
    pub fn uniform(label_set: &LabelSet, epsilon: f64, seed: u64) -> Self {
        Self {
            per_class_error_rate: label_set
                .business_classes()
                .map(|c| (c.to_string(), epsilon))
                .collect(),
            confusion_target: ConfusionTarget::Uniform,
            seed,
        }
    }
}

// splitmix64 finalizer; decouples per-document streams from one base seed
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_set_for(spec: &CorpusSpec) -> LabelSet {
    let defaults = LabelSet::default_receipt_labels();
    let mut classes = vec![LabelClass {
        name: NONE_CLASS.to_string(),
        exact_match_required: false,
    }];
    for name in spec.labeled_tokens_per_doc.keys() {
        let exact = defaults.get(name).map_or(false, |c| c.exact_match_required);
        classes.push(LabelClass {
            name: name.clone(),
            exact_match_required: exact,
        });
    }
    LabelSet { classes }
}

fn random_word(rng: &mut ChaCha20Rng) -> String {
    let len = rng.gen_range(3..=9);
    (0..len)
        .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
        .collect()
}

/// Deterministic synthetic corpus: round-robin creditors, one bbox row per
/// token top to bottom, labeled tokens placed at random distinct positions.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus, Error> {
    if spec.num_documents == 0 {
        return Err(Error::InfeasibleSpec("num_documents must be ≥ 1".into()));
    }
    if spec.num_creditors == 0 {
        return Err(Error::InfeasibleSpec("num_creditors must be ≥ 1".into()));
    }
    let (min_tokens, max_tokens) = spec.tokens_per_doc;
    if min_tokens == 0 || min_tokens > max_tokens {
        return Err(Error::InfeasibleSpec(format!(
            "bad tokens_per_doc range ({min_tokens}, {max_tokens})"
        )));
    }
    if spec.labeled_tokens_per_doc.contains_key(NONE_CLASS) {
        return Err(Error::InfeasibleSpec(format!(
            "labeled_tokens_per_doc must not include the {NONE_CLASS} class"
        )));
    }
    let total_labeled: usize = spec.labeled_tokens_per_doc.values().sum();
    if total_labeled > min_tokens {
        return Err(Error::InfeasibleSpec(format!(
            "{total_labeled} labeled tokens do not fit in documents of {min_tokens} tokens"
        )));
    }

    let label_set = label_set_for(spec);
    let mut documents = Vec::with_capacity(spec.num_documents);
    for i in 0..spec.num_documents {
        let mut rng = ChaCha20Rng::seed_from_u64(mix(spec.seed, i as u64));
        let n = rng.gen_range(min_tokens..=max_tokens);

        let mut positions: Vec<usize> = (0..n).collect();
        positions.shuffle(&mut rng);
        let mut gt: Vec<String> = vec![NONE_CLASS.to_string(); n];
        let mut next = 0;
        for (class, count) in &spec.labeled_tokens_per_doc {
            for _ in 0..*count {
                gt[positions[next]] = class.clone();
                next += 1;
            }
        }

        let tokens = (0..n)
            .map(|t| {
                let text = random_word(&mut rng);
                let width = 10.0 * text.len() as f64;
                Token {
                    text,
                    bbox: BoundingBox::new(10.0, 20.0 * t as f64, 10.0 + width, 20.0 * t as f64 + 15.0),
                    gt_label: Some(gt[t].clone()),
                }
            })
            .collect();
        documents.push(Document {
            doc_id: format!("doc{i:06}"),
            creditor_id: format!("creditor{:03}", i % spec.num_creditors),
            tokens,
        });
    }
    Ok(Corpus {
        documents,
        label_set,
    })
}

/// Starts from the ground truth and flips each token of class `k` with
/// probability `ε_k` to a wrong label chosen per the confusion target.
pub fn perturb(corpus: &Corpus, noise: &NoiseSpec) -> Result<PredictionSet, Error> {
    for (class, eps) in &noise.per_class_error_rate {
        if !(0.0..=1.0).contains(eps) || eps.is_nan() {
            return Err(Error::BadNoiseRate(*eps));
        }
        let _ = class;
    }
    let class_names: Vec<&str> = corpus
        .label_set
        .classes
        .iter()
        .map(|c| c.name.as_str())
        .collect();

    let mut preds = PredictionSet::default();
    for (i, doc) in corpus.documents.iter().enumerate() {
        let mut rng = ChaCha20Rng::seed_from_u64(mix(noise.seed, i as u64));
        let mut labels = Vec::with_capacity(doc.tokens.len());
        for tok in &doc.tokens {
            let gt = tok.gt_label.as_deref().unwrap_or(NONE_CLASS);
            let eps = noise.per_class_error_rate.get(gt).copied().unwrap_or(0.0);
            let flip = eps > 0.0 && rng.gen::<f64>() < eps;
            let label = if !flip {
                gt.to_string()
            } else {
                match noise.confusion_target {
                    ConfusionTarget::ToNone if gt != NONE_CLASS => NONE_CLASS.to_string(),
                    _ => {
                        let others: Vec<&str> = class_names
                            .iter()
                            .copied()
                            .filter(|c| *c != gt)
                            .filter(|c| {
                                noise.confusion_target == ConfusionTarget::Uniform
                                    || *c != NONE_CLASS
                            })
                            .collect();
                        others[rng.gen_range(0..others.len())].to_string()
                    }
                }
            };
            labels.push(label);
        }
        preds.insert_labels(doc.doc_id.clone(), labels);
    }
    Ok(preds)
}

/// Closed-form DIP expectation under independent token errors:
/// the product over classes of `(1 − ε_k)^count_k`.
pub fn expected_dip(
    per_class_error_rate: &BTreeMap<String, f64>,
    labeled_tokens_per_doc: &BTreeMap<String, usize>,
) -> f64 {
    labeled_tokens_per_doc
        .iter()
        .map(|(class, count)| {
            let eps = per_class_error_rate.get(class).copied().unwrap_or(0.0);
            (1.0 - eps).powi(*count as i32)
        })
        .product()
}

/// One row of the epsilon sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub avg_f1: f64,
    pub dip: f64,
    pub expected_dip: f64,
}

/// Evaluates the generated corpus under uniform noise for each epsilon.
pub fn sweep(
    spec: &CorpusSpec,
    epsilons: &[f64],
    scope: crate::metrics::DipScope,
) -> Result<Vec<SweepRow>, Error> {
    let corpus = generate_corpus(spec)?;
    let mut rows = Vec::with_capacity(epsilons.len());
    for (i, &eps) in epsilons.iter().enumerate() {
        let noise = NoiseSpec::uniform(&corpus.label_set, eps, mix(spec.seed, 0x5eed ^ i as u64));
        let preds = perturb(&corpus, &noise)?;
        let report = crate::metrics::evaluate(&corpus, &preds, scope)?;
        rows.push(SweepRow {
            epsilon: eps,
            avg_f1: report.macro_f1,
            dip: report.dip,
            expected_dip: expected_dip(&noise.per_class_error_rate, &spec.labeled_tokens_per_doc),
        });
    }
    Ok(rows)
}
