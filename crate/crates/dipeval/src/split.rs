//! Train/test split protocols for the two experiment scenarios.
//!
//! S1 stratifies by creditor: each creditor's documents are shuffled and
//! split at the train fraction, so both sides see the same creditors. S2 is
//! creditor-disjoint: whole creditors go to one side or the other, modeling
//! inference on unknown vendors.
//!
//! Shuffling uses ChaCha20 seeded from the spec's 64-bit seed, so splits
//! reproduce across platforms.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub scenario: Scenario,
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(scenario: Scenario, train_fraction: f64, seed: u64) -> Result<Self, Error> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::BadTrainFraction(train_fraction));
        }
        Ok(Self {
            scenario,
            train_fraction,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitResult {
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl SplitResult {
    pub fn achieved_fraction(&self) -> f64 {
        let total = self.train_ids.len() + self.test_ids.len();
        if total == 0 {
            0.0
        } else {
            self.train_ids.len() as f64 / total as f64
        }
    }
}

/// Creditor ids in first-appearance order with their document ids.
fn by_creditor(corpus: &Corpus) -> Vec<(String, Vec<String>)> {
    let mut order: Vec<(String, Vec<String>)> = Vec::new();
    for doc in &corpus.documents {
        match order.iter_mut().find(|(c, _)| *c == doc.creditor_id) {
            Some((_, docs)) => docs.push(doc.doc_id.clone()),
            None => order.push((doc.creditor_id.clone(), vec![doc.doc_id.clone()])),
        }
    }
    order
}

/// Train size for a creditor with `k` documents under S1: round-half-up of
/// the fraction, clamped so both sides stay non-empty; singletons go to train.
pub fn s1_train_count(k: usize, train_fraction: f64) -> usize {
    if k < 2 {
        return k;
    }
    let rounded = (train_fraction * k as f64).round() as usize;
    rounded.clamp(1, k - 1)
}

pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<SplitResult, Error> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::BadTrainFraction(spec.train_fraction));
    }
    if corpus.documents.len() < 2 {
        return Err(Error::CorpusTooSmall);
    }
    let groups = by_creditor(corpus);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);

    match spec.scenario {
        Scenario::S1 => {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (_, mut docs) in groups {
                docs.shuffle(&mut rng);
                let n_train = s1_train_count(docs.len(), spec.train_fraction);
                for (i, id) in docs.into_iter().enumerate() {
                    if i < n_train {
                        train.push(id);
                    } else {
                        test.push(id);
                    }
                }
            }
            Ok(SplitResult {
                train_ids: train,
                test_ids: test,
            })
        }
        Scenario::S2 => {
            if groups.len() < 2 {
                return Err(Error::SingleCreditor);
            }
            let total = corpus.documents.len();
            let target = spec.train_fraction * total as f64;
            let mut shuffled = groups;
            shuffled.shuffle(&mut rng);
            let mut train = Vec::new();
            let mut test = Vec::new();
            let mut train_done = false;
            for (_, docs) in shuffled {
                if train_done {
                    test.extend(docs);
                } else {
                    train.extend(docs);
                    if train.len() as f64 >= target {
                        train_done = true;
                    }
                }
            }
            Ok(SplitResult {
                train_ids: train,
                test_ids: test,
            })
        }
    }
}

/// Creditor ids that occur on both sides of a split; empty for a valid S2 run.
pub fn creditor_overlap(corpus: &Corpus, result: &SplitResult) -> Vec<String> {
    let creditor_of = |id: &String| {
        corpus
            .document(id)
            .map(|d| d.creditor_id.clone())
            .unwrap_or_default()
    };
    let train: HashSet<String> = result.train_ids.iter().map(creditor_of).collect();
    let test: HashSet<String> = result.test_ids.iter().map(creditor_of).collect();
    let mut overlap: Vec<String> = train.intersection(&test).cloned().collect();
    overlap.sort();
    overlap
}
