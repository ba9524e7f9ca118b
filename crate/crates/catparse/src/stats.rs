//! Transition statistics.
//!
//! A model counts which transition outcomes (rule plus list split) were
//! taken in which conditioning contexts on the accepting paths of a
//! training corpus. Contexts generalize over states by keeping only the
//! word's category and the first expected argument; the rest of the
//! expected list is dropped. When a sentence has several accepting paths,
//! each path contributes fractionally so every sentence adds one unit of
//! mass per token.
//!
//! Scores are add-k smoothed log probabilities with backoff to the
//! outcome marginal, so unseen contexts still rank outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::category::Atom;
use crate::engine::{parse, ParseOptions, ScoredState, Strategy};
use crate::lexicon::Lexicon;
use crate::rules::{ConditioningContext, TransitionOutcome};

pub const DEFAULT_SMOOTHING: f64 = 1.0;

/// Count tables keyed by the canonical context and outcome renderings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    pub k: f64,
    pub contexts: BTreeMap<String, BTreeMap<String, f64>>,
    pub backoff: BTreeMap<String, f64>,
}

impl TransitionModel {
    pub fn new(k: f64) -> TransitionModel {
        TransitionModel {
            k,
            contexts: BTreeMap::new(),
            backoff: BTreeMap::new(),
        }
    }

    fn add(&mut self, context: &ConditioningContext, outcome: &TransitionOutcome, weight: f64) {
        *self
            .contexts
            .entry(context.key())
            .or_default()
            .entry(outcome.key())
            .or_insert(0.0) += weight;
        *self.backoff.entry(outcome.key()).or_insert(0.0) += weight;
    }

    /// The outcome vocabulary: every outcome observed in training.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.backoff.keys().map(String::as_str)
    }

    /// Backoff probability of an outcome key: its marginal count with an
    /// add-k floor, normalized over the vocabulary.
    fn backoff_prob(&self, outcome_key: &str) -> f64 {
        let total: f64 = self.backoff.values().sum();
        let vocab = self.backoff.len() as f64;
        let count = self.backoff.get(outcome_key).copied().unwrap_or(0.0);
        if total + self.k * vocab == 0.0 {
            return 0.0;
        }
        (count + self.k) / (total + self.k * vocab)
    }

    /// Log probability of taking `outcome` in `context`:
    /// `log((c(context,outcome) + k·b(outcome)) / (total(context) + k))`,
    /// where `b` is the backoff distribution. An unseen context scores by
    /// backoff alone.
    pub fn score(&self, context: &ConditioningContext, outcome: &TransitionOutcome) -> f64 {
        self.score_keys(&context.key(), &outcome.key())
    }

    pub fn score_keys(&self, context_key: &str, outcome_key: &str) -> f64 {
        let row = self.contexts.get(context_key);
        let count = row
            .and_then(|r| r.get(outcome_key))
            .copied()
            .unwrap_or(0.0);
        let total: f64 = row.map(|r| r.values().sum()).unwrap_or(0.0);
        ((count + self.k * self.backoff_prob(outcome_key)) / (total + self.k)).ln()
    }

    /// Smoothed probability mass of the whole vocabulary in one context;
    /// 1.0 up to rounding for any trained model.
    pub fn context_mass(&self, context_key: &str) -> f64 {
        self.vocabulary()
            .map(|o| self.score_keys(context_key, o).exp())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<TransitionModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Ranks scored states by descending cumulative score. The sort is stable,
/// so ties keep the deterministic successor order; under a uniform model
/// the order is unchanged.
pub fn rank(states: &mut [ScoredState]) {
    states.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("no sentence in the corpus parsed; the model is empty")]
    EmptyModel,
}

/// Result of training: the model plus one warning per skipped sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub model: TransitionModel,
    pub skipped: Vec<String>,
    pub sentences_used: usize,
}

/// Parses each sentence exhaustively and counts the transitions on every
/// accepting path, weighting each path by 1/(number of accepting paths for
/// its sentence). Sentences that fail to parse are skipped with a warning.
pub fn train(
    corpus: &[Vec<String>],
    lexicon: &Lexicon,
    goal: &Atom,
    k: f64,
) -> Result<TrainOutcome, TrainError> {
    let mut model = TransitionModel::new(k);
    let mut skipped = Vec::new();
    let mut used = 0;
    for (index, sentence) in corpus.iter().enumerate() {
        let tokens: Vec<&str> = sentence.iter().map(String::as_str).collect();
        let opts = ParseOptions {
            goal: goal.clone(),
            strategy: Strategy::Exhaustive,
            ..ParseOptions::default()
        };
        let outcome = match parse(&tokens, lexicon, &opts) {
            Ok(result) if !result.readings.is_empty() => result,
            Ok(_) => {
                skipped.push(format!(
                    "sentence {}: no reading for \"{}\"",
                    index + 1,
                    sentence.join(" ")
                ));
                continue;
            }
            Err(e) => {
                skipped.push(format!("sentence {}: {e}", index + 1));
                continue;
            }
        };
        let paths: Vec<_> = outcome
            .readings
            .iter()
            .flat_map(|r| r.paths.iter())
            .collect();
        let weight = 1.0 / paths.len() as f64;
        for path in paths {
            for record in path {
                model.add(&record.context, &record.outcome(), weight);
            }
        }
        used += 1;
    }
    if used == 0 {
        return Err(TrainError::EmptyModel);
    }
    Ok(TrainOutcome {
        model,
        skipped,
        sentences_used: used,
    })
}

/// Parses a corpus file: one whitespace-tokenized sentence per line,
/// blank lines skipped.
pub fn parse_corpus(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect()
}
