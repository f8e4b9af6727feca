//! Emotion corpora and parallel corpora: ingestion, distant labeling,
//! confidence filtering and merging.

mod distant;
mod filter;
mod io;
mod parallel;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{EmotionLabel, LabelSet};

pub use distant::{distant_label, CueMap, DistantLabelConfig, DistantLabelReport};
pub use filter::{confidence_filter, merge_corpora};
pub use io::{load_documents, load_labeled_corpus, save_documents, CorpusFormat};
pub use parallel::{load_parallel_corpus, ParallelCorpus, SentencePair};
pub use tokenize::{normalize_word, tokenize};

/// Tolerance on the sum of a soft-label distribution.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    News,
    Blog,
    Tweet,
    Mixed,
}

impl Genre {
    pub fn as_str(self) -> &'static str {
        match self {
            Genre::News => "news",
            Genre::Blog => "blog",
            Genre::Tweet => "tweet",
            Genre::Mixed => "mixed",
        }
    }
}

impl FromStr for Genre {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "news" => Ok(Genre::News),
            "blog" => Ok(Genre::Blog),
            "tweet" => Ok(Genre::Tweet),
            "mixed" => Ok(Genre::Mixed),
            other => Err(Error::InvalidArgument(format!("unknown genre `{other}`"))),
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single text with its tokens and optional labels.
///
/// `soft_probs`, when present, is indexed by the label set of the corpus the
/// document belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub language: String,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub gold_label: Option<EmotionLabel>,
    pub soft_probs: Option<Vec<f64>>,
    pub genre: Option<Genre>,
}

impl Document {
    /// Builds an unlabeled document, tokenizing `raw_text`.
    pub fn new(id: impl Into<String>, language: &str, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        Document {
            id: id.into(),
            language: language.to_lowercase(),
            tokens: tokenize(&raw_text),
            raw_text,
            gold_label: None,
            soft_probs: None,
            genre: None,
        }
    }

    pub fn with_label(mut self, label: EmotionLabel) -> Self {
        self.gold_label = Some(label);
        self
    }

    pub fn with_genre(mut self, genre: Genre) -> Self {
        self.genre = Some(genre);
        self
    }

    pub fn with_soft_probs(mut self, probs: Vec<f64>) -> Self {
        self.soft_probs = Some(probs);
        self
    }
}

pub(crate) fn check_probs(probs: &[f64], expected_len: usize) -> std::result::Result<(), String> {
    if probs.len() != expected_len {
        return Err(format!(
            "probability vector has {} entries, label set has {expected_len}",
            probs.len()
        ));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err("probabilities must lie in [0, 1]".into());
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(format!("probabilities sum to {sum}, expected 1"));
    }
    Ok(())
}

/// Documents that all carry a gold label from the active set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    language: String,
    label_set: LabelSet,
    documents: Vec<Document>,
    counts: Vec<usize>,
}

impl LabeledCorpus {
    pub fn new(language: &str, label_set: LabelSet, documents: Vec<Document>) -> Result<Self> {
        let mut counts = vec![0; label_set.len()];
        for doc in &documents {
            let label = doc.gold_label.ok_or_else(|| {
                Error::InvalidArgument(format!("document `{}` has no gold label", doc.id))
            })?;
            counts[label_set.require(label)?] += 1;
            if let Some(p) = &doc.soft_probs {
                check_probs(p, label_set.len())
                    .map_err(|m| Error::InvalidArgument(format!("document `{}`: {m}", doc.id)))?;
            }
        }
        Ok(LabeledCorpus {
            language: language.to_lowercase(),
            label_set,
            documents,
            counts,
        })
    }

    pub fn empty(language: &str, label_set: LabelSet) -> Self {
        let counts = vec![0; label_set.len()];
        LabeledCorpus {
            language: language.to_lowercase(),
            label_set,
            documents: Vec::new(),
            counts,
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn label_set(&self) -> &LabelSet {
        &self.label_set
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Per-label counts in label-set order.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, label: EmotionLabel) -> usize {
        self.label_set.position(label).map_or(0, |i| self.counts[i])
    }

    /// Gold labels as label-set indices.
    pub fn gold_indices(&self) -> Vec<usize> {
        self.documents
            .iter()
            .map(|d| self.label_set.position(d.gold_label.unwrap()).unwrap())
            .collect()
    }

    /// Empirical label distribution; all zeros for an empty corpus.
    pub fn prior(&self) -> Vec<f64> {
        let n = self.len();
        self.counts
            .iter()
            .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect()
    }
}
