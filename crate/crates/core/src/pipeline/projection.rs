use serde::{Deserialize, Serialize};

use super::{featurizer, fit, predict_documents, DEFAULT_THRESHOLD};
use crate::align::VectorSpace;
use crate::corpus::{confidence_filter, Document, LabeledCorpus, ParallelCorpus};
use crate::error::{Error, Result};
use crate::model::{ClassifierParams, EncodingMode, ModelConfig, TrainConfig, TrainReport};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionConfig {
    /// Source classifier; `input_dim` must match the source space.
    pub source_model: ModelConfig,
    /// Target classifier; `input_dim` must match the target space.
    pub target_model: ModelConfig,
    pub train: TrainConfig,
    pub threshold: f64,
}

impl ProjectionConfig {
    pub fn new(source_model: ModelConfig, target_model: ModelConfig, train: TrainConfig) -> Self {
        ProjectionConfig {
            source_model,
            target_model,
            train,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Document counts through the projection steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionCounts {
    pub source_train: usize,
    pub parallel_pairs: usize,
    pub kept: usize,
    pub dropped: usize,
    /// Projected label counts in label-set order.
    pub projected_labels: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ProjectionRun<T: Scalar> {
    pub source_params: ClassifierParams<T>,
    pub source_report: TrainReport,
    /// Source side of every pair with the source classifier's probabilities.
    pub labeled_source: Vec<Document>,
    /// Target side of the pairs that passed the threshold, labeled.
    pub projected: LabeledCorpus,
    pub target_params: ClassifierParams<T>,
    pub target_report: TrainReport,
    pub counts: ProjectionCounts,
    pub threshold: f64,
}

fn pair_document(id: String, language: &str, tokens: &[String]) -> Document {
    Document {
        id,
        language: language.to_string(),
        raw_text: tokens.join(" "),
        tokens: tokens.to_vec(),
        gold_label: None,
        soft_probs: None,
        genre: None,
    }
}

/// Trains a source classifier, labels the source side of `parallel`, copies
/// confident labels to the target side and trains a target classifier on
/// them.
pub fn annotation_projection<T: Scalar>(
    source_train: &LabeledCorpus,
    source_space: &VectorSpace<T>,
    parallel: &ParallelCorpus,
    target_space: &VectorSpace<T>,
    cfg: &ProjectionConfig,
) -> Result<ProjectionRun<T>> {
    if source_train.language() != parallel.source_language() {
        return Err(Error::InvalidArgument(format!(
            "training corpus is `{}` but the bitext source side is `{}`",
            source_train.language(),
            parallel.source_language()
        )));
    }
    for m in [&cfg.source_model, &cfg.target_model] {
        if m.mode == EncodingMode::PrecomputedVectors || m.use_af24 {
            return Err(Error::InvalidArgument(
                "projection trains on token embeddings without lexicon features".into(),
            ));
        }
    }
    if parallel.is_empty() {
        return Err(Error::Empty("parallel corpus has no pairs".into()));
    }
    let labels = source_train.label_set().clone();

    let src_feat = featurizer(&cfg.source_model, source_space, None)?;
    let (source_params, source_report) = fit(source_train, &src_feat, &cfg.source_model, &cfg.train)?;
    log::info!("source classifier trained for {} epochs", source_report.epochs());

    let src_docs: Vec<Document> = parallel
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| pair_document(format!("pair-{}", i + 1), parallel.source_language(), &p.source))
        .collect();
    let preds = predict_documents(&source_params, &src_docs, &src_feat)?;
    let labeled_source: Vec<Document> = src_docs
        .into_iter()
        .zip(&preds)
        .map(|(d, p)| d.with_soft_probs(p.probs.clone()))
        .collect();

    let tgt_docs: Vec<Document> = parallel
        .pairs()
        .iter()
        .zip(&labeled_source)
        .map(|(p, s)| {
            pair_document(s.id.clone(), parallel.target_language(), &p.target).with_soft_probs(s.soft_probs.clone().unwrap())
        })
        .collect();
    let projected = confidence_filter(&tgt_docs, parallel.target_language(), &labels, cfg.threshold)?;
    if projected.is_empty() {
        return Err(Error::Empty(format!(
            "no projected sentence reaches confidence threshold {}",
            cfg.threshold
        )));
    }
    let counts = ProjectionCounts {
        source_train: source_train.len(),
        parallel_pairs: parallel.len(),
        kept: projected.len(),
        dropped: parallel.len() - projected.len(),
        projected_labels: projected.counts().to_vec(),
    };
    log::info!("projected {} of {} pairs", counts.kept, counts.parallel_pairs);

    let tgt_feat = featurizer(&cfg.target_model, target_space, None)?;
    let (target_params, target_report) = fit(&projected, &tgt_feat, &cfg.target_model, &cfg.train)?;
    Ok(ProjectionRun {
        source_params,
        source_report,
        labeled_source,
        projected,
        target_params,
        target_report,
        counts,
        threshold: cfg.threshold,
    })
}
