//! The two transfer strategies and the random baseline as end-to-end runs.

mod baseline;
mod projection;
mod transfer;

pub use baseline::{random_baseline, BaselinePrior};
pub use projection::{annotation_projection, ProjectionConfig, ProjectionCounts, ProjectionRun};
pub use transfer::{
    direct_transfer, pivoted_transfer, Af24Resources, PivotRun, TransferConfig, TransferRun,
    DEFAULT_OVERLAP_FLOOR,
};

use crate::align::VectorSpace;
use crate::corpus::{Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport, ReportMeta};
use crate::lexicon::{EmotionLexicon, TieBreakStats};
use crate::model::{predict, train, ClassifierParams, Dataset, Featurizer, ModelConfig, Prediction, TrainConfig, TrainReport};
use crate::num::Scalar;

/// Default confidence a projected label must reach.
pub const DEFAULT_THRESHOLD: f64 = 0.9;

pub(crate) fn featurizer<'a, T: Scalar>(
    cfg: &ModelConfig,
    space: &'a VectorSpace<T>,
    lexicon: Option<(&'a EmotionLexicon, &'a TieBreakStats)>,
) -> Result<Featurizer<'a, T>> {
    if space.dim() != cfg.input_dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.input_dim,
            found: space.dim(),
        });
    }
    let f = Featurizer::new(cfg.mode, space);
    Ok(match lexicon {
        Some((lex, stats)) if cfg.use_af24 => f.with_lexicon(lex, stats),
        _ => f,
    })
}

/// Initializes and trains a classifier on `corpus`.
pub(crate) fn fit<T: Scalar>(
    corpus: &LabeledCorpus,
    featurizer: &Featurizer<'_, T>,
    model: &ModelConfig,
    train_cfg: &TrainConfig,
) -> Result<(ClassifierParams<T>, TrainReport)> {
    if corpus.label_set() != &model.labels {
        return Err(Error::InvalidArgument(format!(
            "corpus labels `{}` differ from model labels `{}`",
            corpus.label_set(),
            model.labels
        )));
    }
    let data = Dataset::from_corpus(corpus, featurizer)?;
    let init = ClassifierParams::init(model.clone(), train_cfg.seed)?;
    train(&data, init, train_cfg)
}

/// Classifies documents in order.
pub fn predict_documents<T: Scalar>(
    params: &ClassifierParams<T>,
    docs: &[Document],
    featurizer: &Featurizer<'_, T>,
) -> Result<Vec<Prediction>> {
    let inputs = docs.iter().map(|d| featurizer.encode(d)).collect::<Result<Vec<_>>>()?;
    predict(params, &inputs)
}

/// Scores predictions against a corpus' gold labels.
pub fn evaluate_predictions(corpus: &LabeledCorpus, predictions: &[Prediction], meta: ReportMeta) -> Result<EvalReport> {
    let gold: Vec<_> = corpus.documents().iter().filter_map(|d| d.gold_label).collect();
    let pred: Vec<_> = predictions.iter().map(|p| p.label).collect();
    evaluate(&gold, &pred, corpus.label_set(), meta)
}
