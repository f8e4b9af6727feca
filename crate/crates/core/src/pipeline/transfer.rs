use std::borrow::Cow;

use super::{evaluate_predictions, featurizer, fit, predict_documents};
use crate::align::{map_space, AlignmentMap, VectorSpace};
use crate::corpus::{Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::eval::{EvalReport, ReportMeta};
use crate::lexicon::{pivot_substitute, EmotionLexicon, PivotMap, TieBreakStats};
use crate::model::{ClassifierParams, EncodingMode, ModelConfig, Prediction, TrainConfig, TrainReport};
use crate::num::Scalar;

/// Lexicon overlap with the test corpus below which a run records a warning.
pub const DEFAULT_OVERLAP_FLOOR: usize = 50;

/// Lexicons and tie-break statistics for both sides of a transfer.
#[derive(Debug, Clone, Copy)]
pub struct Af24Resources<'a> {
    pub source_lexicon: &'a EmotionLexicon,
    pub source_stats: &'a TieBreakStats,
    pub target_lexicon: Option<&'a EmotionLexicon>,
    pub target_stats: &'a TieBreakStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferConfig {
    /// `input_dim` must match both spaces; `use_af24` is set from the
    /// resources passed to the run.
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub overlap_floor: usize,
    /// Name written into the report metadata.
    pub method: String,
}

impl TransferConfig {
    pub fn new(model: ModelConfig, train: TrainConfig) -> Self {
        TransferConfig {
            model,
            train,
            overlap_floor: DEFAULT_OVERLAP_FLOOR,
            method: "direct-transfer".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferRun<T: Scalar> {
    pub params: ClassifierParams<T>,
    pub train_report: TrainReport,
    pub predictions: Vec<Prediction>,
    pub report: EvalReport,
    pub af24: bool,
    /// Fraction of test tokens without a target embedding (0 in
    /// precomputed mode).
    pub oov_rate: f64,
    /// Test documents with no in-vocabulary token.
    pub all_oov: usize,
    /// Distinct test tokens found in the target lexicon, when af24 is on.
    pub lexicon_overlap: Option<usize>,
    pub warnings: Vec<String>,
}

fn oov_stats<T: Scalar>(docs: &[Document], space: &VectorSpace<T>) -> (f64, usize) {
    let mut tokens = 0usize;
    let mut missing = 0usize;
    let mut all_oov = 0usize;
    for d in docs {
        let m = d.tokens.iter().filter(|t| space.index_of(t).is_none()).count();
        tokens += d.tokens.len();
        missing += m;
        if m == d.tokens.len() {
            all_oov += 1;
        }
    }
    let rate = if tokens == 0 { 0.0 } else { missing as f64 / tokens as f64 };
    (rate, all_oov)
}

/// Trains on `source_train` in the shared space and classifies
/// `target_test` with target-side features.
///
/// `alignment`, when given, maps the source space into the target space
/// before training. In precomputed mode both spaces hold sentence vectors
/// keyed by document id.
pub fn direct_transfer<T: Scalar>(
    source_train: &LabeledCorpus,
    src_space: &VectorSpace<T>,
    tgt_space: &VectorSpace<T>,
    alignment: Option<&AlignmentMap<T>>,
    target_test: &LabeledCorpus,
    af24: Option<Af24Resources<'_>>,
    cfg: &TransferConfig,
) -> Result<TransferRun<T>> {
    if src_space.dim() != tgt_space.dim() {
        return Err(Error::DimensionMismatch {
            expected: src_space.dim(),
            found: tgt_space.dim(),
        });
    }
    if target_test.is_empty() {
        return Err(Error::Empty("target test set has no documents".into()));
    }
    let mut warnings = Vec::new();
    let mut model = cfg.model.clone();
    model.use_af24 = af24.is_some();

    let (src_lex, tgt_lex) = match af24 {
        Some(r) => {
            let tl = r.target_lexicon.ok_or_else(|| {
                Error::InvalidArgument("lexicon features requested without a target-language lexicon".into())
            })?;
            (Some((r.source_lexicon, r.source_stats)), Some((tl, r.target_stats)))
        }
        None => (None, None),
    };
    let lexicon_overlap = tgt_lex.map(|(lex, _)| lex.overlap(target_test.documents().iter().flat_map(|d| &d.tokens)));
    if let Some(n) = lexicon_overlap {
        if n < cfg.overlap_floor {
            let w = format!(
                "only {n} distinct test tokens appear in the target lexicon (floor {})",
                cfg.overlap_floor
            );
            log::warn!("{w}");
            warnings.push(w);
        }
    }

    let aligned: Cow<'_, VectorSpace<T>> = match alignment {
        Some(map) => Cow::Owned(map_space(src_space, map)?),
        None => Cow::Borrowed(src_space),
    };
    let src_feat = featurizer(&model, &aligned, src_lex)?;
    let (params, train_report) = fit(source_train, &src_feat, &model, &cfg.train)?;

    let tgt_feat = featurizer(&model, tgt_space, tgt_lex)?;
    let predictions = predict_documents(&params, target_test.documents(), &tgt_feat)?;
    let (oov_rate, all_oov) = if model.mode == EncodingMode::PrecomputedVectors {
        (0.0, 0)
    } else {
        oov_stats(target_test.documents(), tgt_space)
    };
    if all_oov > 0 {
        let w = format!("{all_oov} test documents have no token in the target embedding vocabulary");
        log::warn!("{w}");
        warnings.push(w);
    }

    let mut meta = ReportMeta::new(target_test.language(), &cfg.method).with_seed(cfg.train.seed);
    meta.extra.insert("af24".into(), model.use_af24.to_string());
    meta.extra.insert("oov_rate".into(), format!("{oov_rate:.4}"));
    if let Some(n) = lexicon_overlap {
        meta.extra.insert("lexicon_overlap".into(), n.to_string());
    }
    for (i, w) in warnings.iter().enumerate() {
        meta.extra.insert(format!("warning_{}", i + 1), w.clone());
    }
    let report = evaluate_predictions(target_test, &predictions, meta)?;
    Ok(TransferRun {
        params,
        train_report,
        predictions,
        report,
        af24: model.use_af24,
        oov_rate,
        all_oov,
        lexicon_overlap,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct PivotRun<T: Scalar> {
    pub run: TransferRun<T>,
    /// The test set after substitution, in the pivot language.
    pub pivoted: LabeledCorpus,
    /// Tokens replaced by the pivot map.
    pub substituted: usize,
}

/// Replaces mapped tokens of `target_test` by pivot-language words, then
/// runs [`direct_transfer`] against the pivot language's resources.
#[allow(clippy::too_many_arguments)]
pub fn pivoted_transfer<T: Scalar>(
    target_test: &LabeledCorpus,
    pivot_map: &PivotMap,
    source_train: &LabeledCorpus,
    src_space: &VectorSpace<T>,
    pivot_space: &VectorSpace<T>,
    alignment: Option<&AlignmentMap<T>>,
    af24: Option<Af24Resources<'_>>,
    cfg: &TransferConfig,
) -> Result<PivotRun<T>> {
    if pivot_map.is_empty() {
        return Err(Error::Empty("pivot map has no entries".into()));
    }
    let mut substituted = 0;
    let docs = target_test
        .documents()
        .iter()
        .map(|d| {
            let tokens = pivot_substitute(&d.tokens, pivot_map);
            substituted += tokens.iter().zip(&d.tokens).filter(|(a, b)| a != b).count();
            Document {
                raw_text: tokens.join(" "),
                tokens,
                ..d.clone()
            }
        })
        .collect();
    let pivoted = LabeledCorpus::new(target_test.language(), target_test.label_set().clone(), docs)?;
    let mut run = direct_transfer(source_train, src_space, pivot_space, alignment, &pivoted, af24, cfg)?;
    run.report
        .meta
        .extra
        .insert("pivot_substitutions".into(), substituted.to_string());
    Ok(PivotRun {
        run,
        pivoted,
        substituted,
    })
}
