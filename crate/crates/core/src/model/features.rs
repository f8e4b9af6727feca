use ndarray::{Array1, Array2};

use super::params::EncodingMode;
use crate::align::VectorSpace;
use crate::corpus::{Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::lexicon::{af24_features, EmotionLexicon, TieBreakStats};
use crate::num::Scalar;

/// What the network reads for one document.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoding<T: Scalar> {
    /// Token embeddings (`len × d`); `known[t]` is false for out-of-vocabulary
    /// tokens, whose rows are zero.
    Sequence { embeddings: Array2<T>, known: Vec<bool> },
    /// A ready-made sentence vector.
    Vector(Array1<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceInput<T: Scalar> {
    pub encoding: Encoding<T>,
    pub af24: Option<Array1<T>>,
}

impl<T: Scalar> SentenceInput<T> {
    pub fn sequence(embeddings: Array2<T>, known: Vec<bool>) -> Self {
        SentenceInput {
            encoding: Encoding::Sequence { embeddings, known },
            af24: None,
        }
    }

    pub fn vector(v: Array1<T>) -> Self {
        SentenceInput {
            encoding: Encoding::Vector(v),
            af24: None,
        }
    }

    pub fn with_af24(mut self, af24: Array1<T>) -> Self {
        self.af24 = Some(af24);
        self
    }

    /// Fraction of tokens missing from the embedding vocabulary (0 for
    /// vector inputs and empty sequences).
    pub fn oov_rate(&self) -> f64 {
        match &self.encoding {
            Encoding::Sequence { known, .. } if !known.is_empty() => {
                known.iter().filter(|k| !**k).count() as f64 / known.len() as f64
            }
            _ => 0.0,
        }
    }
}

/// Turns documents into [`SentenceInput`]s.
#[derive(Debug, Clone, Copy)]
pub struct Featurizer<'a, T: Scalar> {
    mode: EncodingMode,
    /// Word vectors, or sentence vectors keyed by document id in
    /// precomputed mode.
    vectors: &'a VectorSpace<T>,
    lexicon: Option<(&'a EmotionLexicon, &'a TieBreakStats)>,
}

impl<'a, T: Scalar> Featurizer<'a, T> {
    pub fn new(mode: EncodingMode, vectors: &'a VectorSpace<T>) -> Self {
        Featurizer {
            mode,
            vectors,
            lexicon: None,
        }
    }

    pub fn with_lexicon(mut self, lexicon: &'a EmotionLexicon, stats: &'a TieBreakStats) -> Self {
        self.lexicon = Some((lexicon, stats));
        self
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn encode(&self, doc: &Document) -> Result<SentenceInput<T>> {
        let mut input = match self.mode {
            EncodingMode::PrecomputedVectors => {
                let v = self.vectors.vector(&doc.id).ok_or_else(|| {
                    Error::InvalidArgument(format!("no precomputed vector for document `{}`", doc.id))
                })?;
                SentenceInput::vector(v.to_owned())
            }
            _ => self.encode_tokens(&doc.tokens),
        };
        if let Some((lex, stats)) = self.lexicon {
            input.af24 = Some(Array1::from(af24_features(&doc.tokens, lex, stats).to_scalars()));
        }
        Ok(input)
    }

    fn encode_tokens(&self, tokens: &[String]) -> SentenceInput<T> {
        let d = self.vectors.dim();
        let mut emb = Array2::zeros((tokens.len(), d));
        let mut known = Vec::with_capacity(tokens.len());
        for (t, tok) in tokens.iter().enumerate() {
            match self.vectors.vector(tok) {
                Some(v) => {
                    emb.row_mut(t).assign(&v);
                    known.push(true);
                }
                None => known.push(false),
            }
        }
        SentenceInput::sequence(emb, known)
    }
}

/// Encoded documents and their gold label indices.
#[derive(Debug, Clone)]
pub struct Dataset<T: Scalar> {
    pub inputs: Vec<SentenceInput<T>>,
    pub labels: Vec<usize>,
}

impl<T: Scalar> Dataset<T> {
    pub fn from_corpus(corpus: &LabeledCorpus, featurizer: &Featurizer<'_, T>) -> Result<Self> {
        let inputs = corpus
            .documents()
            .iter()
            .map(|d| featurizer.encode(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            inputs,
            labels: corpus.gold_indices(),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}
