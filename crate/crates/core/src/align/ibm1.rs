use std::collections::HashMap;

use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};

/// Source-side token that lets target words align to nothing.
pub const NULL_TOKEN: &str = "<NULL>";

/// Lexical translation probabilities t(target | source) from IBM Model 1.
///
/// Only pairs that co-occur in some sentence pair are stored. Source id 0 is
/// [`NULL_TOKEN`].
#[derive(Debug, Clone)]
pub struct TranslationTable {
    source_vocab: Vec<String>,
    target_vocab: Vec<String>,
    source_index: HashMap<String, u32>,
    target_index: HashMap<String, u32>,
    pairs: Vec<(u32, u32)>,
    pair_index: HashMap<(u32, u32), usize>,
    probs: Vec<f64>,
    /// Number of sentence pairs in which the pair co-occurs.
    cooccur: Vec<u32>,
    /// Pair ids for each source word, in insertion order.
    rows: Vec<Vec<usize>>,
    log_likelihood: Vec<f64>,
}

impl TranslationTable {
    fn intern(vocab: &mut Vec<String>, index: &mut HashMap<String, u32>, w: &str) -> u32 {
        if let Some(&id) = index.get(w) {
            return id;
        }
        let id = vocab.len() as u32;
        vocab.push(w.to_string());
        index.insert(w.to_string(), id);
        id
    }

    fn from_corpus(corpus: &ParallelCorpus) -> (Self, Vec<(Vec<u32>, Vec<u32>)>) {
        let mut t = TranslationTable {
            source_vocab: Vec::new(),
            target_vocab: Vec::new(),
            source_index: HashMap::new(),
            target_index: HashMap::new(),
            pairs: Vec::new(),
            pair_index: HashMap::new(),
            probs: Vec::new(),
            cooccur: Vec::new(),
            rows: Vec::new(),
            log_likelihood: Vec::new(),
        };
        Self::intern(&mut t.source_vocab, &mut t.source_index, NULL_TOKEN);
        let mut sentences = Vec::with_capacity(corpus.len());
        for pair in corpus.pairs() {
            let mut src = vec![0u32];
            src.extend(
                pair.source
                    .iter()
                    .map(|w| Self::intern(&mut t.source_vocab, &mut t.source_index, w)),
            );
            let tgt: Vec<u32> = pair
                .target
                .iter()
                .map(|w| Self::intern(&mut t.target_vocab, &mut t.target_index, w))
                .collect();
            let mut us = src.clone();
            us.sort_unstable();
            us.dedup();
            let mut ut = tgt.clone();
            ut.sort_unstable();
            ut.dedup();
            for &s in &us {
                for &w in &ut {
                    let next = t.pairs.len();
                    let id = *t.pair_index.entry((s, w)).or_insert(next);
                    if id == next {
                        t.pairs.push((s, w));
                        t.cooccur.push(0);
                    }
                    t.cooccur[id] += 1;
                }
            }
            sentences.push((src, tgt));
        }
        t.rows = vec![Vec::new(); t.source_vocab.len()];
        for (id, &(s, _)) in t.pairs.iter().enumerate() {
            t.rows[s as usize].push(id);
        }
        t.probs = vec![0.0; t.pairs.len()];
        for row in &t.rows {
            let u = 1.0 / row.len() as f64;
            for &id in row {
                t.probs[id] = u;
            }
        }
        (t, sentences)
    }

    /// t(target | source); zero for pairs that never co-occurred.
    pub fn prob(&self, source: &str, target: &str) -> f64 {
        self.pair_id(source, target).map_or(0.0, |id| self.probs[id])
    }

    /// Sentence pairs in which both words occur.
    pub fn cooccurrences(&self, source: &str, target: &str) -> u32 {
        self.pair_id(source, target).map_or(0, |id| self.cooccur[id])
    }

    fn pair_id(&self, source: &str, target: &str) -> Option<usize> {
        let s = *self.source_index.get(source)?;
        let t = *self.target_index.get(target)?;
        self.pair_index.get(&(s, t)).copied()
    }

    pub fn source_vocab(&self) -> &[String] {
        &self.source_vocab
    }

    pub fn target_vocab(&self) -> &[String] {
        &self.target_vocab
    }

    /// `(target, probability, co-occurrence count)` for one source word.
    pub fn row(&self, source: &str) -> Vec<(&str, f64, u32)> {
        let Some(&s) = self.source_index.get(source) else {
            return Vec::new();
        };
        self.rows[s as usize]
            .iter()
            .map(|&id| {
                let t = self.pairs[id].1 as usize;
                (self.target_vocab[t].as_str(), self.probs[id], self.cooccur[id])
            })
            .collect()
    }

    /// Σ_t t(t|s) for every source word, NULL first.
    pub fn row_sums(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&id| self.probs[id]).sum())
            .collect()
    }

    /// Corpus log-likelihood before the first EM step and after each
    /// iteration.
    pub fn log_likelihood_history(&self) -> &[f64] {
        &self.log_likelihood
    }

    fn log_likelihood(&self, sentences: &[(Vec<u32>, Vec<u32>)]) -> f64 {
        let mut ll = 0.0;
        for (src, tgt) in sentences {
            let norm = (src.len() as f64).ln();
            for &t in tgt {
                let p: f64 = src.iter().map(|&s| self.probs[self.pair_index[&(s, t)]]).sum();
                ll += p.ln() - norm;
            }
        }
        ll
    }
}

/// Trains IBM Model 1 by EM, starting from uniform t(·|s) over each source
/// word's co-occurring targets. A NULL source token is added to every
/// sentence.
pub fn train_ibm1(corpus: &ParallelCorpus, iterations: usize) -> Result<TranslationTable> {
    if corpus.is_empty() {
        return Err(Error::Empty("parallel corpus has no sentence pairs".into()));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("EM needs at least one iteration".into()));
    }
    let (mut table, sentences) = TranslationTable::from_corpus(corpus);
    let mut counts = vec![0.0; table.pairs.len()];
    let mut totals = vec![0.0; table.source_vocab.len()];
    let mut ids = Vec::new();
    for _ in 0..iterations {
        counts.iter_mut().for_each(|c| *c = 0.0);
        totals.iter_mut().for_each(|c| *c = 0.0);
        let mut ll = 0.0;
        for (src, tgt) in &sentences {
            let norm = (src.len() as f64).ln();
            for &t in tgt {
                ids.clear();
                ids.extend(src.iter().map(|&s| table.pair_index[&(s, t)]));
                let z: f64 = ids.iter().map(|&id| table.probs[id]).sum();
                ll += z.ln() - norm;
                for (&id, &s) in ids.iter().zip(src) {
                    let c = table.probs[id] / z;
                    counts[id] += c;
                    totals[s as usize] += c;
                }
            }
        }
        table.log_likelihood.push(ll);
        for (id, &(s, _)) in table.pairs.iter().enumerate() {
            table.probs[id] = counts[id] / totals[s as usize];
        }
    }
    let final_ll = table.log_likelihood(&sentences);
    table.log_likelihood.push(final_ll);
    Ok(table)
}
