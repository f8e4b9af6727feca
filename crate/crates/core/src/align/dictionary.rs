use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::ibm1::{TranslationTable, NULL_TOKEN};
use super::space::VectorSpace;
use crate::corpus::normalize_word;
use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryEntry {
    pub source: String,
    pub target: String,
    pub score: f64,
}

impl DictionaryEntry {
    pub fn new(source: &str, target: &str, score: f64) -> Self {
        DictionaryEntry {
            source: source.to_string(),
            target: target.to_string(),
            score,
        }
    }
}

/// Word pairs with an extraction score; `(source, target)` pairs are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BilingualDictionary {
    entries: Vec<DictionaryEntry>,
}

impl BilingualDictionary {
    /// Keeps the first occurrence of each `(source, target)` pair.
    pub fn from_entries(entries: impl IntoIterator<Item = DictionaryEntry>) -> Self {
        let mut seen = HashSet::new();
        let entries = entries
            .into_iter()
            .filter(|e| seen.insert((e.source.clone(), e.target.clone())))
            .collect();
        BilingualDictionary { entries }
    }

    pub fn entries(&self) -> &[DictionaryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// First target listed for `source`.
    pub fn lookup(&self, source: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.source == source)
            .map(|e| e.target.as_str())
    }

    /// Reads `source<TAB>target<TAB>score` rows (score optional, default 1).
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse(path, i + 1, "expected `source<TAB>target<TAB>score`");
            if !(2..=3).contains(&cols.len()) || cols[0].trim().is_empty() || cols[1].trim().is_empty() {
                return Err(bad());
            }
            let score = match cols.get(2) {
                Some(s) => s.trim().parse::<f64>().map_err(|_| bad())?,
                None => 1.0,
            };
            entries.push(DictionaryEntry::new(
                &normalize_word(cols[0]),
                &normalize_word(cols[1]),
                score,
            ));
        }
        Ok(Self::from_entries(entries))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for e in &self.entries {
            writeln!(w, "{}\t{}\t{}", e.source, e.target, e.score).map_err(|err| Error::io(path, err))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Best translation of each source word, kept when its probability reaches
/// `min_prob` and the pair co-occurred in at least `min_cooccur` sentence
/// pairs. Ties on probability go to the lexicographically smaller target.
/// The NULL row never contributes.
pub fn extract_dictionary(table: &TranslationTable, min_prob: f64, min_cooccur: u32) -> BilingualDictionary {
    let mut entries = Vec::new();
    for source in table.source_vocab() {
        if source == NULL_TOKEN {
            continue;
        }
        let best = table.row(source).into_iter().fold(None, |best: Option<(&str, f64, u32)>, cand| {
            match best {
                Some(b) if b.1 > cand.1 || (b.1 == cand.1 && b.0 <= cand.0) => Some(b),
                _ => Some(cand),
            }
        });
        if let Some((target, p, c)) = best {
            if p >= min_prob && c >= min_cooccur {
                entries.push(DictionaryEntry::new(source, target, p));
            }
        }
    }
    BilingualDictionary::from_entries(entries)
}

/// Seed dictionary of words spelled identically in both vocabularies, in
/// source vocabulary order.
pub fn identical_string_seed<T: Scalar>(src: &VectorSpace<T>, tgt: &VectorSpace<T>) -> BilingualDictionary {
    BilingualDictionary::from_entries(
        src.words()
            .iter()
            .filter(|w| tgt.index_of(w).is_some())
            .map(|w| DictionaryEntry::new(w, w, 1.0)),
    )
}
