//! Emotion-intensity lexicons and the 24-dimensional presence feature.
//!
//! The feature has one slot per (emotion, intensity) pair: emotions in
//! alphabetical Plutchik order, intensities ordered high, medium, low, so the
//! slot of `(emotion, intensity)` is `3 * emotion.index() + intensity.index()`.
//! `joy/high` lands on slot 12.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::align::BilingualDictionary;
use crate::corpus::{normalize_word, LabeledCorpus};
use crate::error::{Error, Result};
use crate::label::EmotionLabel;
use crate::num::Scalar;

pub const AF24_DIM: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intensity {
    High,
    Medium,
    Low,
}

impl Intensity {
    pub const ALL: [Intensity; 3] = [Intensity::High, Intensity::Medium, Intensity::Low];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Intensity::High => "high",
            Intensity::Medium => "medium",
            Intensity::Low => "low",
        }
    }
}

impl FromStr for Intensity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "high" => Ok(Intensity::High),
            "medium" => Ok(Intensity::Medium),
            "low" => Ok(Intensity::Low),
            _ => Err(Error::UnknownIntensity(s.trim().to_string())),
        }
    }
}

impl fmt::Display for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexiconEntry {
    pub emotion: EmotionLabel,
    pub intensity: Intensity,
}

impl LexiconEntry {
    pub fn new(emotion: EmotionLabel, intensity: Intensity) -> Self {
        LexiconEntry { emotion, intensity }
    }

    /// Slot of this entry in the af24 vector.
    pub fn slot(self) -> usize {
        3 * self.emotion.index() + self.intensity.index()
    }
}

/// Word to its (emotion, intensity) entries. Entries per word are kept
/// sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmotionLexicon {
    language: String,
    entries: BTreeMap<String, BTreeSet<LexiconEntry>>,
}

impl EmotionLexicon {
    pub fn new(language: &str) -> Self {
        EmotionLexicon {
            language: language.to_lowercase(),
            entries: BTreeMap::new(),
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    /// Adds an entry; returns false if the triple was already present.
    pub fn insert(&mut self, word: &str, entry: LexiconEntry) -> bool {
        self.entries.entry(normalize_word(word)).or_default().insert(entry)
    }

    pub fn get(&self, word: &str) -> Option<&BTreeSet<LexiconEntry>> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, LexiconEntry)> {
        self.entries
            .iter()
            .flat_map(|(w, es)| es.iter().map(move |e| (w.as_str(), *e)))
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct lexicon words that occur among `tokens`.
    pub fn overlap<'a>(&self, tokens: impl IntoIterator<Item = &'a String>) -> usize {
        tokens
            .into_iter()
            .filter(|t| self.contains(t))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Parses `word<TAB>emotion<TAB>intensity` rows. Returns the lexicon and
    /// the number of duplicate rows skipped.
    pub fn read_tsv(reader: impl BufRead, language: &str, origin: &Path) -> Result<(Self, usize)> {
        let mut lex = EmotionLexicon::new(language);
        let mut duplicates = 0;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 || cols[0].trim().is_empty() {
                return Err(Error::parse(
                    origin,
                    i + 1,
                    "expected `word<TAB>emotion<TAB>intensity`",
                ));
            }
            let emotion: EmotionLabel = cols[1].parse()?;
            let intensity: Intensity = cols[2].parse()?;
            if !lex.insert(cols[0], LexiconEntry::new(emotion, intensity)) {
                duplicates += 1;
            }
        }
        Ok((lex, duplicates))
    }

    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        for (word, e) in self.iter() {
            writeln!(w, "{word}\t{}\t{}", e.emotion, e.intensity)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_tsv(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Loads a lexicon TSV, logging a warning when duplicate rows are dropped.
pub fn load_lexicon(path: &Path, language: &str) -> Result<EmotionLexicon> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (lex, dups) = EmotionLexicon::read_tsv(BufReader::new(file), language, path)?;
    if dups > 0 {
        log::warn!("{}: dropped {dups} duplicate lexicon rows", path.display());
    }
    Ok(lex)
}

/// Binary presence vector over the 24 (emotion, intensity) slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Af24Vector([u8; AF24_DIM]);

impl Af24Vector {
    pub fn zeros() -> Self {
        Af24Vector([0; AF24_DIM])
    }

    pub fn set(&mut self, slot: usize) {
        self.0[slot] = 1;
    }

    pub fn get(&self, slot: usize) -> u8 {
        self.0[slot]
    }

    pub fn components(&self) -> &[u8; AF24_DIM] {
        &self.0
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..AF24_DIM).filter(|&i| self.0[i] == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn or(&self, other: &Af24Vector) -> Af24Vector {
        let mut out = *self;
        for (o, &b) in out.0.iter_mut().zip(&other.0) {
            *o |= b;
        }
        out
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.0.iter().map(|&c| if c == 1 { T::one() } else { T::zero() }).collect()
    }
}

/// How often each lexicon word occurred in training documents of each
/// emotion it is listed under.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TieBreakStats {
    counts: BTreeMap<String, BTreeMap<EmotionLabel, u64>>,
}

impl TieBreakStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, word: &str, emotion: EmotionLabel) -> u64 {
        self.counts
            .get(word)
            .and_then(|m| m.get(&emotion))
            .copied()
            .unwrap_or(0)
    }

    pub fn add(&mut self, word: &str, emotion: EmotionLabel, n: u64) {
        *self
            .counts
            .entry(word.to_string())
            .or_default()
            .entry(emotion)
            .or_insert(0) += n;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, EmotionLabel, u64)> {
        self.counts
            .iter()
            .flat_map(|(w, m)| m.iter().map(move |(e, c)| (w.as_str(), *e, *c)))
    }

    /// Carries counts across a bilingual dictionary: each target word
    /// accumulates the counts of every source word translated to it.
    pub fn translate(&self, dict: &BilingualDictionary) -> TieBreakStats {
        let mut out = TieBreakStats::new();
        for entry in dict.entries() {
            if let Some(m) = self.counts.get(&entry.source) {
                for (&e, &c) in m {
                    out.add(&entry.target, e, c);
                }
            }
        }
        out
    }
}

/// Counts, per lexicon word and emotion, the word's occurrences in training
/// documents whose gold label is one of the word's listed emotions.
pub fn build_tie_break_stats(train: &LabeledCorpus, lexicon: &EmotionLexicon) -> TieBreakStats {
    let mut stats = TieBreakStats::new();
    for doc in train.documents() {
        let Some(gold) = doc.gold_label else { continue };
        for tok in &doc.tokens {
            if let Some(entries) = lexicon.get(tok) {
                if entries.iter().any(|e| e.emotion == gold) {
                    stats.add(tok, gold, 1);
                }
            }
        }
    }
    stats
}

/// Emotion chosen for a word listed under several emotions: the one seen
/// most often in training, alphabetical on ties or when unseen.
pub fn select_emotion(
    word: &str,
    entries: &BTreeSet<LexiconEntry>,
    stats: &TieBreakStats,
) -> Option<EmotionLabel> {
    // entries iterate in alphabetical emotion order, so a strict `>` keeps
    // the earliest emotion on ties
    let mut best: Option<(EmotionLabel, u64)> = None;
    for e in entries {
        let c = stats.get(word, e.emotion);
        match best {
            Some((_, bc)) if c <= bc => {}
            _ => best = Some((e.emotion, c)),
        }
    }
    best.map(|(e, _)| e)
}

/// Presence features of a token sequence: for every lexicon word, its
/// selected emotion's entries switch on their slots. Slots are OR-ed across
/// tokens.
pub fn af24_features(tokens: &[String], lexicon: &EmotionLexicon, stats: &TieBreakStats) -> Af24Vector {
    let mut v = Af24Vector::zeros();
    for tok in tokens {
        let Some(entries) = lexicon.get(tok) else { continue };
        let Some(emotion) = select_emotion(tok, entries, stats) else { continue };
        for e in entries.iter().filter(|e| e.emotion == emotion) {
            v.set(e.slot());
        }
    }
    v
}

/// Projects a source lexicon through a bilingual dictionary: every target
/// word inherits the entries of all source words that translate to it.
pub fn induce_target_lexicon(
    dict: &BilingualDictionary,
    source_lexicon: &EmotionLexicon,
    target_language: &str,
) -> EmotionLexicon {
    let mut out = EmotionLexicon::new(target_language);
    for entry in dict.entries() {
        if let Some(es) = source_lexicon.get(&entry.source) {
            for &e in es {
                out.insert(&entry.target, e);
            }
        }
    }
    out
}

/// Target-language token to the pivot-language token that replaces it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PivotMap(BTreeMap<String, String>);

impl PivotMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, target: &str, pivot: &str) {
        self.0.insert(normalize_word(target), normalize_word(pivot));
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.0.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Reads `target_word<TAB>pivot_word` rows.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut map = PivotMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (t, p) = line
                .split_once('\t')
                .filter(|(t, p)| {
                    !t.trim().is_empty()
                        && !p.trim().is_empty()
                        && !t.trim().contains(char::is_whitespace)
                        && !p.trim().contains(char::is_whitespace)
                        && !p.contains('\t')
                })
                .ok_or_else(|| Error::parse(path, i + 1, "expected `target_word<TAB>pivot_word`"))?;
            map.insert(t, p);
        }
        Ok(map)
    }
}

impl FromIterator<(String, String)> for PivotMap {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        let mut m = PivotMap::new();
        for (t, p) in iter {
            m.insert(&t, &p);
        }
        m
    }
}

/// Replaces every mapped token by its pivot; length is preserved.
pub fn pivot_substitute(tokens: &[String], pivot_map: &PivotMap) -> Vec<String> {
    tokens
        .iter()
        .map(|t| pivot_map.get(t).map_or_else(|| t.clone(), str::to_string))
        .collect()
}
