//! Deterministic synthetic data: emotion corpora with known cue words,
//! embeddings clustered by emotion, token ciphers that turn English into an
//! invented target language, and bitexts with planted dictionaries.
//!
//! Every generator is a pure function of its seed. The ciphered constructions
//! give end-to-end checks an exact answer: a ciphered test set carries the
//! same information as its plain original, so a transfer method should score
//! about as well on one as a monolingual model does on the other.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::align::{BilingualDictionary, DictionaryEntry, VectorSpace};
use crate::corpus::{Document, Genre, LabeledCorpus, ParallelCorpus, SentencePair};
use crate::error::Result;
use crate::label::LabelSet;
use crate::lexicon::{EmotionLexicon, Intensity, LexiconEntry, PivotMap};

/// Source-training label counts per genre (anger, fear, joy).
pub const GENRE_MIX_COUNTS: [(Genre, [usize; 3]); 3] = [
    (Genre::News, [885, 419, 264]),
    (Genre::Blog, [149, 91, 479]),
    (Genre::Tweet, [1118, 1938, 5775]),
];

/// Label counts (anger, fear, joy) of the annotated target test sets.
pub const TEST_SET_COUNTS: [(&str, [usize; 3]); 6] = [
    ("arabic", [374, 373, 449]),
    ("spanish", [628, 618, 730]),
    ("ilocano", [24, 12, 83]),
    ("odia", [63, 64, 200]),
    ("farsi", [15, 50, 148]),
    ("azerbaijani", [24, 36, 50]),
];

/// Sentence pairs in the religious-text bitexts.
pub const BIBLE_PAIRS: usize = 12679;

const CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];
const CIPHER_CONSONANTS: &[char] = &['β', 'γ', 'δ', 'ζ', 'θ', 'κ', 'λ', 'μ', 'ν', 'ξ', 'π', 'ρ', 'σ', 'τ'];
const CIPHER_VOWELS: &[char] = &['α', 'ε', 'ι', 'ο', 'υ', 'ω'];

fn pseudo_word(rng: &mut ChaCha8Rng, consonants: &[char], vowels: &[char], syllables: usize) -> String {
    (0..syllables)
        .flat_map(|_| [*consonants.choose(rng).unwrap(), *vowels.choose(rng).unwrap()])
        .collect()
}

/// `n` distinct pseudo-words of three or four syllables.
fn distinct_words(rng: &mut ChaCha8Rng, n: usize, consonants: &[char], vowels: &[char]) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syl = rng.gen_range(3..=4);
        let w = pseudo_word(rng, consonants, vowels, syl);
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Sizes and noise levels of a synthetic emotion world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub dim: usize,
    pub cues_per_label: usize,
    pub fillers: usize,
    /// Standard deviation of cue vectors around their emotion centroid.
    pub cue_noise: f64,
    /// Probability that a document also contains one cue of another emotion.
    pub distractor_rate: f64,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            dim: 16,
            cues_per_label: 30,
            fillers: 300,
            cue_noise: 0.35,
            distractor_rate: 0.2,
            min_len: 6,
            max_len: 12,
        }
    }
}

/// A vocabulary of emotion cue words and neutral fillers with embeddings
/// and a matching intensity lexicon.
#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub config: WorldConfig,
    pub labels: LabelSet,
    /// Cue words per label, in label-set order.
    pub cues: Vec<Vec<String>>,
    pub fillers: Vec<String>,
    pub space: VectorSpace<f64>,
    pub lexicon: EmotionLexicon,
}

impl SynthWorld {
    pub fn new(labels: LabelSet, config: WorldConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = labels.len();
        let total = k * config.cues_per_label + config.fillers;
        let mut words = distinct_words(&mut rng, total, CONSONANTS, VOWELS);
        let fillers = words.split_off(k * config.cues_per_label);
        let cues: Vec<Vec<String>> = words.chunks(config.cues_per_label).map(<[String]>::to_vec).collect();

        let std = Normal::new(0.0, 1.0).unwrap();
        let d = config.dim;
        let centroids: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| std.sample(&mut rng)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| 2.0 * x / n).collect()
            })
            .collect();
        let mut matrix = Array2::zeros((total, d));
        let mut vocab = Vec::with_capacity(total);
        let mut row = 0;
        for (c, group) in cues.iter().enumerate() {
            for w in group {
                for j in 0..d {
                    matrix[[row, j]] = centroids[c][j] + config.cue_noise * std.sample(&mut rng);
                }
                vocab.push(w.clone());
                row += 1;
            }
        }
        for w in &fillers {
            for j in 0..d {
                matrix[[row, j]] = 0.5 * std.sample(&mut rng);
            }
            vocab.push(w.clone());
            row += 1;
        }
        let space = VectorSpace::new("en", vocab, matrix)?;

        let mut lexicon = EmotionLexicon::new("en");
        let intensities = [Intensity::High, Intensity::Medium, Intensity::Low];
        for (c, group) in cues.iter().enumerate() {
            for (i, w) in group.iter().enumerate() {
                lexicon.insert(w, LexiconEntry::new(labels.get(c), intensities[i % 3]));
                // every fifth cue is also listed under the next emotion
                if i % 5 == 0 && k > 1 {
                    lexicon.insert(w, LexiconEntry::new(labels.get((c + 1) % k), Intensity::Low));
                }
            }
        }
        Ok(SynthWorld {
            config,
            labels,
            cues,
            fillers,
            space,
            lexicon,
        })
    }

    /// The three-emotion world used by the end-to-end checks.
    pub fn standard(seed: u64) -> Result<Self> {
        Self::new(LabelSet::default(), WorldConfig::default(), seed)
    }

    /// Tokens of one sentence expressing `label`.
    pub fn sentence(&self, rng: &mut ChaCha8Rng, label: usize) -> Vec<String> {
        let cfg = &self.config;
        let len = rng.gen_range(cfg.min_len..=cfg.max_len);
        let n_cues = rng.gen_range(1..=3).min(len);
        let mut tokens: Vec<String> = (0..len - n_cues)
            .map(|_| self.fillers.choose(rng).unwrap().clone())
            .collect();
        for _ in 0..n_cues {
            tokens.push(self.cues[label].choose(rng).unwrap().clone());
        }
        let k = self.labels.len();
        if k > 1 && rng.gen::<f64>() < cfg.distractor_rate {
            let other = (label + rng.gen_range(1..k)) % k;
            let slot = rng.gen_range(0..tokens.len());
            tokens[slot] = self.cues[other].choose(rng).unwrap().clone();
        }
        tokens.shuffle(rng);
        tokens
    }

    fn document(&self, rng: &mut ChaCha8Rng, id: String, label: usize, genre: Option<Genre>) -> Document {
        let tokens = self.sentence(rng, label);
        Document {
            id,
            language: "en".into(),
            raw_text: tokens.join(" "),
            tokens,
            gold_label: Some(self.labels.get(label)),
            soft_probs: None,
            genre,
        }
    }

    /// `n` labeled documents whose genre and label proportions follow
    /// [`GENRE_MIX_COUNTS`]. Requires the default three labels.
    pub fn genre_mix_corpus(&self, n: usize, seed: u64) -> Result<LabeledCorpus> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells = Vec::new();
        for (genre, counts) in GENRE_MIX_COUNTS {
            for (c, &w) in counts.iter().enumerate() {
                cells.push((genre, c, w as f64));
            }
        }
        let dist = rand::distributions::WeightedIndex::new(cells.iter().map(|c| c.2)).unwrap();
        let docs = (0..n)
            .map(|i| {
                let (genre, c, _) = cells[dist.sample(&mut rng)];
                self.document(&mut rng, format!("en-{i}"), c, Some(genre))
            })
            .collect();
        LabeledCorpus::new("en", self.labels.clone(), docs)
    }

    /// Documents with exactly `counts[c]` examples of label `c`, in a
    /// seeded random order.
    pub fn corpus_with_counts(&self, counts: &[usize], language: &str, seed: u64) -> Result<LabeledCorpus> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| vec![c; n]).collect();
        labels.shuffle(&mut rng);
        let docs = labels
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let mut d = self.document(&mut rng, format!("{language}-{i}"), c, None);
                d.language = language.to_string();
                d
            })
            .collect();
        LabeledCorpus::new(language, self.labels.clone(), docs)
    }

    /// Unlabeled sentences drawn with uniform labels, for bitext source
    /// sides.
    pub fn sentences(&self, n: usize, seed: u64) -> Vec<Vec<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let c = rng.gen_range(0..self.labels.len());
                self.sentence(&mut rng, c)
            })
            .collect()
    }

    pub fn vocabulary(&self) -> &[String] {
        self.space.words()
    }
}

/// A bijective word substitution into an invented script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cipher {
    pub language: String,
    map: BTreeMap<String, String>,
}

impl Cipher {
    pub fn new(vocabulary: &[String], language: &str, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let images = distinct_words(&mut rng, vocabulary.len(), CIPHER_CONSONANTS, CIPHER_VOWELS);
        Cipher {
            language: language.to_string(),
            map: vocabulary.iter().cloned().zip(images).collect(),
        }
    }

    /// Image of `word`; words outside the vocabulary pass through.
    pub fn apply(&self, word: &str) -> String {
        self.map.get(word).cloned().unwrap_or_else(|| word.to_string())
    }

    pub fn tokens(&self, tokens: &[String]) -> Vec<String> {
        tokens.iter().map(|t| self.apply(t)).collect()
    }

    pub fn document(&self, doc: &Document) -> Document {
        let tokens = self.tokens(&doc.tokens);
        Document {
            id: doc.id.clone(),
            language: self.language.clone(),
            raw_text: tokens.join(" "),
            tokens,
            gold_label: doc.gold_label,
            soft_probs: doc.soft_probs.clone(),
            genre: doc.genre,
        }
    }

    pub fn corpus(&self, corpus: &LabeledCorpus) -> Result<LabeledCorpus> {
        let docs = corpus.documents().iter().map(|d| self.document(d)).collect();
        LabeledCorpus::new(&self.language, corpus.label_set().clone(), docs)
    }

    /// The same vectors under ciphered words.
    pub fn space(&self, space: &VectorSpace<f64>) -> Result<VectorSpace<f64>> {
        let words = space.words().iter().map(|w| self.apply(w)).collect();
        VectorSpace::new(&self.language, words, space.matrix().clone())
    }

    pub fn lexicon(&self, lexicon: &EmotionLexicon) -> EmotionLexicon {
        let mut out = EmotionLexicon::new(&self.language);
        for (w, e) in lexicon.iter() {
            out.insert(&self.apply(w), e);
        }
        out
    }

    /// Word-for-word dictionary from plain to ciphered words.
    pub fn dictionary(&self) -> BilingualDictionary {
        BilingualDictionary::from_entries(self.map.iter().map(|(s, t)| DictionaryEntry::new(s, t, 1.0)))
    }

    /// Replaces ciphered words by their plain originals.
    pub fn inverse_pivot(&self) -> PivotMap {
        self.map.iter().map(|(s, t)| (t.clone(), s.clone())).collect()
    }

    pub fn bitext(&self, sentences: &[Vec<String>], source_language: &str) -> ParallelCorpus {
        ParallelCorpus::from_pairs(
            source_language,
            &self.language,
            sentences.iter().map(|s| SentencePair {
                source: s.clone(),
                target: self.tokens(s),
            }),
        )
    }
}

/// A bitext generated from a planted bijective dictionary: each target
/// sentence is the word-by-word translation of its source, shuffled.
#[derive(Debug, Clone)]
pub struct PlantedBitext {
    pub corpus: ParallelCorpus,
    /// Source word to its planted translation.
    pub dictionary: BTreeMap<String, String>,
}

pub fn planted_bitext(vocab: usize, pairs: usize, min_len: usize, max_len: usize, seed: u64) -> PlantedBitext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let src = distinct_words(&mut rng, vocab, CONSONANTS, VOWELS);
    let tgt = distinct_words(&mut rng, vocab, CIPHER_CONSONANTS, CIPHER_VOWELS);
    let dictionary: BTreeMap<String, String> = src.iter().cloned().zip(tgt.iter().cloned()).collect();
    let sentences: Vec<SentencePair> = (0..pairs)
        .map(|_| {
            let len = rng.gen_range(min_len..=max_len);
            let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..vocab)).collect();
            let source = idx.iter().map(|&i| src[i].clone()).collect();
            let mut target: Vec<String> = idx.iter().map(|&i| tgt[i].clone()).collect();
            target.shuffle(&mut rng);
            SentencePair { source, target }
        })
        .collect();
    PlantedBitext {
        corpus: ParallelCorpus::from_pairs("src", "tgt", sentences),
        dictionary,
    }
}

/// A Gaussian `n × d` space of distinct pseudo-words and a copy rotated by
/// a random orthogonal matrix with added Gaussian noise. Returns
/// `(source, target, rotation)`, where target rows are `Q x + noise`.
pub fn rotated_spaces(
    n: usize,
    d: usize,
    noise: f64,
    seed: u64,
) -> Result<(VectorSpace<f64>, VectorSpace<f64>, Array2<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = distinct_words(&mut rng, n, CONSONANTS, VOWELS);
    let std = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, d), |_| std.sample(&mut rng));
    let q = crate::align::random_orthogonal(d, &mut rng);
    let mut y = x.dot(&q.t());
    if noise > 0.0 {
        let eps = Normal::new(0.0, noise).unwrap();
        y.mapv_inplace(|v| v + eps.sample(&mut rng));
    }
    let cipher = Cipher::new(&words, "tgt", seed ^ 0x5eed);
    let tgt_words = words.iter().map(|w| cipher.apply(w)).collect();
    Ok((
        VectorSpace::new("src", words, x)?,
        VectorSpace::new("tgt", tgt_words, y)?,
        q,
    ))
}

/// Renders a bitext side as one sentence per line.
pub fn bitext_lines(corpus: &ParallelCorpus) -> (String, String) {
    let mut src = String::new();
    let mut tgt = String::new();
    for p in corpus.pairs() {
        src.push_str(&p.source.join(" "));
        src.push('\n');
        tgt.push_str(&p.target.join(" "));
        tgt.push('\n');
    }
    (src, tgt)
}
