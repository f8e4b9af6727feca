use std::collections::{BTreeSet, HashMap};

use super::{Document, LabeledCorpus};
use crate::label::{EmotionLabel, LabelSet};

/// Surface cue (keyword or emoji token) to the emotion it signals.
pub type CueMap = HashMap<String, EmotionLabel>;

#[derive(Debug, Clone)]
pub struct DistantLabelConfig {
    pub language: String,
    pub label_set: LabelSet,
    /// Documents with fewer tokens are dropped.
    pub min_tokens: usize,
}

impl Default for DistantLabelConfig {
    fn default() -> Self {
        DistantLabelConfig {
            language: "en".into(),
            label_set: LabelSet::default(),
            min_tokens: 6,
        }
    }
}

/// Why documents were left out of a distantly labeled corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DistantLabelReport {
    pub labeled: usize,
    pub too_short: usize,
    pub no_cue: usize,
    pub conflicting: usize,
    /// Cues pointed at a single label outside the active set.
    pub inactive_label: usize,
}

/// Labels each document by the emotion its cue tokens agree on.
///
/// A document is kept iff it has at least `min_tokens` tokens and every cue
/// it contains maps to the same label. Zero cues or disagreeing cues exclude
/// it.
pub fn distant_label(
    raw_docs: &[Document],
    cues: &CueMap,
    config: &DistantLabelConfig,
) -> (LabeledCorpus, DistantLabelReport) {
    let mut report = DistantLabelReport::default();
    let mut kept = Vec::new();
    for doc in raw_docs {
        if doc.tokens.len() < config.min_tokens {
            report.too_short += 1;
            continue;
        }
        let found: BTreeSet<EmotionLabel> =
            doc.tokens.iter().filter_map(|t| cues.get(t).copied()).collect();
        let mut it = found.iter();
        match (it.next(), it.next()) {
            (None, _) => report.no_cue += 1,
            (Some(_), Some(_)) => report.conflicting += 1,
            (Some(&label), None) if !config.label_set.contains(label) => {
                report.inactive_label += 1
            }
            (Some(&label), None) => {
                let mut d = doc.clone();
                d.gold_label = Some(label);
                d.soft_probs = None;
                kept.push(d);
            }
        }
    }
    report.labeled = kept.len();
    let corpus = LabeledCorpus::new(&config.language, config.label_set.clone(), kept)
        .expect("labels were checked against the active set");
    (corpus, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cues() -> CueMap {
        [
            ("😡", EmotionLabel::Anger),
            ("furious", EmotionLabel::Anger),
            ("😀", EmotionLabel::Joy),
            ("🙏", EmotionLabel::Trust),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, "fa", text)
    }

    #[test]
    fn single_cue_labels_document() {
        let docs = [doc("a", "one two three four five 😡")];
        let (c, r) = distant_label(&docs, &cues(), &DistantLabelConfig::default());
        assert_eq!(c.documents()[0].gold_label, Some(EmotionLabel::Anger));
        assert_eq!(r.labeled, 1);
    }

    #[test]
    fn agreeing_cues_are_fine_conflicts_excluded() {
        let docs = [
            doc("a", "furious one two three four 😡"),
            doc("b", "one two three four 😡 😀"),
        ];
        let (c, r) = distant_label(&docs, &cues(), &DistantLabelConfig::default());
        assert_eq!(c.len(), 1);
        assert_eq!(c.documents()[0].id, "a");
        assert_eq!(r.conflicting, 1);
    }

    #[test]
    fn short_and_cueless_documents_dropped() {
        let docs = [
            doc("short", "one two three four 😡"),
            doc("plain", "one two three four five six"),
            doc("trust", "one two three four five 🙏"),
        ];
        let (c, r) = distant_label(&docs, &cues(), &DistantLabelConfig::default());
        assert!(c.is_empty());
        assert_eq!((r.too_short, r.no_cue, r.inactive_label), (1, 1, 1));
    }

    #[test]
    fn output_labels_come_from_cue_range() {
        let docs: Vec<Document> = (0..20)
            .map(|i| {
                let cue = ["😡", "😀", "furious", "x"][i % 4];
                doc(&i.to_string(), &format!("a b c d e {cue}"))
            })
            .collect();
        let map = cues();
        let (c, _) = distant_label(&docs, &map, &DistantLabelConfig::default());
        for d in c.documents() {
            assert!(map.values().any(|&l| Some(l) == d.gold_label));
        }
    }
}
