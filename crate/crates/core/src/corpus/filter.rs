use super::{check_probs, Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::label::LabelSet;

/// Keeps documents whose most probable label reaches `threshold`, labeling
/// each with that argmax (ties go to the earlier label in `label_set`).
///
/// `threshold` is accepted in `[0, 1]`; zero keeps everything.
pub fn confidence_filter(
    docs: &[Document],
    language: &str,
    label_set: &LabelSet,
    threshold: f64,
) -> Result<LabeledCorpus> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "confidence threshold {threshold} outside [0, 1]"
        )));
    }
    let mut kept = Vec::new();
    for doc in docs {
        let probs = doc
            .soft_probs
            .as_ref()
            .ok_or_else(|| Error::MissingSoftProbs(doc.id.clone()))?;
        check_probs(probs, label_set.len())
            .map_err(|m| Error::InvalidArgument(format!("document `{}`: {m}", doc.id)))?;
        let best = label_set.argmax(probs);
        if probs[best] >= threshold {
            let mut d = doc.clone();
            d.gold_label = Some(label_set.get(best));
            kept.push(d);
        }
    }
    LabeledCorpus::new(language, label_set.clone(), kept)
}

/// Concatenates corpora that share a language and label set.
pub fn merge_corpora(corpora: &[LabeledCorpus]) -> Result<LabeledCorpus> {
    let first = corpora
        .first()
        .ok_or_else(|| Error::Empty("no corpora to merge".into()))?;
    for c in &corpora[1..] {
        if c.language() != first.language() {
            return Err(Error::Incompatible(format!(
                "languages `{}` and `{}` differ",
                first.language(),
                c.language()
            )));
        }
        if c.label_set() != first.label_set() {
            return Err(Error::Incompatible(format!(
                "label sets [{}] and [{}] differ",
                first.label_set(),
                c.label_set()
            )));
        }
    }
    let docs = corpora.iter().flat_map(|c| c.documents().iter().cloned()).collect();
    LabeledCorpus::new(first.language(), first.label_set().clone(), docs)
}
