//! Prediction files and small loaders.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use xlemo::corpus::{load_labeled_corpus, CorpusFormat, Document, LabeledCorpus};
use xlemo::model::Prediction;
use xlemo::{EmotionLabel, Error, LabelSet};

pub fn labeled_corpus(path: &Path, language: &str, labels: &LabelSet) -> Result<LabeledCorpus, Error> {
    load_labeled_corpus(path, CorpusFormat::from_path(path), language, labels)
}

/// `id<TAB>label<TAB>p_1…p_k` with a header naming the labels.
pub fn predictions_tsv(docs: &[Document], preds: &[Prediction], labels: &LabelSet) -> String {
    let mut out = String::from("id\tlabel");
    for l in labels.labels() {
        let _ = write!(out, "\t{l}");
    }
    out.push('\n');
    for (d, p) in docs.iter().zip(preds) {
        let _ = write!(out, "{}\t{}", d.id, p.label);
        for x in &p.probs {
            let _ = write!(out, "\t{x}");
        }
        out.push('\n');
    }
    out
}

/// `id<TAB>label` rows for predictions without probabilities.
pub fn labels_tsv(docs: &[Document], preds: &[EmotionLabel]) -> String {
    let mut out = String::from("id\tlabel\n");
    for (d, l) in docs.iter().zip(preds) {
        let _ = writeln!(out, "{}\t{l}", d.id);
    }
    out
}

/// Reads a predictions file (header, then `id<TAB>label[...]`) and returns
/// the predicted label of every document of `gold`, in corpus order.
pub fn predictions_for(path: &Path, gold: &LabeledCorpus) -> Result<Vec<EmotionLabel>, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("id\tlabel") => {}
        _ => return Err(Error::parse(path, 1, "expected an `id<TAB>label` header")),
    }
    let mut by_id: HashMap<&str, EmotionLabel> = HashMap::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(id), Some(label)) = (cols.next(), cols.next()) else {
            return Err(Error::parse(path, i + 1, "expected `id<TAB>label`"));
        };
        let label: EmotionLabel = label.parse()?;
        gold.label_set().require(label)?;
        if by_id.insert(id, label).is_some() {
            return Err(Error::parse(path, i + 1, format!("duplicate id `{id}`")));
        }
    }
    gold.documents()
        .iter()
        .map(|d| {
            by_id
                .get(d.id.as_str())
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("{}: no prediction for document `{}`", path.display(), d.id)))
        })
        .collect()
}
