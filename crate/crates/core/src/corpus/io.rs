use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_probs, Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, LabelSet};

/// On-disk layouts for emotion corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One object per line: `id`, `text`, and optional `label`, `genre`,
    /// `probs` (label name to probability).
    Jsonl,
    /// `label<TAB>text`, one document per line. Ids are line numbers.
    Tsv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension (`.tsv` or anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("txt") => CorpusFormat::Tsv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::InvalidArgument(format!("unknown corpus format `{other}`"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDocument {
    id: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genre: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<BTreeMap<String, f64>>,
}

/// Reads documents whose labels may be missing (unlabeled or soft-labeled
/// pools). Labels and probability keys must belong to `label_set`.
pub fn load_documents(
    path: &Path,
    format: CorpusFormat,
    language: &str,
    label_set: &LabelSet,
) -> Result<Vec<Document>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            CorpusFormat::Jsonl => parse_json_line(&line, language, label_set)
                .map_err(|e| wrap_line_error(e, path, line_no))?,
            CorpusFormat::Tsv => parse_tsv_line(&line, line_no, language, label_set)
                .map_err(|e| wrap_line_error(e, path, line_no))?,
        };
        docs.push(doc);
    }
    Ok(docs)
}

/// Reads a corpus in which every line carries a gold label from `label_set`.
pub fn load_labeled_corpus(
    path: &Path,
    format: CorpusFormat,
    language: &str,
    label_set: &LabelSet,
) -> Result<LabeledCorpus> {
    let docs = load_documents(path, format, language, label_set)?;
    if let Some(d) = docs.iter().find(|d| d.gold_label.is_none()) {
        return Err(Error::InvalidArgument(format!(
            "{}: document `{}` has no label",
            path.display(),
            d.id
        )));
    }
    LabeledCorpus::new(language, label_set.clone(), docs)
}

// Label errors keep their own variant so callers can see the offending label;
// everything else becomes a positioned parse error.
fn wrap_line_error(e: Error, path: &Path, line: usize) -> Error {
    match e {
        Error::UnknownLabel(_) | Error::LabelNotActive { .. } => e,
        other => Error::parse(path, line, other.to_string()),
    }
}

fn parse_label(s: &str, label_set: &LabelSet) -> Result<EmotionLabel> {
    let label: EmotionLabel = s.parse()?;
    label_set.require(label)?;
    Ok(label)
}

fn parse_json_line(line: &str, language: &str, label_set: &LabelSet) -> Result<Document> {
    let rec: JsonDocument = serde_json::from_str(line)?;
    let mut doc = Document::new(rec.id, language, rec.text);
    if let Some(l) = rec.label {
        doc.gold_label = Some(parse_label(&l, label_set)?);
    }
    if let Some(g) = rec.genre {
        doc.genre = Some(g.parse()?);
    }
    if let Some(map) = rec.probs {
        let mut probs = vec![0.0; label_set.len()];
        for (k, v) in map {
            probs[label_set.require(parse_label(&k, label_set)?)?] = v;
        }
        check_probs(&probs, label_set.len()).map_err(Error::InvalidArgument)?;
        doc.soft_probs = Some(probs);
    }
    Ok(doc)
}

fn parse_tsv_line(
    line: &str,
    line_no: usize,
    language: &str,
    label_set: &LabelSet,
) -> Result<Document> {
    let (label, text) = line
        .split_once('\t')
        .ok_or_else(|| Error::InvalidArgument("expected `label<TAB>text`".into()))?;
    let label = parse_label(label, label_set)?;
    Ok(Document::new(line_no.to_string(), language, text).with_label(label))
}

/// Writes documents in `format`. TSV requires every document to be labeled
/// and its text to be free of tabs and newlines.
pub fn save_documents(
    docs: &[Document],
    label_set: &LabelSet,
    path: &Path,
    format: CorpusFormat,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for doc in docs {
        let line = match format {
            CorpusFormat::Jsonl => {
                let rec = JsonDocument {
                    id: doc.id.clone(),
                    text: doc.raw_text.clone(),
                    label: doc.gold_label.map(|l| l.to_string()),
                    genre: doc.genre.map(|g| g.to_string()),
                    probs: doc.soft_probs.as_ref().map(|p| {
                        label_set
                            .labels()
                            .iter()
                            .zip(p)
                            .map(|(l, &v)| (l.to_string(), v))
                            .collect()
                    }),
                };
                serde_json::to_string(&rec)?
            }
            CorpusFormat::Tsv => {
                let label = doc.gold_label.ok_or_else(|| {
                    Error::InvalidArgument(format!("TSV needs a label for document `{}`", doc.id))
                })?;
                if doc.raw_text.contains(['\t', '\n', '\r']) {
                    return Err(Error::InvalidArgument(format!(
                        "document `{}` text contains a tab or newline",
                        doc.id
                    )));
                }
                format!("{label}\t{}", doc.raw_text)
            }
        };
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_empty_corpus() {
        let f = write_tmp("");
        let c = load_labeled_corpus(f.path(), CorpusFormat::Tsv, "ar", &LabelSet::default()).unwrap();
        assert_eq!(c.len(), 0);
        assert_eq!(c.counts(), &[0, 0, 0]);
    }

    #[test]
    fn uppercase_label_canonicalized() {
        let f = write_tmp("ANGER\tI am furious\n");
        let c = load_labeled_corpus(f.path(), CorpusFormat::Tsv, "en", &LabelSet::default()).unwrap();
        assert_eq!(c.documents()[0].gold_label, Some(EmotionLabel::Anger));
        assert_eq!(c.documents()[0].tokens, ["i", "am", "furious"]);
    }

    #[test]
    fn unknown_label_is_named() {
        let f = write_tmp("joy\tok\nhappiness\tyay\n");
        let err = load_labeled_corpus(f.path(), CorpusFormat::Tsv, "en", &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel(ref l) if l == "happiness"), "{err}");
        let f = write_tmp("trust\tok\n");
        let err = load_labeled_corpus(f.path(), CorpusFormat::Tsv, "en", &LabelSet::default()).unwrap_err();
        assert!(err.to_string().contains("trust"));
    }

    #[test]
    fn parse_error_reports_line() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\",\"label\":\"joy\"}\n{not json\n");
        let err = load_documents(f.path(), CorpusFormat::Jsonl, "en", &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let f = write_tmp("joy no tab here\n");
        let err = load_documents(f.path(), CorpusFormat::Tsv, "en", &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn jsonl_probs_and_genre() {
        let f = write_tmp(
            r#"{"id":"t1","text":"Scary 😱","genre":"tweet","probs":{"fear":0.9,"anger":0.05,"joy":0.05}}"#,
        );
        let docs = load_documents(f.path(), CorpusFormat::Jsonl, "en", &LabelSet::default()).unwrap();
        assert_eq!(docs[0].soft_probs.as_deref(), Some(&[0.05, 0.9, 0.05][..]));
        assert_eq!(docs[0].genre, Some(super::super::Genre::Tweet));
        assert_eq!(docs[0].gold_label, None);
        let bad = write_tmp(r#"{"id":"t1","text":"x","probs":{"fear":0.9}}"#);
        assert!(load_documents(bad.path(), CorpusFormat::Jsonl, "en", &LabelSet::default()).is_err());
    }

    #[test]
    fn round_trip_both_formats() {
        let f = write_tmp(concat!(
            r#"{"id":"1","text":"So ANGRY!","label":"anger","genre":"news"}"#,
            "\n",
            r#"{"id":"2","text":"yay 😀","label":"joy","probs":{"anger":0.1,"fear":0.2,"joy":0.7}}"#,
            "\n"
        ));
        let set = LabelSet::default();
        let a = load_labeled_corpus(f.path(), CorpusFormat::Jsonl, "en", &set).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        save_documents(a.documents(), &set, out.path(), CorpusFormat::Jsonl).unwrap();
        let b = load_labeled_corpus(out.path(), CorpusFormat::Jsonl, "en", &set).unwrap();
        assert_eq!(a, b);

        let tsv = tempfile::NamedTempFile::new().unwrap();
        save_documents(a.documents(), &set, tsv.path(), CorpusFormat::Tsv).unwrap();
        let c = load_labeled_corpus(tsv.path(), CorpusFormat::Tsv, "en", &set).unwrap();
        assert_eq!(c.counts(), a.counts());
        assert_eq!(c.documents()[1].tokens, a.documents()[1].tokens);
    }
}
