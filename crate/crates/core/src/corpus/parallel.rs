use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::tokenize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Vec<String>,
    pub target: Vec<String>,
}

/// Sentence-aligned bitext. Both sides of every pair are non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCorpus {
    source_language: String,
    target_language: String,
    pairs: Vec<SentencePair>,
    dropped: usize,
}

impl ParallelCorpus {
    /// Builds a corpus from already tokenized pairs, dropping any pair with
    /// an empty side.
    pub fn from_pairs(
        source_language: &str,
        target_language: &str,
        pairs: impl IntoIterator<Item = SentencePair>,
    ) -> Self {
        let mut kept = Vec::new();
        let mut dropped = 0;
        for p in pairs {
            if p.source.is_empty() || p.target.is_empty() {
                dropped += 1;
            } else {
                kept.push(p);
            }
        }
        ParallelCorpus {
            source_language: source_language.to_lowercase(),
            target_language: target_language.to_lowercase(),
            pairs: kept,
            dropped,
        }
    }

    pub fn source_language(&self) -> &str {
        &self.source_language
    }

    pub fn target_language(&self) -> &str {
        &self.target_language
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs discarded at construction because one side was empty.
    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

/// Reads two line-aligned files; line `i` of each is a translation pair.
pub fn load_parallel_corpus(
    source_path: &Path,
    target_path: &Path,
    source_language: &str,
    target_language: &str,
) -> Result<ParallelCorpus> {
    let src = read_lines(source_path)?;
    let tgt = read_lines(target_path)?;
    if src.len() != tgt.len() {
        return Err(Error::LineCountMismatch {
            source_lines: src.len(),
            target_lines: tgt.len(),
        });
    }
    let corpus = ParallelCorpus::from_pairs(
        source_language,
        target_language,
        src.iter().zip(&tgt).map(|(s, t)| SentencePair {
            source: tokenize(s),
            target: tokenize(t),
        }),
    );
    if corpus.dropped > 0 {
        log::info!(
            "{} / {}: dropped {} pairs with an empty side",
            source_path.display(),
            target_path.display(),
            corpus.dropped
        );
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(lines: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(lines.as_bytes()).unwrap();
        f
    }

    #[test]
    fn line_count_mismatch_reports_both() {
        let a = tmp("a\nb\nc\n");
        let b = tmp("x\ny\nz\nw\n");
        match load_parallel_corpus(a.path(), b.path(), "en", "es") {
            Err(Error::LineCountMismatch {
                source_lines: 3,
                target_lines: 4,
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_target_line_dropped() {
        let a = tmp("in the beginning\nand there was light\n");
        let b = tmp("en el principio\n   \n");
        let c = load_parallel_corpus(a.path(), b.path(), "en", "es").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.dropped(), 1);
        assert_eq!(c.pairs()[0].target, ["en", "el", "principio"]);
    }
}
