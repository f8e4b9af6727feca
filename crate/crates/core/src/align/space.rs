use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Tolerance for unit-norm rows.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// Word embeddings for one language: row `i` of the matrix is the vector of
/// `words[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpace<T: Scalar> {
    language: String,
    words: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Array2<T>,
    unit_normalized: bool,
}

impl<T: Scalar> VectorSpace<T> {
    pub fn new(language: &str, words: Vec<String>, matrix: Array2<T>) -> Result<Self> {
        if words.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: words.len(),
                found: matrix.nrows(),
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("word `{w}` appears twice")));
            }
        }
        Ok(VectorSpace {
            language: language.to_lowercase(),
            words,
            index,
            matrix,
            unit_normalized: false,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_unit_normalized(&self) -> bool {
        self.unit_normalized
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, word: &str) -> Option<ArrayView1<'_, T>> {
        self.index_of(word).map(|i| self.matrix.row(i))
    }

    /// Same vocabulary with the rows replaced.
    pub fn with_matrix(&self, matrix: Array2<T>) -> Result<Self> {
        if matrix.nrows() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: matrix.nrows(),
            });
        }
        Ok(VectorSpace {
            matrix,
            unit_normalized: false,
            ..self.clone()
        })
    }

    /// Same space under a different language tag (and vocabulary order).
    pub fn relabeled(&self, language: &str) -> Self {
        VectorSpace {
            language: language.to_lowercase(),
            ..self.clone()
        }
    }

    /// Rows scaled to unit length. Zero rows stay zero; see [`Self::zero_rows`].
    pub fn normalized(&self) -> Self {
        let mut m = self.matrix.clone();
        for mut row in m.axis_iter_mut(Axis(0)) {
            let n = row.dot(&row).sqrt();
            if n > T::zero() {
                row.mapv_inplace(|x| x / n);
            }
        }
        VectorSpace {
            matrix: m,
            unit_normalized: true,
            ..self.clone()
        }
    }

    /// Indices of all-zero rows.
    pub fn zero_rows(&self) -> Vec<usize> {
        self.matrix
            .axis_iter(Axis(0))
            .enumerate()
            .filter(|(_, r)| r.iter().all(|&x| x == T::zero()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Reads the word2vec text format: a `count dim` header, then
    /// `word v1 ... vd` per line. Duplicate words keep their first vector.
    pub fn load_word2vec(path: &Path, language: &str) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, 1, "missing `count dim` header")),
        };
        let mut parts = header.split_whitespace().map(str::parse::<usize>);
        let (count, dim) = match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(c)), Some(Ok(d)), None) => (c, d),
            _ => return Err(Error::parse(path, 1, "malformed `count dim` header")),
        };
        let mut words = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        let mut seen = HashMap::new();
        let mut duplicates = 0usize;
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap().to_string();
            let start = data.len();
            for f in fields {
                let v: f64 = f
                    .parse()
                    .map_err(|_| Error::parse(path, line_no, format!("bad number `{f}`")))?;
                data.push(T::lit(v));
            }
            if data.len() - start != dim {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected {dim} values, found {}", data.len() - start),
                ));
            }
            if seen.insert(word.clone(), ()).is_some() {
                data.truncate(start);
                duplicates += 1;
                continue;
            }
            words.push(word);
        }
        if words.len() + duplicates != count {
            log::warn!(
                "{}: header declares {count} vectors, file has {}",
                path.display(),
                words.len() + duplicates
            );
        }
        if duplicates > 0 {
            log::warn!("{}: skipped {duplicates} duplicate words", path.display());
        }
        let matrix = Array2::from_shape_vec((words.len(), dim), data)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::new(language, words, matrix)
    }

    pub fn write_word2vec(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim())?;
        for (word, row) in self.words.iter().zip(self.matrix.axis_iter(Axis(0))) {
            write!(w, "{word}")?;
            for x in row {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_word2vec(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_word2vec(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::io::Write;

    #[test]
    fn word2vec_round_trip() {
        let s = VectorSpace::new(
            "en",
            vec!["a".into(), "b".into()],
            array![[0.1f64, -2.5, 1.0 / 3.0], [0.0, 0.0, 0.0]],
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        s.save_word2vec(f.path()).unwrap();
        let back = VectorSpace::<f64>::load_word2vec(f.path(), "en").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_have_lines() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(b"2 2\na 1 2\nb 1\n").unwrap();
        let err = VectorSpace::<f64>::load_word2vec(f.path(), "en").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let mut g = tempfile::NamedTempFile::new().unwrap();
        g.write_all(b"nonsense\n").unwrap();
        assert!(VectorSpace::<f32>::load_word2vec(g.path(), "en").is_err());
    }

    #[test]
    fn normalization_flags_zero_rows() {
        let s = VectorSpace::new("en", vec!["a".into(), "z".into()], array![[3.0f64, 4.0], [0.0, 0.0]])
            .unwrap()
            .normalized();
        assert!(s.is_unit_normalized());
        let r = s.vector("a").unwrap();
        assert!((r.dot(&r) - 1.0).abs() < UNIT_NORM_TOLERANCE);
        assert_eq!(s.zero_rows(), vec![1]);
    }

    #[test]
    fn duplicate_words_rejected_on_construction() {
        assert!(VectorSpace::new("en", vec!["a".into(), "a".into()], Array2::<f64>::zeros((2, 2))).is_err());
    }
}
