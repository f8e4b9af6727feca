use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Items × categories table of rater counts with a constant number of
/// raters per item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationMatrix {
    counts: Vec<Vec<usize>>,
    raters: usize,
}

impl AnnotationMatrix {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self> {
        let first = counts
            .first()
            .ok_or_else(|| Error::Empty("annotation matrix has no items".into()))?;
        let k = first.len();
        let raters: usize = first.iter().sum();
        for (i, row) in counts.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            let n: usize = row.iter().sum();
            if n != raters {
                return Err(Error::InvalidArgument(format!(
                    "item {i} has {n} ratings, expected {raters}"
                )));
            }
        }
        if raters < 2 {
            return Err(Error::InvalidArgument("agreement needs at least two raters per item".into()));
        }
        Ok(AnnotationMatrix { counts, raters })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn raters(&self) -> usize {
        self.raters
    }

    pub fn items(&self) -> usize {
        self.counts.len()
    }
}

/// Fleiss' kappa.
///
/// When every rating falls in one category the chance agreement is 1; the
/// result is then 1 if every item is unanimous, otherwise a numeric error.
pub fn fleiss_kappa(m: &AnnotationMatrix) -> Result<f64> {
    let n = m.raters as f64;
    let items = m.items() as f64;
    let k = m.counts[0].len();
    let mut p_bar = 0.0;
    let mut col = vec![0usize; k];
    for row in &m.counts {
        let sq: usize = row.iter().map(|&c| c * c).sum();
        p_bar += (sq as f64 - n) / (n * (n - 1.0));
        for (j, &c) in row.iter().enumerate() {
            col[j] += c;
        }
    }
    p_bar /= items;
    let p_e: f64 = col.iter().map(|&c| (c as f64 / (items * n)).powi(2)).sum();
    if p_e == 1.0 {
        return if p_bar == 1.0 {
            Ok(1.0)
        } else {
            Err(Error::Numeric("degenerate agreement: chance agreement is 1".into()))
        };
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement() {
        let m = AnnotationMatrix::new(vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3]]).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn total_disagreement() {
        let m = AnnotationMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), -1.0);
    }

    #[test]
    fn single_category() {
        let m = AnnotationMatrix::new(vec![vec![4, 0], vec![4, 0]]).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn invalid_matrices() {
        assert!(AnnotationMatrix::new(vec![]).is_err());
        assert!(AnnotationMatrix::new(vec![vec![2, 1], vec![1, 1]]).is_err());
        assert!(AnnotationMatrix::new(vec![vec![1, 0]]).is_err());
    }

    /// Classic worked example: 10 items, 14 raters, 5 categories.
    #[test]
    fn reference_table() {
        let rows = vec![
            vec![0, 0, 0, 0, 14],
            vec![0, 2, 6, 4, 2],
            vec![0, 0, 3, 5, 6],
            vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1],
            vec![7, 7, 0, 0, 0],
            vec![3, 2, 6, 3, 0],
            vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0],
            vec![0, 2, 2, 3, 7],
        ];
        let k = fleiss_kappa(&AnnotationMatrix::new(rows).unwrap()).unwrap();
        assert!((k - 0.20993070442).abs() < 1e-9, "{k}");
    }
}
