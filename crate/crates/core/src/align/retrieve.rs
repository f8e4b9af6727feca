use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;

use super::space::VectorSpace;
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Neighborhood size for the CSLS hubness penalty.
pub const CSLS_NEIGHBORHOOD: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Cosine,
    /// Cross-domain similarity local scaling:
    /// `2·cos(x, y) − r_T(x) − r_S(y)`.
    Csls,
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "cosine" | "cos" => Ok(Metric::Cosine),
            "csls" => Ok(Metric::Csls),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

/// Translation lookup from an aligned source space into a target space.
///
/// Building the retriever normalizes both spaces and, for CSLS, computes the
/// mean similarity of every target word to its nearest source words.
pub struct Retriever<'a, T: Scalar> {
    src: &'a VectorSpace<T>,
    tgt: &'a VectorSpace<T>,
    metric: Metric,
    src_unit: Array2<T>,
    tgt_unit: Array2<T>,
    /// r_S(y) for every target row (CSLS only).
    tgt_hubness: Vec<T>,
}

fn mean_top_k<T: Scalar>(scores: &mut [T], k: usize) -> T {
    let k = k.min(scores.len());
    if k == 0 {
        return T::zero();
    }
    scores.select_nth_unstable_by(k - 1, |a, b| b.partial_cmp(a).unwrap());
    scores[..k].iter().copied().sum::<T>() / T::lit(k as f64)
}

impl<'a, T: Scalar> Retriever<'a, T> {
    pub fn new(src: &'a VectorSpace<T>, tgt: &'a VectorSpace<T>, metric: Metric) -> Result<Self> {
        if src.dim() != tgt.dim() {
            return Err(Error::DimensionMismatch {
                expected: src.dim(),
                found: tgt.dim(),
            });
        }
        let src_unit = src.normalized().matrix().clone();
        let tgt_unit = tgt.normalized().matrix().clone();
        let tgt_hubness = match metric {
            Metric::Cosine => Vec::new(),
            Metric::Csls => (0..tgt_unit.nrows())
                .into_par_iter()
                .map(|j| {
                    let mut sims = src_unit.dot(&tgt_unit.row(j)).to_vec();
                    mean_top_k(&mut sims, CSLS_NEIGHBORHOOD)
                })
                .collect(),
        };
        Ok(Retriever {
            src,
            tgt,
            metric,
            src_unit,
            tgt_unit,
            tgt_hubness,
        })
    }

    /// Top `k` target words for `word`, best first; equal scores keep
    /// target vocabulary order.
    pub fn query(&self, word: &str, k: usize) -> Result<Vec<(String, T)>> {
        let i = self
            .src
            .index_of(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let x = self.src_unit.row(i);
        let cos = self.tgt_unit.dot(&x);
        let scores: Vec<T> = match self.metric {
            Metric::Cosine => cos.to_vec(),
            Metric::Csls => {
                let mut tmp = cos.to_vec();
                let r_t = mean_top_k(&mut tmp, CSLS_NEIGHBORHOOD);
                cos.iter()
                    .zip(&self.tgt_hubness)
                    .map(|(&c, &r_s)| T::lit(2.0) * c - r_t - r_s)
                    .collect()
            }
        };
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
        Ok(order
            .into_iter()
            .take(k)
            .map(|j| (self.tgt.words()[j].clone(), scores[j]))
            .collect())
    }
}

/// One-shot form of [`Retriever::query`].
pub fn translate_retrieve<T: Scalar>(
    word: &str,
    src_aligned: &VectorSpace<T>,
    tgt: &VectorSpace<T>,
    k: usize,
    metric: Metric,
) -> Result<Vec<(String, T)>> {
    Retriever::new(src_aligned, tgt, metric)?.query(word, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::random_orthogonal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spaces() -> (VectorSpace<f64>, VectorSpace<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = Array2::from_shape_fn((60, 8), |_| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let r = random_orthogonal(8, &mut rng);
        let src = VectorSpace::new("en", (0..60).map(|i| format!("w{i}")).collect(), x.clone()).unwrap();
        let tgt = VectorSpace::new("xx", (0..60).map(|i| format!("t{i}")).collect(), x.dot(&r.t())).unwrap();
        let aligned = src.with_matrix(x.dot(&r.t())).unwrap();
        (aligned, tgt)
    }

    #[test]
    fn true_translation_ranks_first() {
        let (src, tgt) = spaces();
        let r = Retriever::new(&src, &tgt, Metric::Cosine).unwrap();
        for i in 0..60 {
            let top = r.query(&format!("w{i}"), 3).unwrap();
            assert_eq!(top[0].0, format!("t{i}"));
            assert!(top[0].1 >= top[1].1 && top[1].1 >= top[2].1);
        }
    }

    #[test]
    fn oversized_k_returns_vocabulary() {
        let (src, tgt) = spaces();
        assert_eq!(translate_retrieve("w0", &src, &tgt, 1000, Metric::Csls).unwrap().len(), 60);
    }

    #[test]
    fn oov_and_zero_k() {
        let (src, tgt) = spaces();
        assert!(matches!(
            translate_retrieve("nope", &src, &tgt, 1, Metric::Cosine),
            Err(Error::OutOfVocabulary(_))
        ));
        assert!(translate_retrieve("w1", &src, &tgt, 0, Metric::Cosine).is_err());
    }

    #[test]
    fn ties_follow_vocabulary_order() {
        let m = ndarray::array![[1.0f64, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let src = VectorSpace::new("a", vec!["q".into(), "r".into(), "s".into()], m.clone()).unwrap();
        let tgt = VectorSpace::new("b", vec!["z".into(), "y".into(), "x".into()], m).unwrap();
        let out = translate_retrieve("r", &src, &tgt, 3, Metric::Cosine).unwrap();
        assert_eq!(out[0].0, "y");
        assert_eq!(out[1].0, "x");
    }
}
