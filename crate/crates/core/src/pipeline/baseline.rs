use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledCorpus, PROB_SUM_TOLERANCE};
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, LabelSet};

/// Distribution the random baseline samples from.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselinePrior {
    /// Label frequencies, in label-set order.
    Prior(Vec<f64>),
    Uniform,
}

impl BaselinePrior {
    /// The label distribution of a training corpus.
    pub fn from_corpus(train: &LabeledCorpus) -> Self {
        BaselinePrior::Prior(train.prior())
    }
}

/// One independently sampled label per test document.
pub fn random_baseline(prior: &BaselinePrior, test: &LabeledCorpus, seed: u64) -> Result<Vec<EmotionLabel>> {
    sample_labels(prior, test.label_set(), test.len(), seed)
}

pub(crate) fn sample_labels(prior: &BaselinePrior, labels: &LabelSet, n: usize, seed: u64) -> Result<Vec<EmotionLabel>> {
    let weights = match prior {
        BaselinePrior::Uniform => vec![1.0; labels.len()],
        BaselinePrior::Prior(p) => {
            if p.len() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    found: p.len(),
                });
            }
            let sum: f64 = p.iter().sum();
            if p.iter().any(|x| !(*x >= 0.0)) || (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!("prior must be a distribution (sums to {sum})")));
            }
            p.clone()
        }
    };
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| labels.get(dist.sample(&mut rng))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::per_class_scores;

    fn balanced(n: usize) -> Vec<EmotionLabel> {
        let l = LabelSet::default();
        (0..n).map(|i| l.get(i % 3)).collect()
    }

    #[test]
    fn degenerate_prior() {
        let labels = LabelSet::default();
        let pred = sample_labels(&BaselinePrior::Prior(vec![1.0, 0.0, 0.0]), &labels, 300, 1).unwrap();
        assert!(pred.iter().all(|&l| l == EmotionLabel::Anger));
        let s = per_class_scores(&balanced(300), &pred, &labels).unwrap();
        assert_eq!(s[0].recall, 1.0);
    }

    #[test]
    fn seeded() {
        let labels = LabelSet::default();
        let a = sample_labels(&BaselinePrior::Uniform, &labels, 100, 5).unwrap();
        assert_eq!(a, sample_labels(&BaselinePrior::Uniform, &labels, 100, 5).unwrap());
        assert_ne!(a, sample_labels(&BaselinePrior::Uniform, &labels, 100, 6).unwrap());
    }

    /// Pearson chi-square against the prior; 9.21 is the α = 0.01 critical
    /// value for two degrees of freedom.
    #[test]
    fn frequencies_follow_prior() {
        let prior = vec![0.2, 0.3, 0.5];
        let n = 10_000;
        let pred = sample_labels(&BaselinePrior::Prior(prior.clone()), &LabelSet::default(), n, 11).unwrap();
        let chi2: f64 = LabelSet::default()
            .labels()
            .iter()
            .zip(&prior)
            .map(|(l, p)| {
                let obs = pred.iter().filter(|x| *x == l).count() as f64;
                let exp = p * n as f64;
                (obs - exp).powi(2) / exp
            })
            .sum();
        assert!(chi2 < 9.21, "{chi2}");
    }

    #[test]
    fn bad_prior() {
        let labels = LabelSet::default();
        assert!(sample_labels(&BaselinePrior::Prior(vec![0.5, 0.2, 0.2]), &labels, 3, 0).is_err());
        assert!(sample_labels(&BaselinePrior::Prior(vec![0.5, 0.5]), &labels, 3, 0).is_err());
    }
}
