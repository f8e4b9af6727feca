use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{EmotionLabel, LabelSet};

/// One-vs-rest scores for one label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub label: EmotionLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold occurrences.
    pub support: usize,
}

/// `num / den`, or 0 when `den` is 0.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub(crate) fn f1_of(p: f64, r: f64) -> f64 {
    ratio(2.0 * p * r, p + r)
}

fn check_lengths(gold: usize, pred: usize) -> Result<()> {
    if gold != pred {
        return Err(Error::DimensionMismatch {
            expected: gold,
            found: pred,
        });
    }
    Ok(())
}

fn to_indices(labels: &LabelSet, xs: &[EmotionLabel]) -> Result<Vec<usize>> {
    xs.iter().map(|&l| labels.require(l)).collect()
}

/// Precision, recall, F1 and support per label, in label-set order.
/// Undefined ratios (0/0) are 0.
pub fn per_class_scores(gold: &[EmotionLabel], pred: &[EmotionLabel], labels: &LabelSet) -> Result<Vec<ClassScores>> {
    check_lengths(gold.len(), pred.len())?;
    let g = to_indices(labels, gold)?;
    let p = to_indices(labels, pred)?;
    Ok(scores_from_confusion(&ConfusionMatrix::from_indices(&g, &p, labels)?))
}

fn scores_from_confusion(cm: &ConfusionMatrix) -> Vec<ClassScores> {
    let k = cm.labels.len();
    (0..k)
        .map(|c| {
            let tp = cm.counts[c][c] as f64;
            let gold: usize = cm.counts[c].iter().sum();
            let predicted: usize = (0..k).map(|r| cm.counts[r][c]).sum();
            let precision = ratio(tp, predicted as f64);
            let recall = ratio(tp, gold as f64);
            ClassScores {
                label: cm.labels.get(c),
                precision,
                recall,
                f1: f1_of(precision, recall),
                support: gold,
            }
        })
        .collect()
}

/// `Σ support·F1 / Σ support`.
pub fn weighted_avg_f1(f1: &[f64], support: &[usize]) -> Result<f64> {
    check_lengths(f1.len(), support.len())?;
    let total: usize = support.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("weighted average needs a non-zero support".into()));
    }
    let weighted: f64 = f1.iter().zip(support).map(|(&f, &s)| f * s as f64).sum();
    Ok(weighted / total as f64)
}

/// Gold × predicted counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: LabelSet,
    /// `counts[gold][pred]`
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(gold: &[EmotionLabel], pred: &[EmotionLabel], labels: &LabelSet) -> Result<Self> {
        check_lengths(gold.len(), pred.len())?;
        Self::from_indices(&to_indices(labels, gold)?, &to_indices(labels, pred)?, labels)
    }

    pub fn from_indices(gold: &[usize], pred: &[usize], labels: &LabelSet) -> Result<Self> {
        check_lengths(gold.len(), pred.len())?;
        let k = labels.len();
        let mut counts = vec![vec![0; k]; k];
        for (&g, &p) in gold.iter().zip(pred) {
            if g >= k || p >= k {
                return Err(Error::InvalidArgument(format!("label index {} out of range", g.max(p))));
            }
            counts[g][p] += 1;
        }
        Ok(ConfusionMatrix {
            labels: labels.clone(),
            counts,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let diag: usize = (0..self.counts.len()).map(|i| self.counts[i][i]).sum();
        ratio(diag as f64, self.total() as f64)
    }

    pub fn scores(&self) -> Vec<ClassScores> {
        scores_from_confusion(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EmotionLabel::*;

    #[test]
    fn hand_example() {
        let s = per_class_scores(&[Anger, Anger, Fear], &[Anger, Fear, Fear], &LabelSet::default()).unwrap();
        assert_eq!((s[0].precision, s[0].recall), (1.0, 0.5));
        assert!((s[0].f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!((s[1].precision, s[1].recall), (0.5, 1.0));
        assert!((s[1].f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!((s[2].precision, s[2].recall, s[2].f1, s[2].support), (0.0, 0.0, 0.0, 0));
    }

    #[test]
    fn perfect_prediction() {
        let g = [Joy, Fear, Anger, Joy];
        let s = per_class_scores(&g, &g, &LabelSet::default()).unwrap();
        assert!(s.iter().all(|c| c.f1 == 1.0));
    }

    #[test]
    fn weighted_examples() {
        assert_eq!(weighted_avg_f1(&[0.5, 1.0], &[1, 1]).unwrap(), 0.75);
        assert_eq!(weighted_avg_f1(&[0.3], &[7]).unwrap(), 0.3);
        assert!((weighted_avg_f1(&[0.4, 0.4, 0.4], &[3, 9, 1]).unwrap() - 0.4).abs() < 1e-15);
        assert!(weighted_avg_f1(&[0.4, 0.4], &[0, 0]).is_err());
    }

    #[test]
    fn errors() {
        assert!(per_class_scores(&[Anger], &[], &LabelSet::default()).is_err());
        assert!(per_class_scores(&[Sadness], &[Anger], &LabelSet::default()).is_err());
    }

    #[test]
    fn confusion_identities() {
        let g = [Anger, Joy, Joy, Fear, Joy];
        let p = [Joy, Joy, Fear, Fear, Joy];
        let cm = ConfusionMatrix::new(&g, &p, &LabelSet::default()).unwrap();
        assert_eq!(cm.total(), 5);
        assert!((cm.accuracy() - 0.6).abs() < 1e-15);
        let support: usize = cm.scores().iter().map(|c| c.support).sum();
        assert_eq!(support, 5);
    }
}
