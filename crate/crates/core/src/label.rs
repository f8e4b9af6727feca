//! Emotion categories and the active label set of a run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the eight Plutchik basic emotions, in alphabetical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmotionLabel {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Trust,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 8] = [
        EmotionLabel::Anger,
        EmotionLabel::Anticipation,
        EmotionLabel::Disgust,
        EmotionLabel::Fear,
        EmotionLabel::Joy,
        EmotionLabel::Sadness,
        EmotionLabel::Surprise,
        EmotionLabel::Trust,
    ];

    /// Position in alphabetical Plutchik order (0..8).
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Anger => "anger",
            EmotionLabel::Anticipation => "anticipation",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Joy => "joy",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Surprise => "surprise",
            EmotionLabel::Trust => "trust",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_lowercase();
        EmotionLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == lower)
            .ok_or_else(|| Error::UnknownLabel(s.trim().to_string()))
    }
}

impl Serialize for EmotionLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EmotionLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered set of labels a run classifies into. The order fixes output
/// indices and breaks argmax ties (earlier wins).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<EmotionLabel>", into = "Vec<EmotionLabel>")]
pub struct LabelSet(Vec<EmotionLabel>);

impl LabelSet {
    pub fn new(labels: Vec<EmotionLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("label set is empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("label `{l}` listed twice")));
            }
        }
        Ok(LabelSet(labels))
    }

    /// anger, fear, joy.
    pub fn default_three() -> Self {
        LabelSet(vec![EmotionLabel::Anger, EmotionLabel::Fear, EmotionLabel::Joy])
    }

    pub fn plutchik() -> Self {
        LabelSet(EmotionLabel::ALL.to_vec())
    }

    /// Parses a comma-separated list such as `anger,fear,joy`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let labels = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[EmotionLabel] {
        &self.0
    }

    pub fn position(&self, label: EmotionLabel) -> Option<usize> {
        self.0.iter().position(|&l| l == label)
    }

    pub fn contains(&self, label: EmotionLabel) -> bool {
        self.0.contains(&label)
    }

    pub fn get(&self, index: usize) -> EmotionLabel {
        self.0[index]
    }

    /// Resolves `label` against the set, returning its position or an
    /// error naming the label.
    pub fn require(&self, label: EmotionLabel) -> Result<usize> {
        self.position(label).ok_or_else(|| Error::LabelNotActive {
            label: label.to_string(),
            active: self.to_string(),
        })
    }

    /// Index of the largest value, ties going to the earliest label.
    pub fn argmax<T: PartialOrd + Copy>(&self, values: &[T]) -> usize {
        let mut best = 0;
        for (i, v) in values.iter().enumerate().skip(1) {
            if *v > values[best] {
                best = i;
            }
        }
        best
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self::default_three()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|l| l.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

impl TryFrom<Vec<EmotionLabel>> for LabelSet {
    type Error = Error;
    fn try_from(v: Vec<EmotionLabel>) -> Result<Self> {
        LabelSet::new(v)
    }
}

impl From<LabelSet> for Vec<EmotionLabel> {
    fn from(s: LabelSet) -> Self {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse_case_insensitively() {
        assert_eq!("ANGER".parse::<EmotionLabel>().unwrap(), EmotionLabel::Anger);
        assert_eq!(" Joy ".parse::<EmotionLabel>().unwrap(), EmotionLabel::Joy);
        assert!(matches!("happiness".parse::<EmotionLabel>(), Err(Error::UnknownLabel(l)) if l == "happiness"));
    }

    #[test]
    fn alphabetical_indices() {
        assert_eq!(EmotionLabel::Anger.index(), 0);
        assert_eq!(EmotionLabel::Joy.index(), 4);
        assert_eq!(EmotionLabel::Trust.index(), 7);
    }

    #[test]
    fn argmax_prefers_earlier_on_ties() {
        let set = LabelSet::default_three();
        assert_eq!(set.argmax(&[0.45, 0.45, 0.10]), 0);
        assert_eq!(set.argmax(&[0.1, 0.45, 0.45]), 1);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(LabelSet::parse_list("anger,anger").is_err());
        assert_eq!(LabelSet::parse_list("fear, joy").unwrap().len(), 2);
    }
}
