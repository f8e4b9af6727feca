use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::metrics::{weighted_avg_f1, ClassScores, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, LabelSet};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub language: String,
    pub method: String,
    pub seed: Option<u64>,
    /// Free-form run facts (agreement figures, OOV rates, warnings).
    #[serde(default)]
    pub extra: BTreeMap<String, String>,
}

impl ReportMeta {
    pub fn new(language: &str, method: &str) -> Self {
        ReportMeta {
            language: language.to_string(),
            method: method.to_string(),
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Per-label F1 and weighted F1 for one method on one test set.
///
/// Reports computed from predictions carry full scores and a confusion
/// matrix; reports built from published figures carry only the F1 columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub meta: ReportMeta,
    pub labels: LabelSet,
    /// Per-label F1 in label-set order.
    pub f1: Vec<f64>,
    pub weighted_f1: f64,
    pub scores: Option<Vec<ClassScores>>,
    pub confusion: Option<ConfusionMatrix>,
}

impl EvalReport {
    /// A report holding only published F1 figures.
    pub fn published(meta: ReportMeta, labels: LabelSet, f1: Vec<f64>, weighted_f1: f64) -> Result<Self> {
        let r = EvalReport {
            meta,
            labels,
            f1,
            weighted_f1,
            scores: None,
            confusion: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f1.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                found: self.f1.len(),
            });
        }
        if let Some(s) = &self.scores {
            let consistent = s.len() == self.f1.len()
                && s.iter().zip(self.labels.labels()).all(|(c, &l)| c.label == l)
                && s.iter().zip(&self.f1).all(|(c, &f)| c.f1 == f);
            if !consistent {
                return Err(Error::InvalidArgument("scores disagree with the F1 columns".into()));
            }
        }
        if let (Some(s), Some(cm)) = (&self.scores, &self.confusion) {
            let support: usize = s.iter().map(|c| c.support).sum();
            if support != cm.total() {
                return Err(Error::InvalidArgument("supports do not sum to the confusion total".into()));
            }
        }
        Ok(())
    }

    pub fn test_size(&self) -> Option<usize> {
        self.scores.as_ref().map(|s| s.iter().map(|c| c.support).sum())
    }
}

/// Scores `pred` against `gold`.
pub fn evaluate(gold: &[EmotionLabel], pred: &[EmotionLabel], labels: &LabelSet, meta: ReportMeta) -> Result<EvalReport> {
    let confusion = ConfusionMatrix::new(gold, pred, labels)?;
    let scores = confusion.scores();
    let f1: Vec<f64> = scores.iter().map(|c| c.f1).collect();
    let support: Vec<usize> = scores.iter().map(|c| c.support).collect();
    let weighted_f1 = weighted_avg_f1(&f1, &support)?;
    Ok(EvalReport {
        meta,
        labels: labels.clone(),
        f1,
        weighted_f1,
        scores: Some(scores),
        confusion: Some(confusion),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown report format `{other}`"))),
        }
    }
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        _ => emit_table(std::slice::from_ref(report), format),
    }
}

/// Several reports as one table: in text, one block per language with a
/// row per method and a column per label plus the weighted average.
pub fn emit_table(reports: &[EvalReport], format: ReportFormat) -> Result<String> {
    for r in reports {
        r.validate()?;
    }
    match format {
        ReportFormat::Text => Ok(text_table(reports)),
        ReportFormat::Tsv => Ok(tsv_table(reports)),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports)?;
            s.push('\n');
            Ok(s)
        }
    }
}

const METHOD_HEADER: &str = "method";

fn text_table(reports: &[EvalReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.meta.method.chars().count())
        .chain([METHOD_HEADER.len()])
        .max()
        .unwrap_or(0)
        + 2;
    let mut out = String::new();
    let mut current: Option<(&str, &LabelSet)> = None;
    for r in reports {
        let key = (r.meta.language.as_str(), &r.labels);
        if current != Some(key) {
            if current.is_some() {
                out.push('\n');
            }
            let _ = writeln!(out, "language: {}", r.meta.language);
            let mut header = format!("{METHOD_HEADER:<width$}");
            for l in r.labels.labels() {
                header.push_str(l.as_str());
                header.push(' ');
            }
            header.push_str("w-avg");
            let _ = writeln!(out, "{header}");
            current = Some(key);
        }
        let cells: Vec<String> = r.f1.iter().chain([&r.weighted_f1]).map(|v| format!("{v:.2}")).collect();
        let _ = writeln!(out, "{:<width$}{}", r.meta.method, cells.join(" "));
    }
    out
}

const TSV_HEADER: &str = "language\tmethod\tseed\tlabel\tprecision\trecall\tf1\tsupport";
const WAVG: &str = "w-avg";

fn tsv_table(reports: &[EvalReport]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in reports {
        let seed = r.meta.seed.map(|s| s.to_string()).unwrap_or_default();
        let lead = format!("{}\t{}\t{}", r.meta.language, r.meta.method, seed);
        for (i, l) in r.labels.labels().iter().enumerate() {
            let (p, rc, sup) = match &r.scores {
                Some(s) => (s[i].precision.to_string(), s[i].recall.to_string(), s[i].support.to_string()),
                None => Default::default(),
            };
            let _ = writeln!(out, "{lead}\t{}\t{p}\t{rc}\t{}\t{sup}", l.as_str(), r.f1[i]);
        }
        let _ = writeln!(out, "{lead}\t{WAVG}\t\t\t{}\t", r.weighted_f1);
    }
    out
}

/// Reads reports back from their TSV or JSON form. TSV keeps only the score
/// columns; the text table is for display and cannot be parsed.
pub fn parse_reports(s: &str, format: ReportFormat) -> Result<Vec<EvalReport>> {
    match format {
        ReportFormat::Json => {
            let v: serde_json::Value = serde_json::from_str(s)?;
            let reports: Vec<EvalReport> = if v.is_array() {
                serde_json::from_value(v)?
            } else {
                vec![serde_json::from_value(v)?]
            };
            for r in &reports {
                r.validate()?;
            }
            Ok(reports)
        }
        ReportFormat::Tsv => parse_tsv(s),
        ReportFormat::Text => Err(Error::InvalidArgument("text reports cannot be parsed".into())),
    }
}

fn parse_tsv(s: &str) -> Result<Vec<EvalReport>> {
    let bad = |line: usize, m: &str| Error::Parse {
        path: "<report>".into(),
        line,
        message: m.to_string(),
    };
    let mut lines = s.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TSV_HEADER => {}
        _ => return Err(bad(1, "missing report header")),
    }
    let num = |line: usize, v: &str| v.parse::<f64>().map_err(|_| bad(line, "bad number"));
    let mut reports = Vec::new();
    let mut labels = Vec::new();
    let mut f1 = Vec::new();
    let mut scores = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 8 {
            return Err(bad(n, "expected 8 columns"));
        }
        if cols[3] == WAVG {
            let mut meta = ReportMeta::new(cols[0], cols[1]);
            if !cols[2].is_empty() {
                meta.seed = Some(cols[2].parse().map_err(|_| bad(n, "bad seed"))?);
            }
            let scores_opt = if scores.len() == labels.len() && !scores.is_empty() {
                Some(std::mem::take(&mut scores))
            } else {
                None
            };
            let r = EvalReport {
                meta,
                labels: LabelSet::new(std::mem::take(&mut labels))?,
                f1: std::mem::take(&mut f1),
                weighted_f1: num(n, cols[6])?,
                scores: scores_opt,
                confusion: None,
            };
            r.validate()?;
            reports.push(r);
            scores.clear();
            continue;
        }
        let label: EmotionLabel = cols[3].parse()?;
        let f = num(n, cols[6])?;
        labels.push(label);
        f1.push(f);
        if !cols[4].is_empty() {
            scores.push(ClassScores {
                label,
                precision: num(n, cols[4])?,
                recall: num(n, cols[5])?,
                f1: f,
                support: cols[7].parse().map_err(|_| bad(n, "bad support"))?,
            });
        }
    }
    if !labels.is_empty() {
        return Err(bad(s.lines().count(), "report rows without a w-avg line"));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use EmotionLabel::*;

    fn published(method: &str, f: [f64; 4]) -> EvalReport {
        EvalReport::published(ReportMeta::new("arabic", method), LabelSet::default(), f[..3].to_vec(), f[3]).unwrap()
    }

    #[test]
    fn text_row_layout() {
        let t = emit_report(&published("Cross-Ling-LASER", [0.43, 0.66, 0.75, 0.62]), ReportFormat::Text).unwrap();
        assert_eq!(
            t,
            "language: arabic\nmethod            anger fear joy w-avg\nCross-Ling-LASER  0.43 0.66 0.75 0.62\n"
        );
    }

    #[test]
    fn languages_get_separate_blocks() {
        let mut b = published("x", [0.1, 0.2, 0.3, 0.2]);
        b.meta.language = "spanish".into();
        let t = emit_table(&[published("x", [0.1, 0.2, 0.3, 0.2]), b], ReportFormat::Text).unwrap();
        assert_eq!(t.matches("language:").count(), 2);
    }

    #[test]
    fn empty_metadata_still_serializes() {
        let r = evaluate(&[Anger, Joy], &[Anger, Fear], &LabelSet::default(), ReportMeta::default()).unwrap();
        for f in [ReportFormat::Text, ReportFormat::Tsv, ReportFormat::Json] {
            let s = emit_report(&r, f).unwrap();
            assert!(s.contains("0.5") || s.contains("0.50"), "{s}");
        }
    }

    #[test]
    fn round_trips() {
        let mut r = evaluate(
            &[Anger, Joy, Joy, Fear, Fear, Fear],
            &[Anger, Fear, Joy, Fear, Joy, Fear],
            &LabelSet::default(),
            ReportMeta::new("es", "direct").with_seed(7),
        )
        .unwrap();
        r.meta.extra.insert("oov_rate".into(), "0.25".into());
        let table = [r.clone(), published("LASER", [0.43, 0.66, 0.75, 0.62])];
        for f in [ReportFormat::Tsv, ReportFormat::Json] {
            let s = emit_table(&table, f).unwrap();
            let back = parse_reports(&s, f).unwrap();
            assert_eq!(emit_table(&back, f).unwrap(), s);
        }
        let single = emit_report(&r, ReportFormat::Json).unwrap();
        assert_eq!(parse_reports(&single, ReportFormat::Json).unwrap()[0], r);
    }

    #[test]
    fn supports_match_confusion() {
        let r = evaluate(&[Anger, Joy, Joy], &[Joy, Joy, Joy], &LabelSet::default(), ReportMeta::default()).unwrap();
        assert_eq!(r.test_size(), Some(3));
        assert_eq!(r.confusion.as_ref().unwrap().total(), 3);
    }
}
