use std::path::PathBuf;

use xlemo::corpus::{load_labeled_corpus, load_parallel_corpus, CorpusFormat};
use xlemo::eval::{parse_reports, ReportFormat};
use xlemo::synth::{bitext_lines, Cipher, SynthWorld, BIBLE_PAIRS, TEST_SET_COUNTS};
use xlemo::LabelSet;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn arabic_test_set_has_published_counts() {
    let corpus = load_labeled_corpus(&fixture("arabic_test.tsv"), CorpusFormat::Tsv, "arabic", &LabelSet::default()).unwrap();
    let expected = TEST_SET_COUNTS.iter().find(|(l, _)| *l == "arabic").unwrap().1;
    assert_eq!(corpus.counts(), expected);
    assert_eq!(corpus.len(), 1196);
}

#[test]
fn published_reports_are_consistent() {
    let text = std::fs::read_to_string(fixture("published_scores.json")).unwrap();
    let reports = parse_reports(&text, ReportFormat::Json).unwrap();
    assert_eq!(reports.len(), 12);
    for r in &reports {
        r.validate().unwrap();
        assert_eq!(r.f1.len(), 3);
    }
    let languages: std::collections::BTreeSet<_> = reports.iter().map(|r| r.meta.language.as_str()).collect();
    assert_eq!(languages.into_iter().collect::<Vec<_>>(), ["arabic", "farsi", "spanish"]);
}

#[test]
fn agreement_figures_are_valid_kappas() {
    let text = std::fs::read_to_string(fixture("agreement.json")).unwrap();
    let rows: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let k = r["fleiss_kappa"].as_f64().unwrap();
        assert!((-1.0..=1.0).contains(&k));
        assert!(r["raters"].as_u64().unwrap() >= 2);
    }
    assert_eq!(rows[0]["language"], "farsi");
    assert_eq!(rows[0]["items"], 800);
    assert!(rows[1]["items"].is_null());
}

#[test]
fn full_size_bitext_round_trips_through_files() {
    let world = SynthWorld::standard(3).unwrap();
    let cipher = Cipher::new(world.vocabulary(), "tgt", 4);
    let bitext = cipher.bitext(&world.sentences(BIBLE_PAIRS, 5), "en");
    let (src, tgt) = bitext_lines(&bitext);
    let dir = tempfile::tempdir().unwrap();
    let (sp, tp) = (dir.path().join("bible.en"), dir.path().join("bible.tgt"));
    std::fs::write(&sp, src).unwrap();
    std::fs::write(&tp, tgt).unwrap();
    let loaded = load_parallel_corpus(&sp, &tp, "en", "tgt").unwrap();
    assert_eq!(loaded.len(), BIBLE_PAIRS);
    assert_eq!(loaded.pairs(), bitext.pairs());
}
