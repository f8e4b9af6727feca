use std::path::Path;

use xlemo::align::{
    extract_dictionary, identical_string_seed, map_space, procrustes_align, train_ibm1, AlignmentMap,
    BilingualDictionary, Metric, Retriever, VectorSpace,
};
use xlemo::corpus::{load_parallel_corpus, save_documents, CorpusFormat, LabeledCorpus};
use xlemo::eval::{emit_report, emit_table, evaluate, parse_reports, EvalReport, ReportFormat, ReportMeta};
use xlemo::lexicon::{build_tie_break_stats, induce_target_lexicon, load_lexicon, EmotionLexicon, PivotMap, TieBreakStats};
use xlemo::model::{train, ClassifierParams, Dataset, EncodingMode, Featurizer, ModelConfig, TrainConfig};
use xlemo::pipeline::{
    annotation_projection, direct_transfer, pivoted_transfer, predict_documents, random_baseline,
    Af24Resources, BaselinePrior, ProjectionConfig, TransferConfig, TransferRun, DEFAULT_OVERLAP_FLOOR,
    DEFAULT_THRESHOLD,
};
use xlemo::LabelSet;

use crate::config::Settings;
use crate::error::CliError;
use crate::files::{labeled_corpus, labels_tsv, predictions_for, predictions_tsv};
use crate::manifest::RunRecord;
use crate::{
    AlignEmbeddingsArgs, AlignWordsArgs, BaselineArgs, Command, Common, EvaluateArgs, InduceLexiconArgs, ModelArgs,
    PivotArgs, ProjectArgs, ReportArgs, TrainSourceArgs, TransferArgs,
};

type Res<T> = Result<T, CliError>;

pub fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::TrainSource(a) => train_source(a),
        Command::Project(a) => project(a),
        Command::AlignWords(a) => align_words(a),
        Command::AlignEmbeddings(a) => align_embeddings(a),
        Command::InduceLexicon(a) => induce_lexicon(a),
        Command::Pivot(a) => pivot(a),
        Command::Transfer(a) => transfer(a),
        Command::Baseline(a) => baseline(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Report(a) => report(a),
    }
}

struct Run {
    settings: Settings,
    seed: u64,
    labels: LabelSet,
    out: std::path::PathBuf,
}

fn begin(common: Common) -> Res<Run> {
    let mut settings = Settings::new(common.config.as_deref())?;
    let out = settings.out_dir(common.out)?;
    let seed = settings.seed(common.seed)?;
    let labels = settings.value("labels", common.labels, LabelSet::default().to_string())?;
    let labels = LabelSet::parse_list(&labels)?;
    Ok(Run {
        settings,
        seed,
        labels,
        out,
    })
}

impl Run {
    /// Called once every input is resolved: creates the output directory.
    fn record(&self) -> Res<RunRecord> {
        RunRecord::start(&self.out)
    }

    fn finish(self, command: &str, record: RunRecord) -> Res<()> {
        record.finish(command, &self.settings, self.seed)
    }
}

fn parse_sizes(s: &str) -> Res<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--mlp: `{x}` is not a layer size")))
        })
        .collect()
}

fn model_config(s: &mut Settings, m: &ModelArgs, labels: &LabelSet) -> Res<(EncodingMode, ModelConfig)> {
    let mode: EncodingMode = s.value("mode", m.mode.clone(), "birnn_attention".to_string())?.parse()?;
    // input_dim is filled in once embeddings are loaded
    let base = ModelConfig::standard(mode, 1, labels.clone());
    let hidden = s.value("hidden", m.hidden, base.hidden)?;
    let attention = s.value("attention", m.attention, base.attention)?;
    let mlp = s.value("mlp", m.mlp.clone(), "50,50,50".to_string())?;
    Ok((
        mode,
        ModelConfig {
            hidden,
            attention,
            mlp: parse_sizes(&mlp)?,
            ..base
        },
    ))
}

fn train_config(s: &mut Settings, m: &ModelArgs, seed: u64) -> Res<TrainConfig> {
    let d = TrainConfig::default();
    let cfg = TrainConfig {
        batch_size: s.value("batch-size", m.batch_size, d.batch_size)?,
        dropout: s.value("dropout", m.dropout, d.dropout)?,
        patience: s.value("patience", m.patience, d.patience)?,
        tolerance: s.value("tolerance", m.tolerance, d.tolerance)?,
        learning_rate: s.value("learning-rate", m.learning_rate, d.learning_rate)?,
        max_epochs: s.value("max-epochs", m.max_epochs, d.max_epochs)?,
        seed,
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_space(path: &Path, language: &str) -> Res<VectorSpace<f64>> {
    Ok(VectorSpace::load_word2vec(path, language)?)
}

fn with_dim(cfg: &ModelConfig, dim: usize) -> ModelConfig {
    ModelConfig {
        input_dim: dim,
        ..cfg.clone()
    }
}

fn write_report(record: &mut RunRecord, report: &EvalReport) -> Res<()> {
    record.write("report.txt", &emit_report(report, ReportFormat::Text)?)?;
    record.write("report.json", &emit_report(report, ReportFormat::Json)?)?;
    record.count("weighted_f1", report.weighted_f1);
    Ok(())
}

fn train_source(a: TrainSourceArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let train_path = s.required_input("train", a.train)?;
    let emb_path = s.required_input("embeddings", a.embeddings)?;
    let lex_path = s.input("lexicon", a.lexicon)?;
    let lang = s.value("lang", a.lang, "en".to_string())?;
    let (mode, model) = model_config(s, &a.model, &run.labels)?;
    let tc = train_config(s, &a.model, run.seed)?;
    let mut record = run.record()?;

    let corpus = labeled_corpus(&train_path, &lang, &run.labels)?;
    let space = load_space(&emb_path, &lang)?;
    let lexicon = lex_path.map(|p| load_lexicon(&p, &lang)).transpose()?;
    let stats = lexicon.as_ref().map(|l| build_tie_break_stats(&corpus, l));
    let model = with_dim(&model, space.dim()).with_af24(lexicon.is_some());
    let mut feat = Featurizer::new(mode, &space);
    if let (Some(l), Some(st)) = (&lexicon, &stats) {
        feat = feat.with_lexicon(l, st);
    }
    let data = Dataset::from_corpus(&corpus, &feat)?;
    let (params, rep) = train(&data, ClassifierParams::init(model, run.seed)?, &tc)?;

    params.save_json(&record.path("model.json"))?;
    record.produced("model.json");
    record.write("train_report.json", &json(&rep)?)?;
    record.count("documents", corpus.len());
    record.count("label_counts", corpus.counts());
    record.count("epochs", rep.epochs());
    record.count("best_epoch", rep.best_epoch);
    run.finish("train-source", record)
}

fn json(v: &impl serde::Serialize) -> Res<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn project(a: ProjectArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let train_path = s.required_input("train", a.train)?;
    let src_emb = s.required_input("src-embeddings", a.src_embeddings)?;
    let tgt_emb = s.required_input("tgt-embeddings", a.tgt_embeddings)?;
    let par_src = s.required_input("parallel-src", a.parallel_src)?;
    let par_tgt = s.required_input("parallel-tgt", a.parallel_tgt)?;
    let test_path = s.input("test", a.test)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let threshold = s.value("threshold", a.threshold, DEFAULT_THRESHOLD)?;
    let (mode, model) = model_config(s, &a.model, &run.labels)?;
    let tc = train_config(s, &a.model, run.seed)?;
    let mut record = run.record()?;

    let corpus = labeled_corpus(&train_path, &src_lang, &run.labels)?;
    let src_space = load_space(&src_emb, &src_lang)?;
    let tgt_space = load_space(&tgt_emb, &tgt_lang)?;
    let parallel = load_parallel_corpus(&par_src, &par_tgt, &src_lang, &tgt_lang)?;
    let cfg = ProjectionConfig {
        threshold,
        ..ProjectionConfig::new(with_dim(&model, src_space.dim()), with_dim(&model, tgt_space.dim()), tc)
    };
    let pr = annotation_projection(&corpus, &src_space, &parallel, &tgt_space, &cfg)?;

    pr.source_params.save_json(&record.path("source_model.json"))?;
    record.produced("source_model.json");
    pr.target_params.save_json(&record.path("target_model.json"))?;
    record.produced("target_model.json");
    save_documents(&pr.labeled_source, &run.labels, &record.path("source_labeled.jsonl"), CorpusFormat::Jsonl)?;
    record.produced("source_labeled.jsonl");
    save_documents(pr.projected.documents(), &run.labels, &record.path("projected.jsonl"), CorpusFormat::Jsonl)?;
    record.produced("projected.jsonl");
    record.count("parallel_pairs", pr.counts.parallel_pairs);
    record.count("parallel_dropped_empty", parallel.dropped());
    record.count("kept", pr.counts.kept);
    record.count("dropped", pr.counts.dropped);
    record.count("projected_label_counts", &pr.counts.projected_labels);
    record.count("source_epochs", pr.source_report.epochs());
    record.count("target_epochs", pr.target_report.epochs());

    if let Some(p) = test_path {
        let test = labeled_corpus(&p, &tgt_lang, &run.labels)?;
        let feat = Featurizer::new(mode, &tgt_space);
        let preds = predict_documents(&pr.target_params, test.documents(), &feat)?;
        record.write("predictions.tsv", &predictions_tsv(test.documents(), &preds, &run.labels))?;
        let meta = ReportMeta::new(&tgt_lang, "annotation-projection").with_seed(run.seed);
        let report = xlemo::pipeline::evaluate_predictions(&test, &preds, meta)?;
        write_report(&mut record, &report)?;
    }
    run.finish("project", record)
}

fn align_words(a: AlignWordsArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let par_src = s.required_input("parallel-src", a.parallel_src)?;
    let par_tgt = s.required_input("parallel-tgt", a.parallel_tgt)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let iterations = s.value("iterations", a.iterations, 5usize)?;
    let min_prob = s.value("min-prob", a.min_prob, 0.1)?;
    let min_cooccur = s.value("min-cooccur", a.min_cooccur, 1u32)?;
    let mut record = run.record()?;

    let parallel = load_parallel_corpus(&par_src, &par_tgt, &src_lang, &tgt_lang)?;
    let table = train_ibm1(&parallel, iterations)?;
    let dict = extract_dictionary(&table, min_prob, min_cooccur);
    dict.save(&record.path("dictionary.tsv"))?;
    record.produced("dictionary.tsv");
    let mut ll = String::from("iteration\tlog_likelihood\n");
    for (i, v) in table.log_likelihood_history().iter().enumerate() {
        ll.push_str(&format!("{i}\t{v}\n"));
    }
    record.write("likelihood.tsv", &ll)?;
    record.count("pairs", parallel.len());
    record.count("pairs_dropped_empty", parallel.dropped());
    record.count("source_vocabulary", table.source_vocab().len());
    record.count("dictionary_entries", dict.len());
    run.finish("align-words", record)
}

fn align_embeddings(a: AlignEmbeddingsArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let src_emb = s.required_input("src-embeddings", a.src_embeddings)?;
    let tgt_emb = s.required_input("tgt-embeddings", a.tgt_embeddings)?;
    let dict_path = s.input("dictionary", a.dictionary)?;
    let eval_path = s.input("eval-dictionary", a.eval_dictionary)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let metric: Metric = s.value("metric", a.metric, "csls".to_string())?.parse()?;
    let mut record = run.record()?;

    let src = load_space(&src_emb, &src_lang)?;
    let tgt = load_space(&tgt_emb, &tgt_lang)?;
    let seed_dict = match &dict_path {
        Some(p) => BilingualDictionary::load(p)?,
        None => identical_string_seed(&src, &tgt),
    };
    let map = procrustes_align(&src, &tgt, &seed_dict)?;
    let aligned = map_space(&src, &map)?;
    record.write("alignment.json", &json(&map)?)?;
    aligned.save_word2vec(&record.path("aligned.vec"))?;
    record.produced("aligned.vec");
    record.count("seed_pairs", map.seed_pairs);
    record.count("orthogonality_error", map.orthogonality_error());

    if let Some(p) = eval_path {
        let gold = BilingualDictionary::load(&p)?;
        let retriever = Retriever::new(&aligned, &tgt, metric)?;
        let mut out = String::from("source\tgold\tretrieved\n");
        let (mut hits, mut total) = (0usize, 0usize);
        for e in gold.entries() {
            if aligned.index_of(&e.source).is_none() {
                continue;
            }
            let best = retriever.query(&e.source, 1)?;
            let got = best.first().map(|(w, _)| w.as_str()).unwrap_or("");
            total += 1;
            hits += usize::from(got == e.target);
            out.push_str(&format!("{}\t{}\t{got}\n", e.source, e.target));
        }
        record.write("translations.tsv", &out)?;
        record.count("eval_pairs", total);
        record.count("precision_at_1", if total == 0 { 0.0 } else { hits as f64 / total as f64 });
    }
    run.finish("align-embeddings", record)
}

fn induce_lexicon(a: InduceLexiconArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let lex_path = s.required_input("lexicon", a.lexicon)?;
    let dict_path = s.required_input("dictionary", a.dictionary)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let mut record = run.record()?;

    let lex = load_lexicon(&lex_path, &src_lang)?;
    let dict = BilingualDictionary::load(&dict_path)?;
    let induced = induce_target_lexicon(&dict, &lex, &tgt_lang);
    induced.save(&record.path("lexicon.tsv"))?;
    record.produced("lexicon.tsv");
    record.count("source_words", lex.len());
    record.count("dictionary_entries", dict.len());
    record.count("target_words", induced.len());
    run.finish("induce-lexicon", record)
}

/// Everything a transfer run reads, loaded.
struct TransferInputs {
    train: LabeledCorpus,
    test: LabeledCorpus,
    src_space: VectorSpace<f64>,
    tgt_space: VectorSpace<f64>,
    alignment: Option<AlignmentMap<f64>>,
    lexicons: Option<(EmotionLexicon, TieBreakStats, Option<EmotionLexicon>, TieBreakStats)>,
    cfg: TransferConfig,
}

impl TransferInputs {
    fn af24(&self) -> Option<Af24Resources<'_>> {
        self.lexicons.as_ref().map(|(sl, ss, tl, ts)| Af24Resources {
            source_lexicon: sl,
            source_stats: ss,
            target_lexicon: tl.as_ref(),
            target_stats: ts,
        })
    }
}

/// Resolves transfer settings; loading happens in [`load_transfer`] once
/// the output directory exists.
struct TransferPlan {
    train: std::path::PathBuf,
    test: std::path::PathBuf,
    src_emb: std::path::PathBuf,
    tgt_emb: std::path::PathBuf,
    alignment: Option<std::path::PathBuf>,
    af24: Option<(std::path::PathBuf, Option<std::path::PathBuf>, Option<std::path::PathBuf>)>,
    src_lang: String,
    tgt_lang: String,
    cfg: TransferConfig,
}

fn plan_transfer(run: &mut Run, a: TransferArgs, default_method: &str) -> Res<TransferPlan> {
    let s = &mut run.settings;
    let train = s.required_input("train", a.train)?;
    let test = s.required_input("test", a.test)?;
    let src_emb = s.required_input("src-embeddings", a.src_embeddings)?;
    let tgt_emb = s.required_input("tgt-embeddings", a.tgt_embeddings)?;
    let alignment = s.input("alignment", a.alignment)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let af24 = if s.flag("af24", a.af24)? {
        let src_lex = s
            .input("src-lexicon", a.src_lexicon)?
            .ok_or_else(|| CliError::Usage("--af24 needs --src-lexicon".into()))?;
        Some((src_lex, s.input("tgt-lexicon", a.tgt_lexicon)?, s.input("dictionary", a.dictionary)?))
    } else {
        None
    };
    let overlap_floor = s.value("overlap-floor", a.overlap_floor, DEFAULT_OVERLAP_FLOOR)?;
    let method = s.value("method", a.method, default_method.to_string())?;
    let (_, model) = model_config(s, &a.model, &run.labels)?;
    let tc = train_config(s, &a.model, run.seed)?;
    Ok(TransferPlan {
        train,
        test,
        src_emb,
        tgt_emb,
        alignment,
        af24,
        src_lang,
        tgt_lang,
        cfg: TransferConfig {
            overlap_floor,
            method,
            ..TransferConfig::new(model, tc)
        },
    })
}

fn load_transfer(plan: TransferPlan, labels: &LabelSet, test_lang: &str) -> Res<TransferInputs> {
    let train = labeled_corpus(&plan.train, &plan.src_lang, labels)?;
    let test = labeled_corpus(&plan.test, test_lang, labels)?;
    let src_space = load_space(&plan.src_emb, &plan.src_lang)?;
    let tgt_space = load_space(&plan.tgt_emb, &plan.tgt_lang)?;
    let alignment = match &plan.alignment {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| xlemo::Error::io(p, e))?;
            Some(serde_json::from_str::<AlignmentMap<f64>>(&text)?)
        }
        None => None,
    };
    let lexicons = match &plan.af24 {
        Some((sl, tl, dict)) => {
            let src_lex = load_lexicon(sl, &plan.src_lang)?;
            let src_stats = build_tie_break_stats(&train, &src_lex);
            let tgt_lex = tl.as_ref().map(|p| load_lexicon(p, &plan.tgt_lang)).transpose()?;
            let tgt_stats = match dict {
                Some(d) => src_stats.translate(&BilingualDictionary::load(d)?),
                None => TieBreakStats::new(),
            };
            Some((src_lex, src_stats, tgt_lex, tgt_stats))
        }
        None => None,
    };
    let cfg = TransferConfig {
        model: with_dim(&plan.cfg.model, src_space.dim()),
        ..plan.cfg
    };
    Ok(TransferInputs {
        train,
        test,
        src_space,
        tgt_space,
        alignment,
        lexicons,
        cfg,
    })
}

fn write_transfer(record: &mut RunRecord, run: &TransferRun<f64>, test: &LabeledCorpus, labels: &LabelSet) -> Res<()> {
    run.params.save_json(&record.path("model.json"))?;
    record.produced("model.json");
    record.write("train_report.json", &json(&run.train_report)?)?;
    record.write("predictions.tsv", &predictions_tsv(test.documents(), &run.predictions, labels))?;
    write_report(record, &run.report)?;
    record.count("test_documents", test.len());
    record.count("epochs", run.train_report.epochs());
    record.count("oov_rate", run.oov_rate);
    record.count("all_oov_documents", run.all_oov);
    record.count("lexicon_overlap", run.lexicon_overlap);
    record.count("warnings", &run.warnings);
    Ok(())
}

fn transfer(a: TransferArgs) -> Res<()> {
    let mut run = begin_from(&a.common)?;
    let plan = plan_transfer(&mut run, a, "direct-transfer")?;
    let mut record = run.record()?;
    let tgt_lang = plan.tgt_lang.clone();
    let inp = load_transfer(plan, &run.labels, &tgt_lang)?;
    let tr = direct_transfer(
        &inp.train,
        &inp.src_space,
        &inp.tgt_space,
        inp.alignment.as_ref(),
        &inp.test,
        inp.af24(),
        &inp.cfg,
    )?;
    record.count("train_documents", inp.train.len());
    write_transfer(&mut record, &tr, &inp.test, &run.labels)?;
    run.finish("transfer", record)
}

fn pivot(a: PivotArgs) -> Res<()> {
    let mut run = begin_from(&a.transfer.common)?;
    let map_path = run.settings.required_input("pivot-map", a.pivot_map)?;
    let plan = plan_transfer(&mut run, a.transfer, "pivot-transfer")?;
    let mut record = run.record()?;
    // the test corpus is in the unresourced language; the target space is
    // the pivot language's
    let pivot_map = PivotMap::load(&map_path)?;
    let tgt_lang = plan.tgt_lang.clone();
    let inp = load_transfer(plan, &run.labels, &tgt_lang)?;
    let pr = pivoted_transfer(
        &inp.test,
        &pivot_map,
        &inp.train,
        &inp.src_space,
        &inp.tgt_space,
        inp.alignment.as_ref(),
        inp.af24(),
        &inp.cfg,
    )?;
    save_documents(pr.pivoted.documents(), &run.labels, &record.path("pivoted.jsonl"), CorpusFormat::Jsonl)?;
    record.produced("pivoted.jsonl");
    record.count("train_documents", inp.train.len());
    record.count("substituted_tokens", pr.substituted);
    write_transfer(&mut record, &pr.run, &pr.pivoted, &run.labels)?;
    run.finish("pivot", record)
}

/// [`begin`] for commands whose [`Common`] is nested in other arguments.
fn begin_from(common: &Common) -> Res<Run> {
    begin(Common {
        out: common.out.clone(),
        config: common.config.clone(),
        seed: common.seed,
        labels: common.labels.clone(),
    })
}

fn baseline(a: BaselineArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let train_path = s.required_input("train", a.train)?;
    let test_path = s.required_input("test", a.test)?;
    let src_lang = s.value("src-lang", a.src_lang, "en".to_string())?;
    let tgt_lang = s.value("tgt-lang", a.tgt_lang, "tgt".to_string())?;
    let uniform = s.flag("uniform", a.uniform)?;
    let mut record = run.record()?;

    let train = labeled_corpus(&train_path, &src_lang, &run.labels)?;
    let test = labeled_corpus(&test_path, &tgt_lang, &run.labels)?;
    let prior = if uniform {
        BaselinePrior::Uniform
    } else {
        BaselinePrior::from_corpus(&train)
    };
    let preds = random_baseline(&prior, &test, run.seed)?;
    record.write("predictions.tsv", &labels_tsv(test.documents(), &preds))?;
    let gold: Vec<_> = test.documents().iter().filter_map(|d| d.gold_label).collect();
    let report = evaluate(&gold, &preds, &run.labels, ReportMeta::new(&tgt_lang, "random-baseline").with_seed(run.seed))?;
    write_report(&mut record, &report)?;
    record.count("test_documents", test.len());
    run.finish("baseline", record)
}

fn evaluate_cmd(a: EvaluateArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let gold_path = s.required_input("gold", a.gold)?;
    let pred_path = s.required_input("predictions", a.predictions)?;
    let lang = s.value("lang", a.lang, "tgt".to_string())?;
    let method = s.value("method", a.method, "predictions".to_string())?;
    let mut record = run.record()?;

    let gold = labeled_corpus(&gold_path, &lang, &run.labels)?;
    let pred = predictions_for(&pred_path, &gold)?;
    let gold_labels: Vec<_> = gold.documents().iter().filter_map(|d| d.gold_label).collect();
    let report = evaluate(&gold_labels, &pred, &run.labels, ReportMeta::new(&lang, &method))?;
    record.write("report.tsv", &emit_report(&report, ReportFormat::Tsv)?)?;
    write_report(&mut record, &report)?;
    record.count("documents", gold.len());
    run.finish("evaluate", record)
}

fn report(a: ReportArgs) -> Res<()> {
    let mut run = begin(a.common)?;
    let s = &mut run.settings;
    let mut paths = Vec::new();
    for (i, p) in a.inputs.into_iter().enumerate() {
        paths.push(s.required_input(&format!("input-{}", i + 1), Some(p))?);
    }
    let format: ReportFormat = s.value("format", a.format, "text".to_string())?.parse()?;
    let mut record = run.record()?;

    let mut reports = Vec::new();
    for p in &paths {
        let text = std::fs::read_to_string(p).map_err(|e| xlemo::Error::io(p, e))?;
        reports.extend(parse_reports(&text, ReportFormat::Json)?);
    }
    let name = match format {
        ReportFormat::Text => "table.txt",
        ReportFormat::Tsv => "table.tsv",
        ReportFormat::Json => "table.json",
    };
    record.write(name, &emit_table(&reports, format)?)?;
    record.count("rows", reports.len());
    run.finish("report", record)
}
