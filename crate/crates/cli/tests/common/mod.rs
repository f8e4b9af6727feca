//! Small synthetic inputs written to disk for end-to-end runs.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use xlemo::corpus::{save_documents, CorpusFormat};
use xlemo::lexicon::EmotionLexicon;
use xlemo::synth::{bitext_lines, Cipher, SynthWorld};
use xlemo::LabelSet;

pub struct Inputs {
    pub dir: PathBuf,
}

impl Inputs {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

fn write_lexicon(lex: &EmotionLexicon, path: &Path) {
    lex.save(path).unwrap();
}

/// Source corpus, ciphered target test set, both embedding spaces,
/// a bitext, lexicons, a dictionary and a pivot map.
pub fn write_inputs(dir: &Path) -> Inputs {
    let labels = LabelSet::default();
    let w = SynthWorld::standard(5).unwrap();
    let cipher = Cipher::new(w.vocabulary(), "tgt", 6);
    let train = w.genre_mix_corpus(240, 7).unwrap();
    let test = cipher.corpus(&w.genre_mix_corpus(90, 8).unwrap()).unwrap();
    save_documents(train.documents(), &labels, &dir.join("train.jsonl"), CorpusFormat::Jsonl).unwrap();
    save_documents(test.documents(), &labels, &dir.join("test.jsonl"), CorpusFormat::Jsonl).unwrap();
    w.space.save_word2vec(&dir.join("src.vec")).unwrap();
    cipher.space(&w.space).unwrap().save_word2vec(&dir.join("tgt.vec")).unwrap();
    let (src, tgt) = bitext_lines(&cipher.bitext(&w.sentences(200, 9), "en"));
    std::fs::write(dir.join("par.src"), src).unwrap();
    std::fs::write(dir.join("par.tgt"), tgt).unwrap();
    write_lexicon(&w.lexicon, &dir.join("src_lex.tsv"));
    write_lexicon(&cipher.lexicon(&w.lexicon), &dir.join("tgt_lex.tsv"));
    cipher.dictionary().save(&dir.join("dict.tsv")).unwrap();
    let pivot: String = cipher.inverse_pivot().iter().map(|(t, p)| format!("{t}\t{p}\n")).collect();
    std::fs::write(dir.join("pivot.tsv"), pivot).unwrap();
    Inputs { dir: dir.to_path_buf() }
}

/// A model small enough for a run of a few seconds.
pub const SMALL_MODEL: &[&str] = &[
    "--hidden", "8", "--attention", "8", "--mlp", "8,8", "--max-epochs", "3", "--batch-size", "16",
];

pub fn xlemo(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xlemo"))
        .args(args)
        .env_remove("XLEMO_SEED")
        .output()
        .unwrap()
}

pub fn strings(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

pub fn transfer_args(inp: &Inputs, out: &Path) -> Vec<String> {
    let mut a = strings(&["transfer", "--train"]);
    a.push(inp.arg("train.jsonl"));
    a.extend(["--test".into(), inp.arg("test.jsonl")]);
    a.extend(["--src-embeddings".into(), inp.arg("src.vec")]);
    a.extend(["--tgt-embeddings".into(), inp.arg("tgt.vec")]);
    a.extend(["--out".into(), out.display().to_string(), "--seed".into(), "7".into()]);
    a.extend(strings(SMALL_MODEL));
    a
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}
