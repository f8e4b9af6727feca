use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::LabelSet;
use crate::lexicon::AF24_DIM;
use crate::num::Scalar;

/// Half-width of the uniform weight initialization interval.
pub const INIT_RANGE: f64 = 0.08;

/// How a document becomes the fixed-size vector the MLP sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    /// Bidirectional RNN states pooled by additive attention.
    BirnnAttention,
    /// Mean of the in-vocabulary token embeddings.
    MeanPoolMlp,
    /// A vector supplied per document (e.g. sentence encoder output).
    PrecomputedVectors,
}

impl FromStr for EncodingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().replace('-', "_").as_str() {
            "birnn_attention" | "birnn" => Ok(EncodingMode::BirnnAttention),
            "mean_pool_mlp" | "mean_pool" => Ok(EncodingMode::MeanPoolMlp),
            "precomputed_vectors" | "precomputed" => Ok(EncodingMode::PrecomputedVectors),
            other => Err(Error::InvalidArgument(format!("unknown encoding mode `{other}`"))),
        }
    }
}

/// Layer sizes and options; everything needed to rebuild the weight shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub mode: EncodingMode,
    /// Word embedding dimension, or sentence vector dimension in
    /// precomputed mode.
    pub input_dim: usize,
    /// Units per RNN direction.
    pub hidden: usize,
    pub attention: usize,
    pub mlp: Vec<usize>,
    pub use_af24: bool,
    pub labels: LabelSet,
}

impl ModelConfig {
    /// 70 recurrent units per direction, 50 attention units, three ReLU
    /// layers of 50.
    pub fn standard(mode: EncodingMode, input_dim: usize, labels: LabelSet) -> Self {
        ModelConfig {
            mode,
            input_dim,
            hidden: 70,
            attention: 50,
            mlp: vec![50, 50, 50],
            use_af24: false,
            labels,
        }
    }

    pub fn with_af24(mut self, on: bool) -> Self {
        self.use_af24 = on;
        self
    }

    /// Width of the pooled sentence representation.
    pub fn context_dim(&self) -> usize {
        match self.mode {
            EncodingMode::BirnnAttention => 2 * self.hidden,
            EncodingMode::MeanPoolMlp | EncodingMode::PrecomputedVectors => self.input_dim,
        }
    }

    /// Width of the first MLP input (context plus optional lexicon features).
    pub fn mlp_input_dim(&self) -> usize {
        self.context_dim() + if self.use_af24 { AF24_DIM } else { 0 }
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.input_dim == 0 {
            return bad("input dimension must be positive");
        }
        if self.mode == EncodingMode::BirnnAttention && (self.hidden == 0 || self.attention == 0) {
            return bad("recurrent and attention sizes must be positive");
        }
        if self.mlp.contains(&0) {
            return bad("MLP layer sizes must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Dense<T: Scalar> {
    /// `out × in`
    pub w: Array2<T>,
    pub b: Array1<T>,
}

impl<T: Scalar> Dense<T> {
    fn zeros(out: usize, inp: usize) -> Self {
        Dense {
            w: Array2::zeros((out, inp)),
            b: Array1::zeros(out),
        }
    }
}

/// All trainable tensors. Gradients and optimizer moments use the same type.
/// The recurrent and attention tensors are empty in the pooled modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Weights<T: Scalar> {
    /// `h × d`
    pub fwd_in: Array2<T>,
    /// `h × h`
    pub fwd_rec: Array2<T>,
    pub fwd_bias: Array1<T>,
    pub bwd_in: Array2<T>,
    pub bwd_rec: Array2<T>,
    pub bwd_bias: Array1<T>,
    /// `a × 2h`
    pub attn_proj: Array2<T>,
    pub attn_bias: Array1<T>,
    /// `a`
    pub attn_score: Array1<T>,
    pub hidden: Vec<Dense<T>>,
    pub output: Dense<T>,
}

impl<T: Scalar> Weights<T> {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        let (h, a, d) = match cfg.mode {
            EncodingMode::BirnnAttention => (cfg.hidden, cfg.attention, cfg.input_dim),
            _ => (0, 0, 0),
        };
        let mut hidden = Vec::new();
        let mut inp = cfg.mlp_input_dim();
        for &n in &cfg.mlp {
            hidden.push(Dense::zeros(n, inp));
            inp = n;
        }
        Weights {
            fwd_in: Array2::zeros((h, d)),
            fwd_rec: Array2::zeros((h, h)),
            fwd_bias: Array1::zeros(h),
            bwd_in: Array2::zeros((h, d)),
            bwd_rec: Array2::zeros((h, h)),
            bwd_bias: Array1::zeros(h),
            attn_proj: Array2::zeros((a, 2 * h)),
            attn_bias: Array1::zeros(a),
            attn_score: Array1::zeros(a),
            hidden,
            output: Dense::zeros(cfg.num_labels(), inp),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.for_each_mut(|x| *x = T::zero());
        z
    }

    /// Every tensor as a flat slice, in a fixed order.
    pub fn tensors(&self) -> Vec<&[T]> {
        let mut v: Vec<&[T]> = vec![
            self.fwd_in.as_slice().unwrap(),
            self.fwd_rec.as_slice().unwrap(),
            self.fwd_bias.as_slice().unwrap(),
            self.bwd_in.as_slice().unwrap(),
            self.bwd_rec.as_slice().unwrap(),
            self.bwd_bias.as_slice().unwrap(),
            self.attn_proj.as_slice().unwrap(),
            self.attn_bias.as_slice().unwrap(),
            self.attn_score.as_slice().unwrap(),
        ];
        for l in &self.hidden {
            v.push(l.w.as_slice().unwrap());
            v.push(l.b.as_slice().unwrap());
        }
        v.push(self.output.w.as_slice().unwrap());
        v.push(self.output.b.as_slice().unwrap());
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut v: Vec<&mut [T]> = vec![
            self.fwd_in.as_slice_mut().unwrap(),
            self.fwd_rec.as_slice_mut().unwrap(),
            self.fwd_bias.as_slice_mut().unwrap(),
            self.bwd_in.as_slice_mut().unwrap(),
            self.bwd_rec.as_slice_mut().unwrap(),
            self.bwd_bias.as_slice_mut().unwrap(),
            self.attn_proj.as_slice_mut().unwrap(),
            self.attn_bias.as_slice_mut().unwrap(),
            self.attn_score.as_slice_mut().unwrap(),
        ];
        for l in &mut self.hidden {
            v.push(l.w.as_slice_mut().unwrap());
            v.push(l.b.as_slice_mut().unwrap());
        }
        v.push(self.output.w.as_slice_mut().unwrap());
        v.push(self.output.b.as_slice_mut().unwrap());
        v
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut T)) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(&mut f);
        }
    }

    /// `self += other`, tensor by tensor.
    pub fn add_assign(&mut self, other: &Weights<T>) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: T) {
        self.for_each_mut(|x| *x *= s);
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

/// A classifier's configuration, initialization seed and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClassifierParams<T: Scalar> {
    pub config: ModelConfig,
    pub seed: u64,
    pub weights: Weights<T>,
}

impl<T: Scalar> ClassifierParams<T> {
    /// Weights drawn uniformly from `[-INIT_RANGE, INIT_RANGE]`, biases zero.
    ///
    /// The lexicon-feature columns of the first MLP layer start at zero and
    /// consume no random draws, so switching af24 on leaves every other
    /// initial weight unchanged.
    pub fn init(config: ModelConfig, seed: u64) -> Result<Self> {
        Self::init_with_range(config, seed, INIT_RANGE)
    }

    pub fn init_with_range(config: ModelConfig, seed: u64, range: f64) -> Result<Self> {
        config.validate()?;
        let mut w = Weights::zeros(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |a: &mut Array2<T>, cols: usize| {
            for mut row in a.rows_mut() {
                for x in row.iter_mut().take(cols) {
                    *x = T::lit(rng.gen_range(-range..=range));
                }
            }
        };
        for m in [&mut w.fwd_in, &mut w.fwd_rec, &mut w.bwd_in, &mut w.bwd_rec, &mut w.attn_proj] {
            let c = m.ncols();
            draw(m, c);
        }
        let mut score = w.attn_score.clone().insert_axis(ndarray::Axis(0));
        let c = score.ncols();
        draw(&mut score, c);
        w.attn_score = score.row(0).to_owned();
        let ctx = config.context_dim();
        for (i, l) in w.hidden.iter_mut().enumerate() {
            let cols = if i == 0 { ctx } else { l.w.ncols() };
            draw(&mut l.w, cols);
        }
        let c = w.output.w.ncols();
        draw(&mut w.output.w, c);
        Ok(ClassifierParams {
            config,
            seed,
            weights: w,
        })
    }

    /// All weights zero; its output is exactly uniform.
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(ClassifierParams {
            weights: Weights::zeros(&config),
            config,
            seed: 0,
        })
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer(&mut w, self)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let p: Self = serde_json::from_reader(BufReader::new(file))?;
        let expected = Weights::<T>::zeros(&p.config);
        let shapes_ok = expected
            .tensors()
            .iter()
            .zip(p.weights.tensors())
            .all(|(a, b)| a.len() == b.len())
            && expected.hidden.len() == p.weights.hidden.len();
        if !shapes_ok {
            return Err(Error::InvalidArgument(format!(
                "{}: weight shapes do not match the stored configuration",
                path.display()
            )));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ModelConfig {
        ModelConfig::standard(EncodingMode::BirnnAttention, 300, LabelSet::default())
    }

    #[test]
    fn standard_shapes() {
        let p = ClassifierParams::<f64>::init(cfg(), 1).unwrap();
        let w = &p.weights;
        assert_eq!(w.fwd_in.dim(), (70, 300));
        assert_eq!(w.attn_proj.dim(), (50, 140));
        assert_eq!(w.hidden.len(), 3);
        assert_eq!(w.hidden[0].w.dim(), (50, 140));
        assert_eq!(w.output.w.dim(), (3, 50));
        assert!(w.tensors().iter().all(|t| t.iter().all(|x| x.abs() <= INIT_RANGE)));
    }

    #[test]
    fn af24_columns_start_at_zero_and_leave_rest_unchanged() {
        let plain = ClassifierParams::<f64>::init(cfg(), 9).unwrap();
        let lex = ClassifierParams::<f64>::init(cfg().with_af24(true), 9).unwrap();
        assert_eq!(lex.weights.hidden[0].w.dim(), (50, 164));
        for r in 0..50 {
            for c in 0..140 {
                assert_eq!(lex.weights.hidden[0].w[[r, c]], plain.weights.hidden[0].w[[r, c]]);
            }
            for c in 140..164 {
                assert_eq!(lex.weights.hidden[0].w[[r, c]], 0.0);
            }
        }
        assert_eq!(lex.weights.output, plain.weights.output);
    }

    #[test]
    fn pooled_modes_have_no_recurrent_weights() {
        let c = ModelConfig::standard(EncodingMode::MeanPoolMlp, 10, LabelSet::default());
        let p = ClassifierParams::<f32>::init(c, 0).unwrap();
        assert_eq!(p.weights.fwd_in.len(), 0);
        assert_eq!(p.weights.hidden[0].w.ncols(), 10);
    }

    #[test]
    fn json_round_trip() {
        let p = ClassifierParams::<f64>::init(
            ModelConfig {
                hidden: 3,
                attention: 2,
                mlp: vec![4],
                ..ModelConfig::standard(EncodingMode::BirnnAttention, 5, LabelSet::default())
            },
            3,
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        p.save_json(f.path()).unwrap();
        assert_eq!(ClassifierParams::<f64>::load_json(f.path()).unwrap(), p);
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg();
        c.mlp = vec![0];
        assert!(ClassifierParams::<f64>::init(c, 0).is_err());
    }
}
