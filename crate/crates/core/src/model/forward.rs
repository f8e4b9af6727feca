use ndarray::{Array1, Array2, ArrayView1};

use super::features::{Encoding, SentenceInput};
use super::params::{ClassifierParams, EncodingMode, Weights};
use crate::error::{Error, Result};
use crate::num::{softmax, Scalar};

/// Output of one forward pass, with the intermediate values backpropagation
/// needs.
#[derive(Debug, Clone)]
pub struct Forward<T: Scalar> {
    pub probs: Vec<T>,
    /// Attention weight per token; zero at out-of-vocabulary positions.
    /// Empty in the pooled modes.
    pub attention: Vec<T>,
    /// No in-vocabulary token: the output is uniform and carries no gradient.
    pub degenerate: bool,
    pub(crate) fwd_states: Vec<Array1<T>>,
    pub(crate) bwd_states: Vec<Array1<T>>,
    pub(crate) attn_hidden: Vec<Array1<T>>,
    /// Inputs to each hidden layer after dropout, then the output layer input.
    pub(crate) layer_inputs: Vec<Array1<T>>,
    pub(crate) pre_activations: Vec<Array1<T>>,
}

/// Inference-time forward pass (no dropout).
pub fn forward<T: Scalar>(params: &ClassifierParams<T>, input: &SentenceInput<T>) -> Result<Forward<T>> {
    forward_masked(params, input, None)
}

fn tanh_vec<T: Scalar>(v: Array1<T>) -> Array1<T> {
    v.mapv(T::tanh)
}

fn step<T: Scalar>(
    w_in: &Array2<T>,
    w_rec: &Array2<T>,
    bias: &Array1<T>,
    x: ArrayView1<'_, T>,
    prev: Option<&Array1<T>>,
) -> Array1<T> {
    let mut z = w_in.dot(&x) + bias;
    if let Some(h) = prev {
        z += &w_rec.dot(h);
    }
    tanh_vec(z)
}

pub(crate) fn forward_masked<T: Scalar>(
    params: &ClassifierParams<T>,
    input: &SentenceInput<T>,
    masks: Option<&[Array1<T>]>,
) -> Result<Forward<T>> {
    let cfg = &params.config;
    let w = &params.weights;
    let k = cfg.num_labels();
    let mut out = Forward {
        probs: vec![T::one() / T::lit(k as f64); k],
        attention: Vec::new(),
        degenerate: false,
        fwd_states: Vec::new(),
        bwd_states: Vec::new(),
        attn_hidden: Vec::new(),
        layer_inputs: Vec::new(),
        pre_activations: Vec::new(),
    };

    let context: Array1<T> = match (cfg.mode, &input.encoding) {
        (EncodingMode::PrecomputedVectors, Encoding::Vector(v)) => {
            check_dim(cfg.input_dim, v.len())?;
            v.clone()
        }
        (EncodingMode::PrecomputedVectors, _) => {
            return Err(Error::InvalidArgument("precomputed mode needs a sentence vector".into()))
        }
        (_, Encoding::Vector(_)) => {
            return Err(Error::InvalidArgument("token modes need a token sequence".into()))
        }
        (mode, Encoding::Sequence { embeddings, known }) => {
            check_dim(cfg.input_dim, embeddings.ncols())?;
            if embeddings.nrows() != known.len() {
                return Err(Error::DimensionMismatch {
                    expected: known.len(),
                    found: embeddings.nrows(),
                });
            }
            if !known.iter().any(|&k| k) {
                out.degenerate = true;
                out.attention = vec![T::zero(); known.len()];
                return Ok(out);
            }
            match mode {
                EncodingMode::MeanPoolMlp => mean_pool(embeddings, known),
                _ => attend(w, embeddings, known, &mut out),
            }
        }
    };

    let mut z = context;
    if cfg.use_af24 {
        let f = input
            .af24
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("model expects af24 features".into()))?;
        check_dim(crate::lexicon::AF24_DIM, f.len())?;
        z = ndarray::concatenate![ndarray::Axis(0), z, f.clone()];
    }

    for (l, layer) in w.hidden.iter().enumerate() {
        if let Some(m) = masks {
            z *= &m[l];
        }
        let pre = layer.w.dot(&z) + &layer.b;
        out.layer_inputs.push(z);
        z = pre.mapv(|x| x.max(T::zero()));
        out.pre_activations.push(pre);
    }
    let logits = w.output.w.dot(&z) + &w.output.b;
    out.layer_inputs.push(z);
    out.probs = softmax(logits.as_slice().unwrap());
    Ok(out)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn mean_pool<T: Scalar>(embeddings: &Array2<T>, known: &[bool]) -> Array1<T> {
    let mut acc = Array1::zeros(embeddings.ncols());
    let mut n = 0usize;
    for (row, _) in embeddings.rows().into_iter().zip(known).filter(|(_, k)| **k) {
        acc += &row;
        n += 1;
    }
    acc / T::lit(n as f64)
}

fn attend<T: Scalar>(
    w: &Weights<T>,
    x: &Array2<T>,
    known: &[bool],
    out: &mut Forward<T>,
) -> Array1<T> {
    let len = x.nrows();
    let mut fwd: Vec<Array1<T>> = Vec::with_capacity(len);
    for t in 0..len {
        let h = step(&w.fwd_in, &w.fwd_rec, &w.fwd_bias, x.row(t), fwd.last());
        fwd.push(h);
    }
    let mut bwd: Vec<Array1<T>> = vec![Array1::zeros(0); len];
    for t in (0..len).rev() {
        let prev = if t + 1 < len { Some(&bwd[t + 1]) } else { None };
        bwd[t] = step(&w.bwd_in, &w.bwd_rec, &w.bwd_bias, x.row(t), prev);
    }

    let hstate = |t: usize| ndarray::concatenate![ndarray::Axis(0), fwd[t], bwd[t]];
    let mut scores = Vec::new();
    let mut positions = Vec::new();
    let mut attn_hidden = vec![Array1::zeros(0); len];
    for t in (0..len).filter(|&t| known[t]) {
        let u = tanh_vec(w.attn_proj.dot(&hstate(t)) + &w.attn_bias);
        scores.push(w.attn_score.dot(&u));
        attn_hidden[t] = u;
        positions.push(t);
    }
    let alpha = softmax(&scores);
    let mut attention = vec![T::zero(); len];
    let mut context = Array1::zeros(2 * w.fwd_bias.len());
    for (&t, &a) in positions.iter().zip(&alpha) {
        attention[t] = a;
        context.scaled_add(a, &hstate(t));
    }
    out.fwd_states = fwd;
    out.bwd_states = bwd;
    out.attn_hidden = attn_hidden;
    out.attention = attention;
    context
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::LabelSet;
    use crate::model::params::{Dense, ModelConfig};
    use ndarray::{array, Array2};

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            mode: EncodingMode::BirnnAttention,
            input_dim: 2,
            hidden: 1,
            attention: 1,
            mlp: vec![2],
            use_af24: false,
            labels: LabelSet::default(),
        }
    }

    #[test]
    fn zero_weights_give_uniform() {
        let p = ClassifierParams::<f64>::zeros(tiny_config()).unwrap();
        let x = SentenceInput::sequence(array![[1.0, 2.0], [3.0, -1.0]], vec![true, true]);
        let f = forward(&p, &x).unwrap();
        assert!(f.probs.iter().all(|&q| q == 1.0 / 3.0));
        assert!(!f.degenerate);
    }

    /// Tiny network evaluated with scalar arithmetic written out by hand.
    #[test]
    fn matches_hand_computation() {
        let mut p = ClassifierParams::<f64>::zeros(tiny_config()).unwrap();
        let w = &mut p.weights;
        w.fwd_in = array![[0.5, -0.3]];
        w.fwd_rec = array![[0.2]];
        w.fwd_bias = array![0.1];
        w.bwd_in = array![[-0.4, 0.6]];
        w.bwd_rec = array![[0.3]];
        w.bwd_bias = array![-0.05];
        w.attn_proj = array![[0.7, -0.2]];
        w.attn_bias = array![0.05];
        w.attn_score = array![1.5];
        w.hidden = vec![Dense {
            w: array![[0.4, -0.6], [0.9, 0.3]],
            b: array![0.01, -0.02],
        }];
        w.output = Dense {
            w: array![[1.0, -1.0], [0.5, 0.5], [-0.3, 0.8]],
            b: array![0.0, 0.1, -0.1],
        };
        let x1 = [1.0f64, 2.0];
        let x2 = [-0.5f64, 0.25];
        let input = SentenceInput::sequence(array![[x1[0], x1[1]], [x2[0], x2[1]]], vec![true, true]);

        let hf1 = (0.5 * x1[0] - 0.3 * x1[1] + 0.1f64).tanh();
        let hf2 = (0.5 * x2[0] - 0.3 * x2[1] + 0.2 * hf1 + 0.1f64).tanh();
        let hb2 = (-0.4 * x2[0] + 0.6 * x2[1] - 0.05f64).tanh();
        let hb1 = (-0.4 * x1[0] + 0.6 * x1[1] + 0.3 * hb2 - 0.05f64).tanh();
        let u1 = (0.7 * hf1 - 0.2 * hb1 + 0.05f64).tanh();
        let u2 = (0.7 * hf2 - 0.2 * hb2 + 0.05f64).tanh();
        let (s1, s2) = (1.5 * u1, 1.5 * u2);
        let a1 = s1.exp() / (s1.exp() + s2.exp());
        let a2 = 1.0 - a1;
        let c = [a1 * hf1 + a2 * hf2, a1 * hb1 + a2 * hb2];
        let r1 = (0.4 * c[0] - 0.6 * c[1] + 0.01f64).max(0.0);
        let r2 = (0.9 * c[0] + 0.3 * c[1] - 0.02f64).max(0.0);
        let z = [r1 - r2, 0.5 * r1 + 0.5 * r2 + 0.1, -0.3 * r1 + 0.8 * r2 - 0.1];
        let e: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        let total: f64 = e.iter().sum();

        let f = forward(&p, &input).unwrap();
        for i in 0..3 {
            assert!((f.probs[i] - e[i] / total).abs() < 1e-9);
        }
        assert!((f.attention[0] - a1).abs() < 1e-12);
        assert!((f.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oov_positions_get_no_attention() {
        let p = ClassifierParams::<f64>::init(tiny_config(), 5).unwrap();
        let x = SentenceInput::sequence(array![[1.0, 2.0], [0.0, 0.0], [0.5, 0.5]], vec![true, false, true]);
        let f = forward(&p, &x).unwrap();
        assert_eq!(f.attention[1], 0.0);
        assert!((f.attention.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(f.attention.iter().all(|&a| a >= 0.0));
    }

    #[test]
    fn all_oov_is_uniform_and_flagged() {
        let p = ClassifierParams::<f64>::init(tiny_config(), 5).unwrap();
        let x = SentenceInput::sequence(Array2::zeros((3, 2)), vec![false; 3]);
        let f = forward(&p, &x).unwrap();
        assert!(f.degenerate);
        assert!(f.probs.iter().all(|&q| q == 1.0 / 3.0));
        let empty = SentenceInput::sequence(Array2::zeros((0, 2)), vec![]);
        assert!(forward(&p, &empty).unwrap().degenerate);
    }

    #[test]
    fn mean_pool_single_token_is_mlp_of_embedding() {
        let mut cfg = tiny_config();
        cfg.mode = EncodingMode::MeanPoolMlp;
        let pool = ClassifierParams::<f64>::init(cfg.clone(), 11).unwrap();
        let mut pre = pool.clone();
        pre.config.mode = EncodingMode::PrecomputedVectors;
        let seq = SentenceInput::sequence(array![[0.3, -0.7], [9.0, 9.0]], vec![true, false]);
        let vec = SentenceInput::vector(array![0.3, -0.7]);
        assert_eq!(forward(&pool, &seq).unwrap().probs, forward(&pre, &vec).unwrap().probs);
    }

    #[test]
    fn permuting_output_rows_permutes_probabilities() {
        let p = ClassifierParams::<f64>::init(tiny_config(), 2).unwrap();
        let mut q = p.clone();
        let perm = [2usize, 0, 1];
        let ow = &p.weights.output;
        q.weights.output.w = Array2::from_shape_fn(ow.w.dim(), |(i, j)| ow.w[[perm[i], j]]);
        q.weights.output.b = Array1::from_shape_fn(3, |i| ow.b[perm[i]]);
        let x = SentenceInput::sequence(array![[1.0, 0.0], [0.2, 0.4]], vec![true, true]);
        let a = forward(&p, &x).unwrap().probs;
        let b = forward(&q, &x).unwrap().probs;
        for i in 0..3 {
            assert_eq!(b[i], a[perm[i]]);
        }
    }

    #[test]
    fn dimension_and_mode_errors() {
        let p = ClassifierParams::<f64>::init(tiny_config(), 2).unwrap();
        let bad = SentenceInput::sequence(Array2::zeros((2, 3)), vec![true, true]);
        assert!(matches!(forward(&p, &bad), Err(Error::DimensionMismatch { .. })));
        assert!(forward(&p, &SentenceInput::vector(array![1.0, 2.0])).is_err());
        let mut cfg = tiny_config();
        cfg.use_af24 = true;
        let q = ClassifierParams::<f64>::init(cfg, 2).unwrap();
        let x = SentenceInput::sequence(array![[1.0, 0.0]], vec![true]);
        assert!(forward(&q, &x).is_err());
        assert!(forward(&q, &x.with_af24(Array1::zeros(24))).is_ok());
    }
}
