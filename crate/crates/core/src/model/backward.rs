use ndarray::{s, Array1, Array2, ArrayView1};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::features::{Encoding, SentenceInput};
use super::forward::{forward_masked, Forward};
use super::params::{ClassifierParams, EncodingMode, Weights};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Dropout on the inputs of every hidden MLP layer.
///
/// The lexicon-feature block of the first layer draws from a separate
/// stream, so toggling af24 leaves the masks of every other unit unchanged.
#[derive(Debug, Clone)]
pub struct DropoutSampler {
    pub rate: f64,
    pub rng: ChaCha8Rng,
    pub aux: ChaCha8Rng,
}

impl DropoutSampler {
    pub(crate) fn draw<T: Scalar>(&mut self, params: &ClassifierParams<T>) -> Vec<Array1<T>> {
        let cfg = &params.config;
        let keep = T::lit(1.0 / (1.0 - self.rate));
        let ctx = cfg.context_dim();
        let mut masks = Vec::with_capacity(cfg.mlp.len());
        for (l, layer) in params.weights.hidden.iter().enumerate() {
            let n = layer.w.ncols();
            let mut m = Array1::zeros(n);
            for (i, x) in m.iter_mut().enumerate() {
                let rng = if l == 0 && i >= ctx { &mut self.aux } else { &mut self.rng };
                *x = if rng.gen::<f64>() < self.rate { T::zero() } else { keep };
            }
            masks.push(m);
        }
        masks
    }
}

/// `dw += a bᵀ`
fn outer_acc<T: Scalar>(dw: &mut Array2<T>, a: &Array1<T>, b: ArrayView1<'_, T>) {
    for (mut row, &ai) in dw.rows_mut().into_iter().zip(a) {
        if ai != T::zero() {
            row.scaled_add(ai, &b);
        }
    }
}

/// Cross-entropy of one example and its gradient.
pub(crate) fn example_gradients<T: Scalar>(
    params: &ClassifierParams<T>,
    input: &SentenceInput<T>,
    label: usize,
    masks: Option<&[Array1<T>]>,
) -> Result<(T, Weights<T>)> {
    let f = forward_masked(params, input, masks)?;
    let loss = -f.probs[label].ln();
    let mut g = params.weights.zeros_like();
    if f.degenerate {
        return Ok((loss, g));
    }
    let w = &params.weights;

    let mut d: Array1<T> = Array1::from(f.probs.clone());
    d[label] -= T::one();
    let last = f.layer_inputs.last().unwrap();
    outer_acc(&mut g.output.w, &d, last.view());
    g.output.b += &d;
    d = w.output.w.t().dot(&d);

    for l in (0..w.hidden.len()).rev() {
        let pre = &f.pre_activations[l];
        let dpre = Array1::from_shape_fn(pre.len(), |i| if pre[i] > T::zero() { d[i] } else { T::zero() });
        outer_acc(&mut g.hidden[l].w, &dpre, f.layer_inputs[l].view());
        g.hidden[l].b += &dpre;
        d = w.hidden[l].w.t().dot(&dpre);
        if let Some(m) = masks {
            d *= &m[l];
        }
    }

    if params.config.mode == EncodingMode::BirnnAttention {
        let ctx = params.config.context_dim();
        let dc = d.slice(s![..ctx]).to_owned();
        let Encoding::Sequence { embeddings, known } = &input.encoding else {
            unreachable!("forward accepted a sequence")
        };
        recurrent_backward(w, &mut g, &f, embeddings, known, &dc);
    }
    Ok((loss, g))
}

fn recurrent_backward<T: Scalar>(
    w: &Weights<T>,
    g: &mut Weights<T>,
    f: &Forward<T>,
    x: &Array2<T>,
    known: &[bool],
    dc: &Array1<T>,
) {
    let len = x.nrows();
    let h = w.fwd_bias.len();
    let hstate = |t: usize| ndarray::concatenate![ndarray::Axis(0), f.fwd_states[t], f.bwd_states[t]];
    let one = T::one();

    // attention
    let positions: Vec<usize> = (0..len).filter(|&t| known[t]).collect();
    let dalpha: Vec<T> = positions.iter().map(|&t| dc.dot(&hstate(t))).collect();
    let mean: T = positions
        .iter()
        .zip(&dalpha)
        .map(|(&t, &da)| f.attention[t] * da)
        .sum();
    let mut dh: Vec<Array1<T>> = vec![Array1::zeros(2 * h); len];
    for (&t, &da) in positions.iter().zip(&dalpha) {
        let a = f.attention[t];
        let ds = a * (da - mean);
        let u = &f.attn_hidden[t];
        g.attn_score.scaled_add(ds, u);
        let dpre = Array1::from_shape_fn(u.len(), |i| ds * w.attn_score[i] * (one - u[i] * u[i]));
        let ht = hstate(t);
        outer_acc(&mut g.attn_proj, &dpre, ht.view());
        g.attn_bias += &dpre;
        dh[t] = dc * a + w.attn_proj.t().dot(&dpre);
    }

    // forward direction, reverse time
    let mut carry = Array1::zeros(h);
    for t in (0..len).rev() {
        let hs = &f.fwd_states[t];
        let grad = &dh[t].slice(s![..h]) + &carry;
        let dz = Array1::from_shape_fn(h, |i| grad[i] * (one - hs[i] * hs[i]));
        if known[t] {
            outer_acc(&mut g.fwd_in, &dz, x.row(t));
        }
        if t > 0 {
            outer_acc(&mut g.fwd_rec, &dz, f.fwd_states[t - 1].view());
        }
        g.fwd_bias += &dz;
        carry = w.fwd_rec.t().dot(&dz);
    }

    // backward direction, forward time
    let mut carry = Array1::zeros(h);
    for t in 0..len {
        let hs = &f.bwd_states[t];
        let grad = &dh[t].slice(s![h..]) + &carry;
        let dz = Array1::from_shape_fn(h, |i| grad[i] * (one - hs[i] * hs[i]));
        if known[t] {
            outer_acc(&mut g.bwd_in, &dz, x.row(t));
        }
        if t + 1 < len {
            outer_acc(&mut g.bwd_rec, &dz, f.bwd_states[t + 1].view());
        }
        g.bwd_bias += &dz;
        carry = w.bwd_rec.t().dot(&dz);
    }
}

/// Mean cross-entropy over `batch` and its exact gradient.
///
/// With a sampler, one dropout mask set is drawn per example in batch order
/// before any work is done. Examples are then processed in parallel and
/// their gradients summed in batch order, so results do not depend on
/// thread scheduling.
pub fn loss_and_gradients<T: Scalar>(
    params: &ClassifierParams<T>,
    batch: &[(&SentenceInput<T>, usize)],
    dropout: Option<&mut DropoutSampler>,
) -> Result<(T, Weights<T>)> {
    if batch.is_empty() {
        return Err(Error::Empty("batch has no examples".into()));
    }
    let k = params.config.num_labels();
    if let Some(&(_, bad)) = batch.iter().find(|(_, y)| *y >= k) {
        return Err(Error::InvalidArgument(format!("label index {bad} out of range")));
    }
    let masks: Option<Vec<Vec<Array1<T>>>> = dropout.map(|s| batch.iter().map(|_| s.draw(params)).collect());
    let parts: Vec<Result<(T, Weights<T>)>> = batch
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| example_gradients(params, x, *y, masks.as_ref().map(|m| m[i].as_slice())))
        .collect();
    let mut total_loss = T::zero();
    let mut grad = params.weights.zeros_like();
    for part in parts {
        let (l, g) = part?;
        total_loss += l;
        grad.add_assign(&g);
    }
    let n = T::lit(batch.len() as f64);
    grad.scale(T::one() / n);
    Ok((total_loss / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::LabelSet;
    use crate::model::params::ModelConfig;
    use ndarray::array;
    use rand::SeedableRng;

    fn tiny(mode: EncodingMode, af24: bool) -> ClassifierParams<f64> {
        let cfg = ModelConfig {
            mode,
            input_dim: 3,
            hidden: 2,
            attention: 2,
            mlp: vec![4, 3],
            use_af24: af24,
            labels: LabelSet::default(),
        };
        let mut p = ClassifierParams::init_with_range(cfg, 17, 0.6).unwrap();
        // non-zero biases keep ReLUs away from their kinks and exercise bias paths
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for l in &mut p.weights.hidden {
            l.b.mapv_inplace(|_| rng.gen_range(0.05..0.3));
        }
        if af24 {
            for r in 0..p.weights.hidden[0].w.nrows() {
                for c in p.config.context_dim()..p.weights.hidden[0].w.ncols() {
                    p.weights.hidden[0].w[[r, c]] = rng.gen_range(-0.5..0.5);
                }
            }
        }
        p
    }

    fn batch_inputs(af24: bool) -> Vec<(SentenceInput<f64>, usize)> {
        let mut f = Array1::zeros(24);
        f[12] = 1.0;
        f[3] = 1.0;
        let mut xs = vec![
            (
                SentenceInput::sequence(
                    array![[0.5, -1.0, 0.3], [0.0, 0.0, 0.0], [1.2, 0.4, -0.7], [-0.3, 0.8, 0.1]],
                    vec![true, false, true, true],
                ),
                2,
            ),
            (SentenceInput::sequence(array![[0.9, 0.1, -0.4]], vec![true]), 0),
        ];
        if af24 {
            for (x, _) in &mut xs {
                x.af24 = Some(f.clone());
            }
        }
        xs
    }

    fn loss_only(p: &ClassifierParams<f64>, batch: &[(&SentenceInput<f64>, usize)]) -> f64 {
        batch
            .iter()
            .map(|(x, y)| -forward_masked(p, x, None).unwrap().probs[*y].ln())
            .sum::<f64>()
            / batch.len() as f64
    }

    fn max_rel_error(p: &ClassifierParams<f64>, batch: &[(&SentenceInput<f64>, usize)]) -> f64 {
        let (_, grad) = loss_and_gradients(p, batch, None).unwrap();
        let eps = 1e-5;
        let mut worst = 0.0f64;
        let analytic: Vec<Vec<f64>> = grad.tensors().iter().map(|t| t.to_vec()).collect();
        let shapes: Vec<usize> = analytic.iter().map(Vec::len).collect();
        for (ti, &n) in shapes.iter().enumerate() {
            for j in 0..n {
                let mut plus = p.clone();
                plus.weights.tensors_mut()[ti][j] += eps;
                let mut minus = p.clone();
                minus.weights.tensors_mut()[ti][j] -= eps;
                let numeric = (loss_only(&plus, batch) - loss_only(&minus, batch)) / (2.0 * eps);
                let a = analytic[ti][j];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                worst = worst.max(rel);
            }
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (mode, af24) in [
            (EncodingMode::BirnnAttention, false),
            (EncodingMode::BirnnAttention, true),
            (EncodingMode::MeanPoolMlp, false),
        ] {
            let p = tiny(mode, af24);
            assert!(p.weights.num_params() <= 200);
            let data = batch_inputs(af24);
            let batch: Vec<(&SentenceInput<f64>, usize)> = data.iter().map(|(x, y)| (x, *y)).collect();
            let err = max_rel_error(&p, &batch);
            assert!(err < 1e-4, "{mode:?} af24={af24}: {err}");
        }
    }

    #[test]
    fn uniform_output_loss_is_ln3() {
        let p = ClassifierParams::<f64>::zeros(tiny(EncodingMode::BirnnAttention, false).config).unwrap();
        let data = batch_inputs(false);
        let batch: Vec<_> = data.iter().map(|(x, y)| (x, *y)).collect();
        let (loss, _) = loss_and_gradients(&p, &batch, None).unwrap();
        assert!((loss - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn duplicating_batch_keeps_loss_and_gradient() {
        let p = tiny(EncodingMode::BirnnAttention, false);
        let data = batch_inputs(false);
        let once: Vec<_> = data.iter().map(|(x, y)| (x, *y)).collect();
        let twice: Vec<_> = once.iter().chain(&once).copied().collect();
        let (l1, g1) = loss_and_gradients(&p, &once, None).unwrap();
        let (l2, g2) = loss_and_gradients(&p, &twice, None).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.tensors().iter().zip(g2.tensors()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dropout_is_seeded() {
        let p = tiny(EncodingMode::BirnnAttention, false);
        let data = batch_inputs(false);
        let batch: Vec<_> = data.iter().map(|(x, y)| (x, *y)).collect();
        let sampler = || DropoutSampler {
            rate: 0.5,
            rng: ChaCha8Rng::seed_from_u64(1),
            aux: ChaCha8Rng::seed_from_u64(2),
        };
        let a = loss_and_gradients(&p, &batch, Some(&mut sampler())).unwrap();
        let b = loss_and_gradients(&p, &batch, Some(&mut sampler())).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn empty_batch_rejected() {
        let p = tiny(EncodingMode::BirnnAttention, false);
        assert!(loss_and_gradients(&p, &[], None).is_err());
    }
}
