use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::backward::{loss_and_gradients, DropoutSampler};
use super::features::{Dataset, SentenceInput};
use super::forward::forward;
use super::params::{ClassifierParams, Weights};
use crate::error::{Error, Result};
use crate::label::EmotionLabel;
use crate::num::Scalar;

/// Optimizer and stopping settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub dropout: f64,
    /// Stop once the epoch loss changes by less than `tolerance` for this
    /// many consecutive epochs.
    pub patience: usize,
    pub tolerance: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            dropout: 0.1,
            patience: 3,
            tolerance: 1e-4,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_epochs: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if self.patience == 0 || self.max_epochs == 0 {
            return bad("patience and max_epochs must be positive");
        }
        if !(self.learning_rate > 0.0) || !(self.tolerance >= 0.0) || !(self.epsilon > 0.0) {
            return bad("learning rate and epsilon must be positive, tolerance non-negative");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam betas must be in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss of each completed epoch.
    pub epoch_losses: Vec<f64>,
    /// 1-based epoch whose weights were kept (lowest epoch loss).
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.epoch_losses.len()
    }
}

struct Adam<T: Scalar> {
    m: Weights<T>,
    v: Weights<T>,
    t: i32,
}

impl<T: Scalar> Adam<T> {
    fn new(w: &Weights<T>) -> Self {
        Adam {
            m: w.zeros_like(),
            v: w.zeros_like(),
            t: 0,
        }
    }

    fn step(&mut self, w: &mut Weights<T>, g: &Weights<T>, cfg: &TrainConfig) {
        self.t += 1;
        let (b1, b2) = (T::lit(cfg.beta1), T::lit(cfg.beta2));
        let c1 = T::one() - b1.powi(self.t);
        let c2 = T::one() - b2.powi(self.t);
        let lr = T::lit(cfg.learning_rate);
        let eps = T::lit(cfg.epsilon);
        let one = T::one();
        let tensors = w
            .tensors_mut()
            .into_iter()
            .zip(g.tensors())
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut());
        for (((wt, gt), mt), vt) in tensors {
            for i in 0..wt.len() {
                let gi = gt[i];
                mt[i] = b1 * mt[i] + (one - b1) * gi;
                vt[i] = b2 * vt[i] + (one - b2) * gi * gi;
                let mhat = mt[i] / c1;
                let vhat = vt[i] / c2;
                wt[i] -= lr * mhat / (vhat.sqrt() + eps);
            }
        }
    }
}

/// Trains `init` on `data` with mini-batch Adam and cross-entropy.
///
/// Batches are reshuffled every epoch from a stream derived from
/// `config.seed`; dropout uses two further streams. The returned weights are
/// those at the end of the epoch with the lowest mean loss.
pub fn train<T: Scalar>(
    data: &Dataset<T>,
    init: ClassifierParams<T>,
    config: &TrainConfig,
) -> Result<(ClassifierParams<T>, TrainReport)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training set has no documents".into()));
    }
    if data.inputs.len() != data.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: data.inputs.len(),
            found: data.labels.len(),
        });
    }

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(1);
    let mut main = ChaCha8Rng::seed_from_u64(config.seed);
    main.set_stream(2);
    let mut aux = ChaCha8Rng::seed_from_u64(config.seed);
    aux.set_stream(3);
    let mut sampler = DropoutSampler {
        rate: config.dropout,
        rng: main,
        aux,
    };

    let mut params = init;
    let mut adam = Adam::new(&params.weights);
    let mut best = params.clone();
    let mut report = TrainReport {
        epoch_losses: Vec::new(),
        best_epoch: 0,
        stopped_early: false,
    };
    let mut best_loss = f64::INFINITY;
    let mut flat = 0usize;
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&SentenceInput<T>, usize)> =
                chunk.iter().map(|&i| (&data.inputs[i], data.labels[i])).collect();
            let drop = (config.dropout > 0.0).then_some(&mut sampler);
            let (loss, grad) = loss_and_gradients(&params, &batch, drop)?;
            let loss = loss.as_f64();
            if !loss.is_finite() || !grad.all_finite() {
                return Err(Error::Numeric(format!("non-finite loss or gradient in epoch {epoch}")));
            }
            total += loss * chunk.len() as f64;
            adam.step(&mut params.weights, &grad, config);
        }
        if !params.weights.all_finite() {
            return Err(Error::Numeric(format!("non-finite weights after epoch {epoch}")));
        }
        let mean = total / data.len() as f64;
        log::debug!("epoch {epoch}: loss {mean:.6}");
        if let Some(&prev) = report.epoch_losses.last() {
            flat = if (mean - prev).abs() < config.tolerance { flat + 1 } else { 0 };
        }
        report.epoch_losses.push(mean);
        if mean < best_loss {
            best_loss = mean;
            best = params.clone();
            report.best_epoch = epoch;
        }
        if flat >= config.patience {
            report.stopped_early = true;
            break;
        }
    }
    Ok((best, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: EmotionLabel,
    /// Index of `label` in the model's label set.
    pub index: usize,
    /// Class probabilities in label-set order.
    pub probs: Vec<f64>,
    /// No in-vocabulary token; `probs` is uniform.
    pub degenerate: bool,
}

/// Classifies every input; output order matches input order.
pub fn predict<T: Scalar>(params: &ClassifierParams<T>, inputs: &[SentenceInput<T>]) -> Result<Vec<Prediction>> {
    let labels = &params.config.labels;
    inputs
        .par_iter()
        .map(|x| {
            let f = forward(params, x)?;
            let probs: Vec<f64> = f.probs.iter().map(|p| p.as_f64()).collect();
            let index = argmax(&probs);
            Ok(Prediction {
                label: labels.labels()[index],
                index,
                probs,
                degenerate: f.degenerate,
            })
        })
        .collect()
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::LabelSet;
    use crate::model::params::{EncodingMode, ModelConfig};
    use ndarray::Array2;
    use rand::Rng;

    /// Three classes, each keyed by one coordinate of every token vector.
    fn separable(n: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let y = i % 3;
            let len = rng.gen_range(2..6);
            let mut e = Array2::zeros((len, 4));
            for t in 0..len {
                for c in 0..4 {
                    e[[t, c]] = rng.gen_range(-0.2..0.2);
                }
                e[[t, y]] += 1.0;
            }
            inputs.push(SentenceInput::sequence(e, vec![true; len]));
            labels.push(y);
        }
        Dataset { inputs, labels }
    }

    fn small_config() -> ModelConfig {
        ModelConfig {
            hidden: 8,
            attention: 6,
            mlp: vec![10],
            ..ModelConfig::standard(EncodingMode::BirnnAttention, 4, LabelSet::default())
        }
    }

    fn fit(seed: u64) -> (ClassifierParams<f64>, TrainReport) {
        let data = separable(60, 5);
        let init = ClassifierParams::init(small_config(), seed).unwrap();
        let cfg = TrainConfig {
            batch_size: 8,
            learning_rate: 0.01,
            ..TrainConfig::default().with_seed(seed)
        };
        train(&data, init, &cfg).unwrap()
    }

    #[test]
    fn separable_fixture_is_learned() {
        let (p, report) = fit(3);
        assert!(report.epochs() <= 50);
        let data = separable(60, 5);
        let preds = predict(&p, &data.inputs).unwrap();
        let correct = preds.iter().zip(&data.labels).filter(|(p, y)| p.index == **y).count();
        assert_eq!(correct, 60);
        for w in report.epoch_losses.windows(2).skip(1) {
            assert!(w[1] <= w[0] + 1e-3 || w[1] < 0.05, "{:?}", report.epoch_losses);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let a = fit(11);
        let b = fit(11);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn flat_loss_stops_after_patience() {
        // zero learning signal: a single class everywhere with a zero model
        // whose output layer is frozen in place by a vanishing learning rate
        let data = separable(9, 1);
        let init = ClassifierParams::zeros(small_config()).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e-12,
            dropout: 0.0,
            ..TrainConfig::default()
        };
        let (_, report) = train(&data, init, &cfg).unwrap();
        assert_eq!(report.epochs(), 1 + cfg.patience);
        assert!(report.stopped_early);
    }

    #[test]
    fn predictions_keep_input_order() {
        let (p, _) = fit(2);
        let data = separable(12, 8);
        let all = predict(&p, &data.inputs).unwrap();
        for (i, x) in data.inputs.iter().enumerate() {
            assert_eq!(predict(&p, std::slice::from_ref(x)).unwrap()[0], all[i]);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let data = separable(3, 0);
        let init = ClassifierParams::zeros(small_config()).unwrap();
        let cfg = TrainConfig {
            dropout: 1.0,
            ..TrainConfig::default()
        };
        assert!(train(&data, init, &cfg).is_err());
    }
}
