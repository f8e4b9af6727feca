use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xlemo::model::{forward, predict, ClassifierParams, Dataset, EncodingMode, Featurizer, ModelConfig, SentenceInput, TrainConfig};
use xlemo::pipeline::{direct_transfer, TransferConfig};
use xlemo::synth::{SynthWorld, WorldConfig};
use xlemo::{LabelSet, VectorSpace32};

fn small(dim: usize, labels: LabelSet) -> ModelConfig {
    ModelConfig {
        hidden: 12,
        attention: 8,
        mlp: vec![16],
        ..ModelConfig::standard(EncodingMode::BirnnAttention, dim, labels)
    }
}

#[test]
fn eight_label_transfer_learns() {
    let labels = LabelSet::plutchik();
    let world = SynthWorld::new(labels.clone(), WorldConfig::default(), 21).unwrap();
    let train = world.corpus_with_counts(&[60; 8], "en", 22).unwrap();
    let test = world.corpus_with_counts(&[20; 8], "en", 23).unwrap();
    let cfg = TransferConfig::new(
        small(world.config.dim, labels.clone()),
        TrainConfig { max_epochs: 30, learning_rate: 1e-2, ..TrainConfig::default() },
    );
    let run = direct_transfer(&train, &world.space, &world.space, None, &test, None, &cfg).unwrap();
    assert_eq!(run.report.f1.len(), 8);
    assert!(run.report.weighted_f1 > 0.6, "{:?}", run.report.f1);
}

#[test]
fn single_precision_matches_double() {
    let cfg = small(5, LabelSet::default());
    let p64 = ClassifierParams::<f64>::init(cfg.clone(), 4).unwrap();
    let p32: ClassifierParams<f32> = serde_json::from_str(&serde_json::to_string(&p64).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for len in [1, 4, 9] {
        let x = Array2::from_shape_fn((len, 5), |_| rng.gen_range(-1.0..1.0));
        let a = forward(&p64, &SentenceInput::sequence(x.clone(), vec![true; len])).unwrap();
        let b = forward(&p32, &SentenceInput::sequence(x.mapv(|v| v as f32), vec![true; len])).unwrap();
        for (u, v) in a.probs.iter().zip(b.probs.iter()) {
            assert!((u - f64::from(*v)).abs() < 1e-5);
        }
    }
}

#[test]
fn single_precision_training_runs() {
    let world = SynthWorld::standard(31).unwrap();
    let corpus = world.genre_mix_corpus(200, 32).unwrap();
    let words = world.space.words().to_vec();
    let space = VectorSpace32::new("en", words, world.space.matrix().mapv(|v| v as f32)).unwrap();
    let feat = Featurizer::new(EncodingMode::BirnnAttention, &space);
    let data = Dataset::from_corpus(&corpus, &feat).unwrap();
    let init = ClassifierParams::<f32>::init(small(world.config.dim, LabelSet::default()), 1).unwrap();
    let (params, report) = train_f32(&data, init);
    assert!(report.epoch_losses.last().unwrap() < report.epoch_losses.first().unwrap());
    let preds = predict(&params, &data.inputs).unwrap();
    let acc = preds.iter().zip(&data.labels).filter(|(p, y)| p.index == **y).count() as f64 / data.len() as f64;
    assert!(acc > 0.7, "{acc}");
}

fn train_f32(data: &Dataset<f32>, init: ClassifierParams<f32>) -> (ClassifierParams<f32>, xlemo::model::TrainReport) {
    xlemo::model::train(data, init, &TrainConfig { max_epochs: 20, learning_rate: 1e-2, ..TrainConfig::default() }).unwrap()
}
