//! Emotion classifier: a bidirectional Elman RNN with additive attention
//! feeding a ReLU MLP and a softmax layer, plus two pooled variants that
//! skip the recurrence.
//!
//! Embeddings are frozen and looked up from a [`VectorSpace`](crate::align::VectorSpace);
//! out-of-vocabulary tokens read as zero vectors and receive no attention.

mod backward;
mod features;
mod forward;
mod params;
mod train;

pub use backward::{loss_and_gradients, DropoutSampler};
pub use features::{Dataset, Encoding, Featurizer, SentenceInput};
pub use forward::{forward, Forward};
pub use params::{ClassifierParams, Dense, EncodingMode, ModelConfig, Weights, INIT_RANGE};
pub use train::{predict, train, Prediction, TrainConfig, TrainReport};
