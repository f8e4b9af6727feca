//! Cross-lingual emotion classification toolkit.
//!
//! Two transfer strategies move an emotion classifier from a resource-rich
//! source language to target languages without labeled target data:
//!
//! * annotation projection: label the source side of a parallel corpus with
//!   a source classifier, copy confident labels to the target side and train
//!   a target classifier on them ([`pipeline::annotation_projection`]);
//! * direct transfer: train once in an aligned cross-lingual embedding space,
//!   optionally with lexicon features, and apply the model to target text
//!   ([`pipeline::direct_transfer`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the pipelines use.

pub mod align;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod label;
pub mod lexicon;
pub mod model;
pub mod num;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use label::{EmotionLabel, LabelSet};
pub use num::Scalar;

pub type VectorSpace64 = align::VectorSpace<f64>;
pub type VectorSpace32 = align::VectorSpace<f32>;
pub type AlignmentMap64 = align::AlignmentMap<f64>;
pub type ClassifierParams64 = model::ClassifierParams<f64>;
