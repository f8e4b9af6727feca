//! Word alignment of parallel text and alignment of embedding spaces.

mod dictionary;
mod ibm1;
pub mod linalg;
mod procrustes;
mod retrieve;
mod space;

pub use dictionary::{extract_dictionary, identical_string_seed, BilingualDictionary, DictionaryEntry};
pub use ibm1::{train_ibm1, TranslationTable, NULL_TOKEN};
pub use procrustes::{map_space, procrustes_align, random_orthogonal, AlignmentMap, MIN_SEED_PAIRS};
pub use retrieve::{translate_retrieve, Metric, Retriever, CSLS_NEIGHBORHOOD};
pub use space::{VectorSpace, UNIT_NORM_TOLERANCE};
