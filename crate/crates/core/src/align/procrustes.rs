use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::dictionary::BilingualDictionary;
use super::linalg::{orthogonal_factor, orthogonality_error};
use super::space::VectorSpace;
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Below this many usable seed pairs the problem is rejected outright.
pub const MIN_SEED_PAIRS: usize = 3;

/// Orthogonal map `W` taking source vectors into the target space (`v ↦ W v`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AlignmentMap<T: Scalar> {
    pub source_language: String,
    pub target_language: String,
    pub matrix: Array2<T>,
    /// Seed pairs the map was fitted on.
    pub seed_pairs: usize,
}

impl<T: Scalar> AlignmentMap<T> {
    pub fn identity(dim: usize, source_language: &str, target_language: &str) -> Self {
        AlignmentMap {
            source_language: source_language.to_string(),
            target_language: target_language.to_string(),
            matrix: Array2::eye(dim),
            seed_pairs: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// max |WᵀW − I|.
    pub fn orthogonality_error(&self) -> T {
        orthogonality_error(&self.matrix)
    }
}

/// Solves `min ‖W X − Y‖_F` over orthogonal `W`, where columns of `X` and `Y`
/// are the vectors of the seed pairs found in both vocabularies.
///
/// With `M = Σ y xᵀ = U Σ Vᵀ` the minimizer is `W = U Vᵀ`. Seed pairs are
/// accumulated in a canonical order, so the result does not depend on how
/// the dictionary is ordered.
pub fn procrustes_align<T: Scalar>(
    src: &VectorSpace<T>,
    tgt: &VectorSpace<T>,
    seed: &BilingualDictionary,
) -> Result<AlignmentMap<T>> {
    let d = src.dim();
    if tgt.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: tgt.dim(),
        });
    }
    let mut pairs: Vec<(usize, usize)> = seed
        .entries()
        .iter()
        .filter_map(|e| Some((src.index_of(&e.source)?, tgt.index_of(&e.target)?)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    if pairs.len() < MIN_SEED_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "only {} seed pairs are in both vocabularies, need at least {MIN_SEED_PAIRS}",
            pairs.len()
        )));
    }
    if pairs.len() < d {
        log::warn!(
            "{} seed pairs for a {d}-dimensional space; the map is underdetermined",
            pairs.len()
        );
    }
    let mut m = Array2::<T>::zeros((d, d));
    for &(i, j) in &pairs {
        let x = src.matrix().row(i);
        let y = tgt.matrix().row(j);
        for (r, &yr) in y.iter().enumerate() {
            let mut row = m.row_mut(r);
            row.scaled_add(yr, &x);
        }
    }
    let w = orthogonal_factor(&m)?;
    let err = orthogonality_error(&w);
    if !(err.as_f64() < 1e-4) {
        return Err(Error::Numeric(format!("Procrustes solution not orthogonal (error {err})")));
    }
    Ok(AlignmentMap {
        source_language: src.language().to_string(),
        target_language: tgt.language().to_string(),
        matrix: w,
        seed_pairs: pairs.len(),
    })
}

/// Applies `map` to every row of `space`; the vocabulary is unchanged.
pub fn map_space<T: Scalar>(space: &VectorSpace<T>, map: &AlignmentMap<T>) -> Result<VectorSpace<T>> {
    if map.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: map.dim(),
        });
    }
    // rows are vᵀ, so (W v)ᵀ = vᵀ Wᵀ
    let mapped = space.matrix().dot(&map.matrix.t());
    let out = space.with_matrix(mapped)?;
    Ok(if space.is_unit_normalized() {
        // an orthogonal map keeps unit rows unit; re-normalizing only trims rounding
        out.normalized()
    } else {
        out
    })
}

/// Random orthogonal `d × d` matrix: the orthogonal factor of a Gaussian
/// matrix.
pub fn random_orthogonal<R: rand::Rng>(d: usize, rng: &mut R) -> Array2<f64> {
    use rand_distr::StandardNormal;
    let g = Array2::from_shape_fn((d, d), |_| rng.sample::<f64, _>(StandardNormal));
    orthogonal_factor(&g).expect("Gaussian matrix decomposes")
}
