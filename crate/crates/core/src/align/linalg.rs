//! Small dense helpers over `nalgebra`'s SVD.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::num::Scalar;

const MAX_SVD_ITERATIONS: usize = 10_000;

/// The orthogonal factor `U Vᵀ` of a square matrix `m = U Σ Vᵀ`: the
/// orthogonal matrix nearest to `m` in Frobenius norm. Computed in double
/// precision whatever `T` is.
pub fn orthogonal_factor<T: Scalar>(m: &Array2<T>) -> Result<Array2<T>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    let a = DMatrix::from_fn(r, c, |i, j| m[[i, j]].as_f64());
    let svd = nalgebra::SVD::try_new(a, true, true, f64::EPSILON, MAX_SVD_ITERATIONS)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numeric("SVD did not produce singular vectors".into())),
    };
    let w = u * v_t;
    Ok(Array2::from_shape_fn((r, c), |(i, j)| T::lit(w[(i, j)])))
}

/// max |aᵀa − I|.
pub fn orthogonality_error<T: Scalar>(a: &Array2<T>) -> T {
    let g = a.t().dot(a);
    g.indexed_iter().fold(T::zero(), |acc, ((i, j), &x)| {
        let target = if i == j { T::one() } else { T::zero() };
        acc.max((x - target).abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
    }

    fn max_abs(a: &Array2<f64>) -> f64 {
        a.iter().fold(0.0f64, |x, y| x.max(y.abs()))
    }

    #[test]
    fn factor_is_orthogonal() {
        for n in [1, 3, 10, 50] {
            let w = orthogonal_factor(&random(n, n as u64)).unwrap();
            assert!(orthogonality_error(&w) < 1e-12, "{n}");
        }
    }

    #[test]
    fn orthogonal_input_is_a_fixed_point() {
        let q = orthogonal_factor(&random(6, 1)).unwrap();
        let again = orthogonal_factor(&q).unwrap();
        assert!(max_abs(&(&again - &q)) < 1e-12);
    }

    #[test]
    fn symmetric_positive_definite_gives_identity() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let w = orthogonal_factor(&a).unwrap();
        assert!(max_abs(&(&w - &Array2::<f64>::eye(2))) < 1e-12);
    }

    #[test]
    fn rank_deficient_input_still_orthogonal() {
        let a = array![[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 0.0]];
        assert!(orthogonality_error(&orthogonal_factor(&a).unwrap()) < 1e-12);
        assert!(orthogonality_error(&orthogonal_factor(&Array2::<f64>::zeros((3, 3))).unwrap()) < 1e-12);
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(orthogonal_factor(&Array2::<f64>::zeros((2, 3))).is_err());
    }

    #[test]
    fn works_in_f32() {
        let w = orthogonal_factor(&random(8, 9).mapv(|x| x as f32)).unwrap();
        assert!(orthogonality_error(&w) < 1e-5);
    }
}
