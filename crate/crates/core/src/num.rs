//! Scalar abstraction shared by the numeric modules.
//!
//! Embedding spaces, the Procrustes solver and the classifier are written
//! against [`Scalar`] so they run in `f32` or `f64`. Everything that feeds a
//! tolerance-checked result (gradient checks, orthogonality) is exercised in
//! `f64`; the crate root exports `f64` aliases for the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numerically stable softmax over `logits`, written into a new vector.
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    if logits.is_empty() {
        return Vec::new();
    }
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let p = softmax(&[0.0f64; 4]);
        assert!(p.iter().all(|&x| x == 0.25));
    }

    #[test]
    fn softmax_survives_large_logits() {
        let p = softmax(&[1000.0f64, 1000.0, -1000.0]);
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!(p[2] >= 0.0);
        let p32 = softmax(&[80.0f32, 0.0]);
        assert!(p32.iter().all(|x| x.is_finite()));
    }
}
