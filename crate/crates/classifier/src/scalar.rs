//! The two floating-point precisions the network runs in.
//!
//! Training runs in binary32 for speed; gradient verification runs the
//! same code in binary64, where central finite differences are
//! trustworthy to far below the comparison threshold.

use ndarray::NdFloat;
use num_traits::FromPrimitive;
use rand::Rng;
use rand_distr::StandardNormal;

/// Element type of network tensors: `f32` or `f64`.
pub trait Scalar: NdFloat + FromPrimitive + Send + Sync + 'static {
    /// One draw from the standard normal distribution.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// Convert an exactly-representable configuration constant.
pub(crate) fn fl<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("finite constant representable in both precisions")
}
