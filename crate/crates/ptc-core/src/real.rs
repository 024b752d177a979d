//! Scalar abstraction so the numerical core can run in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;

/// Floating-point scalar used throughout the crate.
///
/// The trait bundles the `num-traits` capabilities the numerical code relies
/// on and adds explicit conversions from/to `f64` so generic code can spell
/// numeric literals (`R::of(0.5)`). `f32` trades accuracy for speed: the
/// special-function kernels then deliver roughly single-precision accuracy and
/// the documented `f64` error bounds do not apply.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for numeric constants in generic code.
    fn of(v: f64) -> Self;

    /// Lossless widening (or identity) conversion to `f64`.
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    #[inline]
    fn of(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Draws a uniform variate on `[0, 1)`.
///
/// All randomness in the crate is drawn as `f64` and narrowed, so `f32` and
/// `f64` instantiations consume RNG streams identically and produce matching
/// decisions up to precision.
#[inline]
pub fn uniform01<R: Real, G: Rng + ?Sized>(rng: &mut G) -> R {
    R::of(rng.random::<f64>())
}

/// Draws a standard normal variate via the Box–Muller transform.
///
/// The second variate of each pair is discarded to keep the function
/// stateless; reproducibility only depends on the RNG stream position.
#[inline]
pub fn std_normal<R: Real, G: Rng + ?Sized>(rng: &mut G) -> R {
    // Map u1 into (0, 1] so the logarithm is finite.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    R::of((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}
