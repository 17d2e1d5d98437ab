//! Scalar abstraction.
//!
//! Everything in this crate is generic over the real scalar type through
//! `num-traits`, so the same code runs in `f32` or `f64`. The tolerances
//! quoted throughout the documentation and the test suite assume `f64`;
//! concrete `f64` aliases are exported at the crate root.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::{Product, Sum};

/// Real scalar the library is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Product
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` constant into `Self`.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("constant must be representable in the scalar type")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Product
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// Complex zero.
pub fn czero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
pub fn cone<T: Scalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Imaginary unit.
pub fn ci<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// Real number promoted to a complex value.
pub fn creal<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `e^{i phi}`.
pub fn cis<T: Scalar>(phi: T) -> C<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// A geometric-matching tolerance: `base` (quoted at `f64` precision),
/// widened to a fixed multiple of the machine epsilon for lower-precision
/// scalars; unchanged at `f64`.
pub fn geom_tol<T: Scalar>(base: f64) -> T {
    T::real(base).max(T::epsilon() * T::real(500.0))
}

/// Exact factorial as a scalar; valid up to 18! in `f64`.
pub fn factorial<T: Scalar>(n: u32) -> T {
    let mut acc = 1.0f64;
    for k in 2..=n as u64 {
        acc *= k as f64;
    }
    T::real(acc)
}
