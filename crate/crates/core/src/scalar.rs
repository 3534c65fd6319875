//! Real scalar abstraction shared by every numerical routine in the crate.
//!
//! All of the special-function and scattering machinery is written against
//! [`Real`], so it runs in `f32` or `f64`. Tolerances quoted throughout the
//! documentation assume `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as the real scalar of the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts an index or count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn from_i64<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar type")
}

/// Complex number from a real part.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `i·x`
#[inline]
pub fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

/// Machine epsilon of `T`.
#[inline]
pub fn eps<T: Real>() -> T {
    T::epsilon()
}

/// Distance from `z` to the nearest integer on the real axis.
pub fn distance_to_integer<T: Real>(z: Complex<T>) -> T {
    let nearest = z.re.round();
    (z - re(nearest)).norm()
}

/// `x`, raised to `multiple · ε` when `T` cannot resolve it.
#[inline]
pub fn tol<T: Real>(x: f64, multiple: f64) -> T {
    lit::<T>(x).max(eps::<T>() * lit(multiple))
}
