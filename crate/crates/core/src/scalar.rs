//! Scalar abstractions shared by the mesh, assembly and solver code.
//!
//! Geometry and real-valued fields are generic over [`Real`] (`f32` or
//! `f64`). Linear algebra is generic over [`Scalar`], which additionally
//! covers `Complex<T>` so the order-parameter system can be stored with
//! native complex entries.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive, Zero};

/// Floating point type usable for coordinates, weights and real fields.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Scalar<Real = Self>
    + 'static
{
    /// Converts an `f64` literal. Every literal used in this crate is
    /// representable (possibly rounded) in both `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in target float type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field element of a linear system: a [`Real`] or a `Complex<Real>`.
pub trait Scalar:
    Copy + PartialEq + NumAssign + Neg<Output = Self> + Sum + Debug + Send + Sync + 'static
{
    type Real: Real;

    fn from_real(x: Self::Real) -> Self;
    fn conjugate(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn modulus_sqr(self) -> Self::Real;
    fn real_part(self) -> Self::Real;
    fn finite(self) -> bool;
}

macro_rules! real_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            type Real = $t;
            #[inline] fn from_real(x: $t) -> Self { x }
            #[inline] fn conjugate(self) -> Self { self }
            #[inline] fn modulus(self) -> $t { self.abs() }
            #[inline] fn modulus_sqr(self) -> $t { self * self }
            #[inline] fn real_part(self) -> $t { self }
            #[inline] fn finite(self) -> bool { self.is_finite() }
        }
    )*)
}

real_scalar!(f32 f64);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    #[inline]
    fn from_real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    #[inline]
    fn conjugate(self) -> Self {
        self.conj()
    }
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> T {
        self.norm_sqr()
    }
    #[inline]
    fn real_part(self) -> T {
        self.re
    }
    #[inline]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Hermitian inner product `Σ conj(xᵢ)·yᵢ`.
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a.conjugate() * b).sum()
}

/// Euclidean norm.
pub fn norm2<S: Scalar>(x: &[S]) -> S::Real {
    x.iter()
        .map(|v| v.modulus_sqr())
        .fold(S::Real::zero(), |acc, v| acc + v)
        .sqrt()
}

/// `y += alpha * x`
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
