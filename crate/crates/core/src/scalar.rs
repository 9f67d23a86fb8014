//! Scalar abstraction shared by the numerical modules.
//!
//! Everything past the exact combinatorial layer is written against [`Real`],
//! which is implemented for `f32` and `f64`. Tolerances are written as `f64`
//! literals and passed through [`Real::tol`], which never lets a threshold
//! drop below what the type can actually resolve.

use nalgebra::{Complex, ComplexField, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Converts an `f64` constant.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite constant")
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon.
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(1024.0);
        Self::lit(x).max(floor)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cplx<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type RMatrix<T> = DMatrix<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(ComplexField::modulus(*z)))
}

/// Largest entry modulus of a real matrix.
pub fn max_abs_real<T: Real>(m: &RMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn to_complex<T: Real>(m: &RMatrix<T>) -> CMatrix<T> {
    m.map(creal)
}

/// Checks that `p` is entrywise nonnegative and sums to one within `sum_tol`.
pub(crate) fn check_distribution<T: Real>(p: &[T], sum_tol: f64) -> crate::Result<()> {
    if p.is_empty() {
        return Err(crate::Error::InvalidDistribution("empty distribution".into()));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| (**v).partial_cmp(&T::zero()).is_none_or(|o| o.is_lt())) {
        return Err(crate::Error::InvalidDistribution(format!(
            "entry {i} is negative or not a number ({})",
            v.as_f64()
        )));
    }
    let total = p.iter().fold(T::zero(), |a, &b| a + b);
    if (total - T::one()).abs() > T::tol(sum_tol) {
        return Err(crate::Error::InvalidDistribution(format!(
            "entries sum to {} (expected 1 within {sum_tol:e})",
            total.as_f64()
        )));
    }
    Ok(())
}

pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    ComplexField::modulus(z)
}
