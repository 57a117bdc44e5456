//! Coefficient rings for the symbolic layers.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Floating-point coefficients with magnitude at or below this are dropped
/// after arithmetic.
pub const DROP_TOL: f64 = 1e-14;

/// Relative tolerance used when two floating-point coefficients are compared
/// for equality (Hermitian pairing, canonical equality).
pub const MATCH_TOL: f64 = 1e-12;

/// A commutative coefficient ring closed under complex conjugation and
/// containing the Gaussian rationals.
///
/// The operator algebra only ever multiplies by integers and rationals, so
/// an exact instance makes identities such as commutator lemmas hold with an
/// empty residual rather than up to a tolerance.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn imag_unit() -> Self;

    fn conj(&self) -> Self;

    /// True when the coefficient should be dropped from a canonical form.
    fn is_negligible(&self) -> bool;

    fn approx_eq(&self, other: &Self) -> bool;

    fn to_complex64(&self) -> Complex64;

    /// Multiplicative inverse; callers guarantee a nonzero argument.
    fn inv(&self) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn scale_int(&self, n: i64) -> Self {
        self.clone() * Self::from_int(n)
    }
}

impl Coefficient for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn imag_unit() -> Self {
        Complex64::i()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn is_negligible(&self) -> bool {
        self.re.abs() <= DROP_TOL && self.im.abs() <= DROP_TOL
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = 1.0f64.max(self.norm()).max(other.norm());
        (self - other).norm() <= MATCH_TOL * scale
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }

    fn inv(&self) -> Self {
        Complex::inv(self)
    }
}

impl Coefficient for Complex<BigRational> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn inv(&self) -> Self {
        let d = self.norm_sqr();
        Complex::new(&self.re / &d, -&self.im / &d)
    }
}

/// `n!` as an `i64`; callers stay far below overflow (n ≤ 20).
pub(crate) fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as i64;
    let n = n as i64;
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_coefficients_are_exact() {
        let third = <Complex<BigRational>>::from_ratio(1, 3);
        let sum = third.clone() + third.clone() + third;
        assert_eq!(sum, <Complex<BigRational>>::one());
        let i = <Complex<BigRational>>::imag_unit();
        assert_eq!(i.clone() * i, -<Complex<BigRational>>::one());
    }

    #[test]
    fn float_drop_tolerance() {
        assert!(Complex64::new(1e-15, -1e-15).is_negligible());
        assert!(!Complex64::new(1e-13, 0.0).is_negligible());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(6, 6), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial(0), 1);
    }
}
