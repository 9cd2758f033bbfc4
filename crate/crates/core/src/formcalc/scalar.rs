//! Coefficient fields for frame forms.
//!
//! Forms are generic over a [`Scalar`]. Two real fields are supported: `f64`
//! for pointwise numerics and [`Rational`] (arbitrary-precision rationals) for
//! exact Lie-algebra calculus. Each real field has a complex companion used on
//! the complexified exterior algebra.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Rational = BigRational;
/// Exact complex rationals.
pub type ComplexRational = Complex<BigRational>;

pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True when arithmetic is exact, so zero tests need no tolerance.
    const EXACT: bool;

    /// Absolute value (modulus for complex types) as a float.
    fn modulus(&self) -> f64;

    /// Zero test used for pivoting and sparsity: exact for exact types,
    /// `|x| <= 1e-12` otherwise.
    fn is_negligible(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= 1e-12
        }
    }

    fn from_i64(v: i64) -> Self;

    /// Embedding of an exact rational (rounded for floats).
    fn from_rational(r: &BigRational) -> Self;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }
}

pub trait RealScalar: Scalar + PartialOrd {
    type Complex: ComplexScalar<Real = Self>;

    fn to_f64(&self) -> f64;

    /// Conversion from a float. Exact for rationals (every finite double is a
    /// dyadic rational).
    fn from_f64(v: f64) -> Self;

    /// Square root when it exists in the field.
    fn sqrt_exact(&self) -> Option<Self>;

    fn complexify(&self) -> Self::Complex {
        Self::Complex::new(self.clone(), Self::zero())
    }
}

pub trait ComplexScalar: Scalar {
    type Real: RealScalar<Complex = Self>;

    fn new(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn conj(&self) -> Self;

    fn i() -> Self {
        Self::new(Self::Real::zero(), Self::Real::one())
    }

    fn from_real(r: Self::Real) -> Self {
        Self::new(r, Self::Real::zero())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn modulus(&self) -> f64 {
        self.abs()
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
}

impl RealScalar for f64 {
    type Complex = Complex<f64>;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn modulus(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl RealScalar for BigRational {
    type Complex = Complex<BigRational>;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.numer().sqrt();
        let den = self.denom().sqrt();
        let root = BigRational::new(num, den);
        (&root * &root == *self).then_some(root)
    }
}

impl<T> Scalar for Complex<T>
where
    T: RealScalar<Complex = Complex<T>>,
{
    const EXACT: bool = T::EXACT;

    fn modulus(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(T::from_i64(v), T::zero())
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex::new(T::from_rational(r), T::zero())
    }
}

impl<T> ComplexScalar for Complex<T>
where
    T: RealScalar<Complex = Complex<T>>,
{
    type Real = T;

    fn new(re: T, im: T) -> Self {
        Complex::new(re, im)
    }

    fn re(&self) -> T {
        self.re.clone()
    }

    fn im(&self) -> T {
        self.im.clone()
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

/// Shorthand for building exact rationals in tests and catalogs.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..64 {
        let a = v.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    rat(sign * p1, q1)
}
