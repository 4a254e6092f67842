//! Exact Gaussian rationals `p/q + i r/s`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A complex number with arbitrary-precision rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// `num/den`, real.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `i * num/den`.
    pub fn imag_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    pub fn from_real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        let (re, im) = self.to_f64();
        num_complex::Complex64::new(re, im)
    }

    /// `"p/q"` string for each part, the machine-readable form used by the JSON export.
    pub fn parts_as_strings(&self) -> (String, String) {
        (rational_string(&self.re), rational_string(&self.im))
    }

    /// Rendering used when this number multiplies a term. Pure imaginary values
    /// render as `i/8` or `3i/16`; mixed values are parenthesized.
    pub fn coefficient_string(&self) -> String {
        if self.im.is_zero() {
            rational_string(&self.re)
        } else if self.re.is_zero() {
            imaginary_string(&self.im)
        } else {
            let im = imaginary_string(&self.im.abs());
            let sign = if self.im.is_negative() { "-" } else { "+" };
            format!("({}{}{})", rational_string(&self.re), sign, im)
        }
    }
}

pub(crate) fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn imaginary_string(r: &BigRational) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let num = a.numer();
    let head = if num.is_one() {
        "i".to_string()
    } else {
        format!("{}i", num)
    };
    let body = if a.is_integer() {
        head
    } else {
        format!("{}/{}", head, a.denom())
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.coefficient_string())
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&ExactComplex> for ExactComplex {
    fn add_assign(&mut self, rhs: &ExactComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<'a> Sub<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl SubAssign<&ExactComplex> for ExactComplex {
    fn sub_assign(&mut self, rhs: &ExactComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> Mul<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl MulAssign<&ExactComplex> for ExactComplex {
    fn mul_assign(&mut self, rhs: &ExactComplex) {
        *self = &*self * rhs;
    }
}

impl Div for ExactComplex {
    type Output = ExactComplex;
    /// Panics on a zero divisor; use [`ExactComplex::inv`] to handle it.
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inv().expect("division by zero");
        &self * &inv
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<'a> Neg for &'a ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re.clone(), -self.im.clone())
    }
}
