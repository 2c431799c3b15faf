//! Coefficient fields.
//!
//! Two fields are supported: exact Gaussian rationals `Q(i)` ([`Exact`]) and
//! double-precision complex numbers ([`C64`]). All algebra code is generic
//! over [`Scalar`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type C64 = Complex<f64>;
pub type Exact = Complex<BigRational>;

/// Relative drop tolerance used by float-mode elements.
pub const FLOAT_DROP_TOL: f64 = 1e-15;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Conversion from a float pair; exact for binary fractions in exact mode.
    fn from_f64_parts(re: f64, im: f64) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> C64;

    /// True when the coefficient should not be stored. `scale` is the
    /// magnitude of the operands that produced it (ignored in exact mode).
    fn negligible(&self, scale: f64) -> bool;

    fn is_zero(&self) -> bool {
        self.negligible(0.0)
    }

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    fn from_c64(z: C64) -> Self {
        Self::from_f64_parts(z.re, z.im)
    }

    fn powi(&self, k: i64) -> Self {
        let base = if k < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b.clone();
            }
            e >>= 1;
            if e > 0 {
                b = b.clone() * b;
            }
        }
        acc
    }

    /// Modulus in exact arithmetic when representable.
    fn abs_exact(&self) -> Option<Self> {
        None
    }

    /// Human/JSON rendering of the real and imaginary parts.
    fn parts_to_json(&self) -> (serde_json::Value, serde_json::Value);
    fn parts_from_json(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self>;
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64_parts(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn negligible(&self, scale: f64) -> bool {
        let mag = self.norm();
        mag == 0.0 || mag <= FLOAT_DROP_TOL * scale
    }
    fn abs_exact(&self) -> Option<Self> {
        Some(C64::new(self.norm(), 0.0))
    }
    fn parts_to_json(&self) -> (serde_json::Value, serde_json::Value) {
        (serde_json::json!(self.re), serde_json::json!(self.im))
    }
    fn parts_from_json(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self> {
        Some(C64::new(json_to_f64(re)?, json_to_f64(im)?))
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }
    fn from_f64_parts(re: f64, im: f64) -> Self {
        let conv = |v: f64| BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        Complex::new(conv(re), conv(im))
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn abs_exact(&self) -> Option<Self> {
        if self.im.is_zero() {
            return Some(Complex::new(self.re.abs(), BigRational::zero()));
        }
        if self.re.is_zero() {
            return Some(Complex::new(self.im.abs(), BigRational::zero()));
        }
        let n2 = &self.re * &self.re + &self.im * &self.im;
        let num = n2.numer().sqrt();
        let den = n2.denom().sqrt();
        if &num * &num == *n2.numer() && &den * &den == *n2.denom() {
            Some(Complex::new(BigRational::new(num, den), BigRational::zero()))
        } else {
            None
        }
    }
    fn parts_to_json(&self) -> (serde_json::Value, serde_json::Value) {
        (
            serde_json::Value::String(self.re.to_string()),
            serde_json::Value::String(self.im.to_string()),
        )
    }
    fn parts_from_json(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self> {
        Some(Complex::new(json_to_rational(re)?, json_to_rational(im)?))
    }
}

fn json_to_f64(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => parse_rational(s).and_then(|r| r.to_f64()),
        serde_json::Value::Null => Some(0.0),
        _ => None,
    }
}

fn json_to_rational(v: &serde_json::Value) -> Option<BigRational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(BigRational::from_integer(BigInt::from(i)))
            } else {
                BigRational::from_float(n.as_f64()?)
            }
        }
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Null => Some(BigRational::zero()),
        _ => None,
    }
}

/// Parses `"p"`, `"p/q"` or a decimal literal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    BigRational::from_float(s.parse::<f64>().ok()?)
}

/// Complex from a JSON value: a number, `[re, im]`, `{"re":..,"im":..}` or a
/// rational string.
pub fn scalar_from_json<S: Scalar>(v: &serde_json::Value) -> Option<S> {
    use serde_json::Value;
    match v {
        Value::Number(_) | Value::String(_) => S::parts_from_json(v, &Value::Null),
        Value::Array(a) if a.len() == 2 => S::parts_from_json(&a[0], &a[1]),
        Value::Object(o) => S::parts_from_json(
            o.get("re").unwrap_or(&Value::Null),
            o.get("im").unwrap_or(&Value::Null),
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::{scalar_from_json, Exact, Scalar, C64};

    #[test]
    fn exact_powers_and_inverse() {
        let i = Exact::i();
        assert_eq!(i.powi(4), Exact::one());
        assert_eq!(i.powi(-1), -Exact::i());
        assert_eq!(Exact::from_ratio(3, 4).powi(-2), Exact::from_ratio(16, 9));
    }

    #[test]
    fn exact_modulus_of_pythagorean_point() {
        let z = Exact::from_ratio(3, 5) + Exact::i() * Exact::from_ratio(4, 5);
        assert_eq!(z.abs_exact(), Some(Exact::one()));
        let w = Exact::one() + Exact::i();
        assert_eq!(w.abs_exact(), None);
    }

    #[test]
    fn json_parsing() {
        let z: Exact = scalar_from_json(&serde_json::json!(["1/2", -3])).unwrap();
        assert_eq!(z, Exact::from_ratio(1, 2) - Exact::i() * Exact::from_i64(3));
        let f: C64 = scalar_from_json(&serde_json::json!({"re": 0.25})).unwrap();
        assert_eq!(f, C64::new(0.25, 0.0));
    }

    #[test]
    fn float_drop_is_relative() {
        assert!(C64::new(1e-17, 0.0).negligible(1.0));
        assert!(!C64::new(1e-17, 0.0).negligible(1e-6));
    }
}
