//! Scalar fields used throughout the crate.
//!
//! Certificates are computed in exact rational arithmetic by default; `f64`
//! is available for quick numeric scans. Complex scalars wrap either.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Relative tolerance used by float-mode verdicts.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Arithmetic mode of a tensor or report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Rational => "rational",
            ScalarMode::Float => "float",
        }
    }
}

impl FromStr for ScalarMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(ScalarMode::Rational),
            "float" => Ok(ScalarMode::Float),
            other => Err(format!("unknown mode `{other}` (expected rational|float)")),
        }
    }
}

/// JSON form of a scalar: `"p/q"` strings, plain numbers, or `{"re", "im"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Number(f64),
    Complex { re: Box<ScalarJson>, im: Box<ScalarJson> },
}

/// A commutative field the moment machinery can run over.
pub trait Field:
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
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn mode() -> ScalarMode;

    fn from_rational(r: &Rational) -> Self;

    fn from_bigint(b: &BigInt) -> Self {
        Self::from_rational(&Rational::from_integer(b.clone()))
    }

    fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }

    /// `(numerators, denominator)` over a common denominator, for fields
    /// where integer arithmetic is the faster route.
    fn common_denominator(_values: &[Self]) -> Option<(Vec<BigInt>, BigInt)> {
        None
    }

    fn to_complex64(&self) -> Complex64;

    /// Modulus as `f64`, used for tolerances and scale estimates.
    fn magnitude(&self) -> f64 {
        self.to_complex64().norm()
    }

    fn to_json(&self) -> ScalarJson;

    fn from_json(v: &ScalarJson) -> Result<Self, String>;

    fn is_exact() -> bool {
        Self::mode() == ScalarMode::Rational
    }
}

/// An ordered field. `sign(0) = +1` everywhere.
pub trait Real: Field + Num + PartialOrd {
    fn abs_val(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn sign(&self) -> i8 {
        if *self < Self::zero() {
            -1
        } else {
            1
        }
    }
}

/// Parses `"p/q"`, `"p"`, or a decimal string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| format!("bad numerator in `{s}`"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| format!("bad denominator in `{s}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(p));
    }
    // Decimal literal, taken exactly as written rather than via binary float.
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| format!("bad exponent in `{s}`"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&digits).map_err(|_| format!("not a rational: `{s}`"))?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    Ok(if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational, String> {
    Rational::from_float(x).ok_or_else(|| format!("non-finite value {x}"))
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Field for Rational {
    fn mode() -> ScalarMode {
        ScalarMode::Rational
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_bigint(b: &BigInt) -> Self {
        Rational::from_integer(b.clone())
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn common_denominator(values: &[Self]) -> Option<(Vec<BigInt>, BigInt)> {
        let d = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let nums = values.iter().map(|v| v.numer() * (&d / v.denom())).collect();
        Some((nums, d))
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(Real::to_f64(self), 0.0)
    }

    fn magnitude(&self) -> f64 {
        Real::to_f64(self).abs()
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Text(rational_to_string(self))
    }

    fn from_json(v: &ScalarJson) -> Result<Self, String> {
        match v {
            ScalarJson::Text(s) => parse_rational(s),
            ScalarJson::Number(x) => rational_from_f64(*x),
            ScalarJson::Complex { .. } => Err("expected a real scalar, found complex".into()),
        }
    }
}

impl Real for Rational {
    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Huge numerator/denominator pairs: fall back to a log-scale ratio.
            let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    fn sign(&self) -> i8 {
        if self.is_negative() {
            -1
        } else {
            1
        }
    }
}

impl Field for f64 {
    fn mode() -> ScalarMode {
        ScalarMode::Float
    }

    fn from_rational(r: &Rational) -> Self {
        Real::to_f64(r)
    }

    fn from_bigint(b: &BigInt) -> Self {
        b.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Number(*self)
    }

    fn from_json(v: &ScalarJson) -> Result<Self, String> {
        match v {
            ScalarJson::Number(x) => Ok(*x),
            ScalarJson::Text(s) => parse_rational(s).map(|r| Real::to_f64(&r)),
            ScalarJson::Complex { .. } => Err("expected a real scalar, found complex".into()),
        }
    }
}

impl Real for f64 {
    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl<R: Real> Field for Complex<R> {
    fn mode() -> ScalarMode {
        R::mode()
    }

    fn from_rational(r: &Rational) -> Self {
        Complex::new(R::from_rational(r), R::zero())
    }

    fn from_bigint(b: &BigInt) -> Self {
        Complex::new(R::from_bigint(b), R::zero())
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Complex {
            re: Box::new(self.re.to_json()),
            im: Box::new(self.im.to_json()),
        }
    }

    fn from_json(v: &ScalarJson) -> Result<Self, String> {
        match v {
            ScalarJson::Complex { re, im } => Ok(Complex::new(R::from_json(re)?, R::from_json(im)?)),
            real => Ok(Complex::new(R::from_json(real)?, R::zero())),
        }
    }
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}
