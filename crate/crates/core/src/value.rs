//! Function values: exact rationals where possible, binary floating point otherwise.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when at least one side of a comparison is real-valued.
pub const REAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Additive,
    Multiplicative,
}

impl Mode {
    pub fn flipped(self) -> Mode {
        match self {
            Mode::Additive => Mode::Multiplicative,
            Mode::Multiplicative => Mode::Additive,
        }
    }

    /// Neutral element of the combining operation: 0 for sums, 1 for products.
    pub fn identity(self) -> Value {
        match self {
            Mode::Additive => Value::zero(),
            Mode::Multiplicative => Value::one(),
        }
    }

    pub fn combine(self, a: &Value, b: &Value) -> Value {
        match self {
            Mode::Additive => a + b,
            Mode::Multiplicative => a * b,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Additive => f.write_str("additive"),
            Mode::Multiplicative => f.write_str("multiplicative"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "add" | "additive" => Ok(Mode::Additive),
            "mult" | "multiplicative" => Ok(Mode::Multiplicative),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Exact(BigRational),
    Real(f64),
}

impl Value {
    pub fn zero() -> Value {
        Value::Exact(BigRational::zero())
    }

    pub fn one() -> Value {
        Value::Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Value {
        Value::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(x) => Some(x),
            Value::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(x) => rational_to_f64(x),
            Value::Real(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Exact(x) => x.is_positive(),
            Value::Real(x) => *x > 0.0,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Value {
        match self {
            Value::Exact(x) => Value::Exact(x * c),
            Value::Real(x) => Value::Real(x * rational_to_f64(c)),
        }
    }

    /// `self^t` for an integer exponent, exact when `self` is exact.
    pub fn powi(&self, t: i32) -> Value {
        match self {
            Value::Exact(x) => {
                if t < 0 && x.is_zero() {
                    Value::Real(f64::INFINITY)
                } else {
                    Value::Exact(num_traits::pow::Pow::pow(x, t))
                }
            }
            Value::Real(x) => Value::Real(x.powi(t)),
        }
    }

    /// Equality: exact for two exact values, relative tolerance otherwise.
    pub fn approx_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if a == b {
                    return true;
                }
                let scale = 1.0f64.max(a.abs()).max(b.abs());
                (a - b).abs() <= REAL_TOLERANCE * scale
            }
        }
    }
}

impl From<BigRational> for Value {
    fn from(x: BigRational) -> Self {
        Value::Exact(x)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Exact(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl Add for &Value {
    type Output = Value;

    fn add(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Real(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Mul for &Value {
    type Output = Value;

    fn mul(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Real(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(x) => f.write_str(&format_rational(x)),
            Value::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

/// Converts a big rational to the nearest-ish `f64`, robust to huge numerators and denominators.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // Shift both sides down to a representable range first.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Prints a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Prints a real with 9 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // 9.9999999995 rounds up into an extra digit; that is still 9 significant digits after trimming
        trim_zeros(&s)
    } else {
        format!("{x:.8e}")
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        s.to_string()
    }
}

/// Parses `"p/q"`, `"p"` or a decimal like `"-1.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational {s:?}"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return Err(err());
        }
        if !int_digits.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 1000 {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac}");
        let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let p: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational(" 1.25 ").unwrap(), q(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&q(2, 27)), "2/27");
        assert_eq!(format_rational(&q(4, 2)), "2");
        assert_eq!(format_real(0.060828678359), "0.0608286784");
        assert_eq!(format_real(3.0), "3");
        assert_eq!(format_real(1.5e-12), "1.50000000e-12");
    }

    #[test]
    fn mixed_arithmetic_falls_back_to_real() {
        let a = Value::from_int(2);
        let b = Value::Real(0.5);
        assert!(!(&a + &b).is_exact());
        assert_eq!(&a * &b, Value::Real(1.0));
        assert_eq!(Value::from_int(3).powi(-2), Value::Exact(q(1, 9)));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let x = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&x) - 3.0).abs() < 1e-12);
    }
}
