//! The catalog of concrete digital functions, each packaged with base, parameter and mode.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::digits::{count_block, digit_sum, gray_weight, naf_weight, parse_block, run_lengths};
use crate::error::{Error, Result};
use crate::quasi::{verify_identity, QuasiSpec, Verification, Window};
use crate::regular::{fixtures, LinearRepresentation, Transducer};
use crate::value::{Mode, Value};

/// Memoized evaluation of the five mutually recursive sequences whose first member counts
/// optimal binary representations.
#[derive(Debug, Clone, Default)]
pub struct OptimalReps {
    memo: HashMap<u64, [u64; 5]>,
}

impl OptimalReps {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(u_1(n), ..., u_5(n))`.
    pub fn u_vector(&mut self, n: u64) -> [u64; 5] {
        match n {
            0 => return [1; 5],
            1 => return [1, 1, 0, 0, 0],
            _ => {}
        }
        if let Some(&u) = self.memo.get(&n) {
            return u;
        }
        let h = n / 2;
        let u = if n.is_multiple_of(2) {
            let a = self.u_vector(h);
            [a[0], a[0], a[1], a[0], a[3]]
        } else {
            let a = self.u_vector(h);
            let b = self.u_vector(h + 1);
            [a[1] + b[3], a[2], 0, b[4], 0]
        };
        self.memo.insert(n, u);
        u
    }

    pub fn count(&mut self, n: u64) -> u64 {
        self.u_vector(n)[0]
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

pub fn u_vector(n: u64) -> [u64; 5] {
    OptimalReps::new().u_vector(n)
}

pub fn optimal_rep_count(n: u64) -> u64 {
    OptimalReps::new().count(n)
}

/// Occurrences of `01` and `10` in the padded binary expansion.
pub fn adjusted_gray(n: u64) -> u64 {
    gray_weight(n) + n % 2
}

/// `(2^{n+2} - (-1)^n) / 3`.
pub fn jacobsthal(n: u32) -> u128 {
    assert!(n <= 124, "jacobsthal({n}) overflows u128");
    let p = 1u128 << (n + 2);
    if n.is_multiple_of(2) {
        (p - 1) / 3
    } else {
        (p + 1) / 3
    }
}

/// `prod_{i in L(n)} s_i` with `s[0] = s_1`.
pub fn run_length_transform(s: &[f64], n: u64) -> Result<f64> {
    run_lengths(n)
        .into_iter()
        .try_fold(1.0, |acc, len| s.get(len as usize - 1).map(|x| acc * x).ok_or(Error::MissingSequenceIndex(len)))
}

/// Exact run length transform of a rational sequence.
pub fn run_length_transform_exact(s: &[BigRational], n: u64) -> Result<BigRational> {
    run_lengths(n).into_iter().try_fold(BigRational::one(), |acc, len| {
        s.get(len as usize - 1).map(|x| acc * x).ok_or(Error::MissingSequenceIndex(len))
    })
}

/// Recovers `s_k = f(2^k - 1)` for `k = 1..=max_k` after verifying the identity with `r = 1`.
pub fn rlt_inverse(f: &QuasiSpec, max_k: u32, window: Window) -> Result<Vec<Value>> {
    if f.q() != 2 || f.mode() != Mode::Multiplicative {
        return Err(Error::NotQuasimultiplicative(format!("{} must be multiplicative in base 2", f.name())));
    }
    if max_k > 63 {
        return Err(Error::Overflow(format!("2^{max_k} - 1 exceeds u64")));
    }
    if let Verification::Counterexample(c) = verify_identity(&f.with_parameter(1), window)? {
        return Err(Error::NotQuasimultiplicative(format!(
            "f(2^({} + 1) {} + {}) = {} but f(a) f(b) = {}",
            c.k, c.a, c.b, c.lhs, c.rhs
        )));
    }
    Ok((1..=max_k).map(|k| f.eval((1u64 << k) - 1)).collect())
}

pub fn pow_digit_sum(n: u64) -> u64 {
    1u64 << n.count_ones()
}

/// Jacobsthal values `s_1..s_64` as exact rationals.
fn jacobsthal_table() -> Vec<BigRational> {
    (1..=64).map(|i| BigRational::from_integer(BigInt::from(jacobsthal(i)))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Builtin {
    BlockCount { q: u32, block: Vec<u32> },
    GrayRuns,
    AdjustedGray,
    NafWeight,
    OptimalReps,
    RltJacobsthal,
    PowDigitSum,
    NafExp,
    DigitSum,
}

impl Builtin {
    /// Every function that satisfies its functional equation.
    pub fn all_quasi() -> Vec<Builtin> {
        vec![
            Builtin::BlockCount { q: 2, block: vec![0, 1, 0, 1] },
            Builtin::AdjustedGray,
            Builtin::NafWeight,
            Builtin::OptimalReps,
            Builtin::RltJacobsthal,
            Builtin::PowDigitSum,
            Builtin::NafExp,
            Builtin::DigitSum,
        ]
    }

    pub fn q(&self) -> u32 {
        match self {
            Builtin::BlockCount { q, .. } => *q,
            _ => 2,
        }
    }

    pub fn r(&self) -> u32 {
        match self {
            Builtin::BlockCount { block, .. } => block.len() as u32,
            Builtin::GrayRuns | Builtin::AdjustedGray | Builtin::RltJacobsthal => 1,
            Builtin::NafWeight | Builtin::NafExp => 2,
            Builtin::OptimalReps => 3,
            Builtin::PowDigitSum | Builtin::DigitSum => 0,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Builtin::OptimalReps | Builtin::RltJacobsthal | Builtin::PowDigitSum | Builtin::NafExp => {
                Mode::Multiplicative
            }
            _ => Mode::Additive,
        }
    }

    /// Whether the function satisfies the functional equation with its parameter.
    pub fn is_quasi(&self) -> bool {
        !matches!(self, Builtin::GrayRuns)
    }

    pub fn spec(&self) -> Result<QuasiSpec> {
        let (q, r, mode) = (self.q(), self.r(), self.mode());
        let name = self.to_string();
        let spec = match self {
            Builtin::BlockCount { q, block } => {
                let block = block.clone();
                let t = Transducer::block_count(*q, &block)?;
                let q = *q;
                QuasiSpec::new(name, q, r, mode, move |n| {
                    Value::from(count_block(n, q, &block).expect("block validated"))
                })?
                .with_representation(t.to_linear_representation())?
            }
            Builtin::GrayRuns => QuasiSpec::new(name, q, r, mode, |n| Value::from(gray_weight(n)))?,
            Builtin::AdjustedGray => QuasiSpec::new(name, q, r, mode, |n| Value::from(adjusted_gray(n)))?
                .with_representation(adjusted_gray_representation()?)?,
            Builtin::NafWeight => QuasiSpec::new(name, q, r, mode, |n| Value::from(naf_weight(n)))?
                .with_representation(fixtures::naf_weight())?,
            Builtin::OptimalReps => QuasiSpec::new(name, q, r, mode, |n| Value::from(optimal_rep_count(n)))?
                .with_representation(fixtures::optimal_reps())?,
            Builtin::RltJacobsthal => {
                let table = jacobsthal_table();
                QuasiSpec::new(name, q, r, mode, move |n| {
                    Value::Exact(run_length_transform_exact(&table, n).expect("runs are at most 64 long"))
                })?
            }
            Builtin::PowDigitSum => QuasiSpec::new(name, q, r, mode, |n| Value::from(pow_digit_sum(n)))?
                .with_representation(fixtures::pow_digit_sum())?,
            Builtin::NafExp => {
                let rep =
                    Transducer::naf_weight().to_exponential_representation(&BigRational::from_integer(2.into()))?;
                QuasiSpec::new(name, q, r, mode, |n| Value::from(1u64 << naf_weight(n)))?.with_representation(rep)?
            }
            Builtin::DigitSum => QuasiSpec::new(name, q, r, mode, |n| Value::from(digit_sum(n, 2).expect("base 2")))?
                .with_representation(Transducer::digit_sum(2)?.to_linear_representation())?,
        };
        Ok(spec)
    }
}

/// Sum of the `01` and `10` block counters, minimized.
fn adjusted_gray_representation() -> Result<LinearRepresentation> {
    let one = BigRational::one();
    let a = Transducer::block_count(2, &[0, 1])?.to_linear_representation();
    let b = Transducer::block_count(2, &[1, 0])?.to_linear_representation();
    a.linear_combination(&b, &one, &one)?.minimize()
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::BlockCount { q, block } => {
                let digits: String = block.iter().map(|d| char::from_digit(*d, 10).unwrap_or('?')).collect();
                if *q == 2 {
                    write!(f, "block-count:{digits}")
                } else {
                    write!(f, "block-count:{digits}@{q}")
                }
            }
            Builtin::GrayRuns => f.write_str("gray-runs"),
            Builtin::AdjustedGray => f.write_str("adjusted-gray"),
            Builtin::NafWeight => f.write_str("naf-weight"),
            Builtin::OptimalReps => f.write_str("opt-reps"),
            Builtin::RltJacobsthal => f.write_str("rlt:jacobsthal"),
            Builtin::PowDigitSum => f.write_str("pow-digit-sum"),
            Builtin::NafExp => f.write_str("naf-exp"),
            Builtin::DigitSum => f.write_str("digit-sum"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    /// Names: `block-count:<digits>[@<q>]`, `gray-runs`, `adjusted-gray`, `naf-weight`,
    /// `opt-reps`, `rlt:jacobsthal`, `pow-digit-sum`, `naf-exp`, `digit-sum`.
    fn from_str(s: &str) -> Result<Builtin> {
        if let Some(rest) = s.strip_prefix("block-count:") {
            let (digits, q) = match rest.split_once('@') {
                Some((digits, q)) => {
                    let q: u32 = q.parse().map_err(|_| Error::Parse(format!("invalid base in {s:?}")))?;
                    (digits, q)
                }
                None => (rest, 2),
            };
            if !(2..=10).contains(&q) {
                return Err(Error::InvalidBase(q));
            }
            let block = parse_block(digits, q)?;
            if block.iter().all(|&d| d == 0) {
                return Err(Error::UnsupportedBlock(digits.to_string()));
            }
            if block.len() > 12 {
                return Err(Error::InvalidBlock(format!("{digits} (at most 12 digits)")));
            }
            return Ok(Builtin::BlockCount { q, block });
        }
        match s {
            "gray-runs" => Ok(Builtin::GrayRuns),
            "adjusted-gray" => Ok(Builtin::AdjustedGray),
            "naf-weight" => Ok(Builtin::NafWeight),
            "opt-reps" => Ok(Builtin::OptimalReps),
            "rlt:jacobsthal" => Ok(Builtin::RltJacobsthal),
            "pow-digit-sum" => Ok(Builtin::PowDigitSum),
            "naf-exp" => Ok(Builtin::NafExp),
            "digit-sum" => Ok(Builtin::DigitSum),
            _ => Err(Error::UnknownFunction(s.to_string())),
        }
    }
}
