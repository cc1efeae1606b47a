use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::moments::MomentSums;
use crate::value::Value;

fn q_pow(q: u32, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    num_traits::pow::Pow::pow(&base, e as i32)
}

/// `mu = B_t(1/q, 0) / q^{2r}`.
pub fn mean_constant(m: &MomentSums, q: u32, r: u32) -> Value {
    let r = r as i64;
    match &m.bt {
        Value::Exact(bt) => Value::Exact(bt * q_pow(q, -2 * r)),
        other => Value::Real(other.to_f64() * (q as f64).powi(-2 * r as i32)),
    }
}

/// The six-term variance formula
/// `- bt^2 q^{1-4r}/(q-1) + 2 bt^2 q^{1-3r}/(q-1) - bt^2 q^{-4r}/(q-1) - 4r bt^2 q^{-4r}
///  + btt q^{-2r} - 2 bt btx q^{-4r-1}`.
pub fn variance_constant(m: &MomentSums, q: u32, r: u32) -> Value {
    let ri = r as i64;
    match (&m.bt, &m.btt, &m.btx) {
        (Value::Exact(bt), Value::Exact(btt), Value::Exact(btx)) => {
            let q1 = BigRational::from_integer(BigInt::from(q - 1));
            let bt2 = bt * bt;
            let four_r = BigRational::from_integer(BigInt::from(4 * ri));
            let two = BigRational::from_integer(BigInt::from(2));
            let value = -(&bt2 * q_pow(q, 1 - 4 * ri) / &q1) + &two * &bt2 * q_pow(q, 1 - 3 * ri) / &q1
                - &bt2 * q_pow(q, -4 * ri) / &q1
                - four_r * &bt2 * q_pow(q, -4 * ri)
                + btt * q_pow(q, -2 * ri)
                - two * bt * btx * q_pow(q, -4 * ri - 1);
            Value::Exact(value)
        }
        _ => {
            let (bt, btt, btx) = (m.bt.to_f64(), m.btt.to_f64(), m.btx.to_f64());
            let qf = q as f64;
            let p = |e: i64| qf.powi(e as i32);
            let bt2 = bt * bt;
            let value = -bt2 * p(1 - 4 * ri) / (qf - 1.0) + 2.0 * bt2 * p(1 - 3 * ri) / (qf - 1.0)
                - bt2 * p(-4 * ri) / (qf - 1.0)
                - 4.0 * ri as f64 * bt2 * p(-4 * ri)
                + btt * p(-2 * ri)
                - 2.0 * bt * btx * p(-4 * ri - 1);
            Value::Real(value)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RltConstants {
    pub mu: f64,
    pub sigma2: f64,
    pub terms: u32,
    /// Indices with `s_i < 1`, outside the growth hypothesis.
    pub below_one: Vec<u32>,
}

/// Mean and variance constants of `log t(N_k)` for the run length transform of `s`,
/// truncated at index `terms`:
/// `mu = sum_i log s_i 2^{-i-2}` and
/// `sigma^2 = sum_i (log s_i)^2 (2^{-i-2} - (2i-1) 2^{-2i-4}) - sum_{j>i} log s_i log s_j (i+j-1) 2^{-i-j-3}`.
pub fn rlt_constants(s: impl Fn(u32) -> f64, terms: u32) -> RltConstants {
    let logs: Vec<f64> = (1..=terms).map(|i| s(i).ln()).collect();
    let below_one = (1..=terms).filter(|&i| s(i) < 1.0).collect();
    let two = |e: i64| 2f64.powi(e as i32);
    let mut mu = 0.0;
    let mut diagonal = 0.0;
    let mut cross = 0.0;
    for (a, &li) in logs.iter().enumerate() {
        let i = a as i64 + 1;
        mu += li * two(-i - 2);
        diagonal += li * li * (two(-i - 2) - (2 * i - 1) as f64 * two(-2 * i - 4));
        for (b, &lj) in logs.iter().enumerate().skip(a + 1) {
            let j = b as i64 + 1;
            cross += li * lj * (i + j - 1) as f64 * two(-i - j - 3);
        }
    }
    RltConstants { mu, sigma2: diagonal - cross, terms, below_one }
}

/// `s_i = (2^{i+2} - (-1)^i) / 3` in floating point, accurate for all `i`.
pub fn jacobsthal_f64(i: u32) -> f64 {
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    (2f64.powi(i as i32 + 2) - sign) / 3.0
}

/// Whether the exact constants describe a degenerate (constant) distribution.
pub fn is_degenerate(sigma2: &Value) -> bool {
    match sigma2 {
        Value::Exact(x) => x.is_zero(),
        Value::Real(x) => x.abs() < 1e-12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::moments::{exact_moments, Provenance};
    use crate::regular::fixtures;

    fn frac(p: i64, q: i64) -> Value {
        Value::Exact(BigRational::new(p.into(), q.into()))
    }

    #[test]
    fn naf_weight_constants() {
        let m = exact_moments(&fixtures::naf_weight(), 2).unwrap();
        assert_eq!(mean_constant(&m, 2, 2), frac(1, 3));
        assert_eq!(variance_constant(&m, 2, 2), frac(2, 27));
    }

    #[test]
    fn float_path_matches_exact_path() {
        let m = exact_moments(&fixtures::naf_weight(), 2).unwrap();
        let real = MomentSums {
            bt: Value::Real(m.bt.to_f64()),
            btt: Value::Real(m.btt.to_f64()),
            btx: Value::Real(m.btx.to_f64()),
            provenance: Provenance::Truncated { max_len: 0, tail: None },
            ..m.clone()
        };
        assert!((variance_constant(&real, 2, 2).to_f64() - 2.0 / 27.0).abs() < 1e-14);
        assert!((mean_constant(&real, 2, 2).to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_sums_give_zero_constants() {
        let m = MomentSums::zero(2, 3);
        assert_eq!(mean_constant(&m, 2, 3), Value::zero());
        assert_eq!(variance_constant(&m, 2, 3), Value::zero());
        assert!(is_degenerate(&variance_constant(&m, 2, 3)));
    }

    #[test]
    fn jacobsthal_constants() {
        let c = rlt_constants(jacobsthal_f64, 200);
        assert!((c.mu - 0.429947).abs() < 1e-5, "{}", c.mu);
        assert!((c.sigma2 - 0.121137).abs() < 1e-5, "{}", c.sigma2);
        assert!(c.below_one.is_empty());
        let trivial = rlt_constants(|_| 1.0, 200);
        assert_eq!((trivial.mu, trivial.sigma2), (0.0, 0.0));
        assert_eq!(rlt_constants(|i| if i == 2 { 0.5 } else { 1.0 }, 10).below_one, vec![2]);
        for i in 1..=60 {
            let exact = crate::funcs::jacobsthal(i) as f64;
            assert!((jacobsthal_f64(i) - exact).abs() <= 1e-15 * exact);
        }
    }
}
