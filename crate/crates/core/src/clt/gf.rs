use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::effective_r;
use crate::error::{Error, Result};
use crate::quasi::{exp_log_bridge, for_each_bset_member, LogBase, QuasiSpec};
use crate::value::{format_rational, Mode, Value};

type Series = Vec<BigRational>;

fn mul(a: &[BigRational], b: &[BigRational], n: usize) -> Series {
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a / b` up to `x^{n-1}`; requires `b_0 != 0`.
fn div(a: &[BigRational], b: &[BigRational], n: usize) -> Series {
    let mut out = vec![BigRational::zero(); n];
    let b0 = &b[0];
    for k in 0..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(BigRational::zero);
        for j in 1..=k.min(b.len() - 1) {
            acc -= &b[j] * &out[k - j];
        }
        out[k] = acc / b0;
    }
    out
}

/// `[x^k] (1 + (1 + x + ... + x^{r-1}) B) / (1 - x - x^r B)` for `k < n`.
pub fn gf_coefficients(b: &[BigRational], r: u32, n: usize) -> Series {
    let r = r as usize;
    let ones: Series = (0..r.min(n)).map(|_| BigRational::one()).collect();
    let mut numer = mul(&ones, b, n);
    numer.resize(n, BigRational::zero());
    numer[0] += BigRational::one();
    let mut denom = vec![BigRational::zero(); n.max(2)];
    denom[0] = BigRational::one();
    denom[1] -= BigRational::one();
    for (k, c) in b.iter().enumerate() {
        if k + r < n {
            denom[k + r] -= c;
        }
    }
    div(&numer, &denom, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfMismatch {
    pub t: i32,
    pub k: usize,
    pub closed_form: String,
    pub direct: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfReport {
    pub function: String,
    pub r: u32,
    pub max_k: usize,
    pub t_values: Vec<i32>,
    pub exact: bool,
    pub checked: usize,
    pub mismatches: Vec<GfMismatch>,
}

impl GfReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `[x^k] F(x, t)` from the closed form with `sum_{n < q^k} f(n)^t` for `k <= max_k`
/// and each integer `t`. Additive functions are bridged to `2^f` first.
pub fn gf_identity_check(f: &QuasiSpec, max_k: usize, t_values: &[i32]) -> Result<GfReport> {
    let f = match f.mode() {
        Mode::Multiplicative => f.clone(),
        Mode::Additive => exp_log_bridge(f, LogBase::Rational(BigRational::from_integer(BigInt::from(2))))?,
    };
    let (q, r) = (f.q(), effective_r(f.r()));
    let q64 = q as u64;
    let limit = q64
        .checked_pow(max_k as u32)
        .filter(|&l| l <= 1 << 24)
        .ok_or_else(|| Error::InvalidParameter(format!("{q}^{max_k} values are too many to enumerate")))?;
    let degree = max_k + r as usize;
    let values: Vec<Value> = (0..limit).map(|n| f.eval(n)).collect();
    let mut members: Vec<(usize, Value)> = Vec::new();
    for_each_bset_member(q, r, degree, |n, len| members.push((len, f.eval(n))))?;
    let exact = values.iter().chain(members.iter().map(|(_, v)| v)).all(Value::is_exact);
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for &t in t_values {
        if exact {
            let pow = |v: &Value| -> Result<BigRational> {
                let x = v.as_exact().expect("exact values");
                if t < 0 && x.is_zero() {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                Ok(num_traits::pow::Pow::pow(x, t))
            };
            let mut b = vec![BigRational::zero(); degree + 1];
            for (len, v) in &members {
                b[*len] += pow(v)?;
            }
            let closed = gf_coefficients(&b, r, max_k + 1);
            let mut direct = BigRational::zero();
            let mut n = 0u64;
            for (k, c) in closed.iter().enumerate() {
                let end = q64.pow(k as u32);
                while n < end {
                    direct += pow(&values[n as usize])?;
                    n += 1;
                }
                checked += 1;
                if *c != direct {
                    mismatches.push(GfMismatch {
                        t,
                        k,
                        closed_form: format_rational(c),
                        direct: format_rational(&direct),
                    });
                }
            }
        } else {
            let b: Vec<f64> = {
                let mut b = vec![0.0; degree + 1];
                for (len, v) in &members {
                    b[*len] += v.to_f64().powi(t);
                }
                b
            };
            let closed = gf_coefficients_f64(&b, r, max_k + 1);
            let mut direct = 0.0;
            let mut n = 0u64;
            for (k, c) in closed.iter().enumerate() {
                let end = q64.pow(k as u32);
                while n < end {
                    direct += values[n as usize].to_f64().powi(t);
                    n += 1;
                }
                checked += 1;
                if (c - direct).abs() > 1e-9 * direct.abs().max(1.0) {
                    mismatches.push(GfMismatch { t, k, closed_form: c.to_string(), direct: direct.to_string() });
                }
            }
        }
    }
    Ok(GfReport { function: f.name().to_string(), r, max_k, t_values: t_values.to_vec(), exact, checked, mismatches })
}

fn gf_coefficients_f64(b: &[f64], r: u32, n: usize) -> Vec<f64> {
    let r = r as usize;
    let mut numer = vec![0.0; n];
    numer[0] = 1.0;
    for (k, c) in b.iter().enumerate() {
        for j in 0..r {
            if k + j < n {
                numer[k + j] += c;
            }
        }
    }
    let mut denom = vec![0.0; n.max(2)];
    denom[0] = 1.0;
    denom[1] -= 1.0;
    for (k, c) in b.iter().enumerate() {
        if k + r < n {
            denom[k + r] -= c;
        }
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        let mut acc = numer[k];
        for j in 1..=k.min(denom.len() - 1) {
            acc -= denom[j] * out[k - j];
        }
        out[k] = acc;
    }
    out
}
