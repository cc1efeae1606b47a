//! Canonical q-ary expansions and digit-level primitives.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn check_base(q: u32) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidBase(q))
    } else {
        Ok(())
    }
}

/// Canonical base-q expansion, most significant digit first. Zero is the empty sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expansion {
    base: u32,
    digits: Vec<u32>,
}

impl Expansion {
    /// Builds an expansion from digits, stripping leading zeros.
    pub fn from_digits(base: u32, digits: &[u32]) -> Result<Self> {
        check_base(base)?;
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidParameter(format!("digit {d} out of range for base {base}")));
        }
        let start = digits.iter().position(|&d| d != 0).unwrap_or(digits.len());
        Ok(Expansion { base, digits: digits[start..].to_vec() })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// ℓ(n): the number of digits.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The represented integer, or `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.digits.iter().try_fold(0u64, |acc, &d| acc.checked_mul(self.base as u64)?.checked_add(d as u64))
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("0");
        }
        let sep = if self.base > 10 { "," } else { "" };
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

pub fn to_expansion(n: u64, q: u32) -> Result<Expansion> {
    check_base(q)?;
    Ok(Expansion { base: q, digits: digits_msd(n, q) })
}

/// Digits of `n` in base `q`, most significant first; empty for 0. Assumes `q >= 2`.
pub(crate) fn digits_msd(mut n: u64, q: u32) -> Vec<u32> {
    let q = q as u64;
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % q) as u32);
        n /= q;
    }
    out.reverse();
    out
}

/// Number of base-q digits of `n` (0 for `n = 0`).
pub fn digit_length(mut n: u64, q: u32) -> usize {
    let mut len = 0;
    while n > 0 {
        n /= q as u64;
        len += 1;
    }
    len
}

/// Parses a digit block given as a string over `'0'..='9'`.
pub fn parse_block(s: &str, q: u32) -> Result<Vec<u32>> {
    check_base(q)?;
    if s.is_empty() {
        return Err(Error::InvalidBlock(s.to_string()));
    }
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d < q => Ok(d),
            _ => Err(Error::InvalidBlock(s.to_string())),
        })
        .collect()
}

/// Occurrences (possibly overlapping) of `block` in the expansion of `n` padded with
/// `|block| - 1` zeros on each side.
pub fn count_block(n: u64, q: u32, block: &[u32]) -> Result<u64> {
    check_base(q)?;
    if block.is_empty() {
        return Err(Error::InvalidBlock(String::new()));
    }
    if block.iter().all(|&d| d == 0) {
        let s: String = block.iter().map(|d| d.to_string()).collect();
        return Err(Error::UnsupportedBlock(s));
    }
    if let Some(&d) = block.iter().find(|&&d| d >= q) {
        return Err(Error::InvalidParameter(format!("block digit {d} out of range for base {q}")));
    }
    Ok(count_block_padded(&digits_msd(n, q), block, block.len() - 1))
}

pub(crate) fn count_block_padded(digits: &[u32], block: &[u32], pad: usize) -> u64 {
    if digits.is_empty() {
        return 0;
    }
    let mut padded = vec![0u32; pad];
    padded.extend_from_slice(digits);
    padded.extend(std::iter::repeat_n(0, pad));
    padded.windows(block.len()).filter(|w| *w == block).count() as u64
}

/// Lengths of the maximal runs of ones in the binary expansion, most significant run first.
pub fn run_lengths(n: u64) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = 0u32;
    for d in digits_msd(n, 2) {
        if d == 1 {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    runs
}

/// Number of ones in the Gray code of `n`, which is the number of runs in its binary expansion.
pub fn gray_weight(n: u64) -> u64 {
    (n ^ (n >> 1)).count_ones() as u64
}

pub fn digit_sum(n: u64, q: u32) -> Result<u64> {
    check_base(q)?;
    Ok(digits_msd(n, q).iter().map(|&d| d as u64).sum())
}

/// Binary representation with digits in {-1, 0, 1}, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedExpansion {
    digits: Vec<i8>,
}

impl SignedExpansion {
    pub fn digits(&self) -> &[i8] {
        &self.digits
    }

    pub fn weight(&self) -> u64 {
        self.digits.iter().filter(|&&d| d != 0).count() as u64
    }

    pub fn value(&self) -> i128 {
        self.digits.iter().fold(0i128, |acc, &d| 2 * acc + d as i128)
    }

    pub fn is_non_adjacent(&self) -> bool {
        self.digits.windows(2).all(|w| w[0] == 0 || w[1] == 0)
    }
}

impl fmt::Display for SignedExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("0");
        }
        for &d in &self.digits {
            f.write_str(match d {
                1 => "1",
                -1 => "T",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

/// Non-adjacent form, computed least significant digit first.
pub fn naf(n: u64) -> SignedExpansion {
    let mut digits = Vec::new();
    let mut m = n as u128;
    while m > 0 {
        if m % 2 == 1 {
            let d: i8 = 2 - (m % 4) as i8;
            digits.push(d);
            if d == 1 {
                m -= 1;
            } else {
                m += 1;
            }
        } else {
            digits.push(0);
        }
        m /= 2;
    }
    digits.reverse();
    SignedExpansion { digits }
}

/// Hamming weight of the NAF via hn(2n) = hn(n), hn(4n±1) = hn(n) + 1.
pub fn naf_weight(n: u64) -> u64 {
    let mut m = n as u128;
    let mut weight = 0;
    while m > 0 {
        match m % 4 {
            0 | 2 => m /= 2,
            1 => {
                weight += 1;
                m /= 4;
            }
            _ => {
                weight += 1;
                m = (m + 1) / 4;
            }
        }
    }
    weight
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(n: u64) -> String {
        to_expansion(n, 2).unwrap().to_string()
    }

    #[test]
    fn expansions() {
        assert!(to_expansion(0, 2).unwrap().is_empty());
        assert_eq!(bin(469), "111010101");
        assert_eq!(bin(22), "10110");
        assert_eq!(to_expansion(0, 2).unwrap().to_string(), "0");
        assert_eq!(to_expansion(5, 1), Err(Error::InvalidBase(1)));
        let e = Expansion::from_digits(3, &[0, 0, 2, 1]).unwrap();
        assert_eq!(e.digits(), &[2, 1]);
        assert_eq!(e.value(), Some(7));
    }

    #[test]
    fn block_counts() {
        let b = parse_block("0101", 2).unwrap();
        assert_eq!(count_block(469, 2, &b).unwrap(), 2);
        assert_eq!(count_block(22, 2, &b).unwrap(), 1);
        assert_eq!(count_block(240150, 2, &b).unwrap(), 3);
        assert_eq!(count_block(0, 2, &b).unwrap(), 0);
        assert!(matches!(count_block(5, 2, &[0, 0]), Err(Error::UnsupportedBlock(_))));
        assert!(parse_block("012", 2).is_err());
    }

    #[test]
    fn extra_padding_changes_nothing() {
        let b = parse_block("0110", 2).unwrap();
        for n in 0..2048u64 {
            let d = digits_msd(n, 2);
            let fixed = count_block_padded(&d, &b, b.len() - 1);
            assert_eq!(fixed, count_block_padded(&d, &b, b.len() + 3));
        }
    }

    #[test]
    fn runs_and_gray() {
        assert_eq!(run_lengths(1910), vec![3, 3, 2]);
        assert!(run_lengths(0).is_empty());
        assert_eq!(run_lengths(21), vec![1, 1, 1]);
        assert_eq!(gray_weight(0), 0);
        assert_eq!(gray_weight(2), 2);
        assert_eq!(gray_weight(3), 1);
    }

    #[test]
    fn gray_weight_counts_runs() {
        for n in 1..(1u64 << 16) {
            let d = digits_msd(n, 2);
            let runs = 1 + d.windows(2).filter(|w| w[0] != w[1]).count() as u64;
            assert_eq!(gray_weight(n), runs, "n = {n}");
        }
    }

    #[test]
    fn naf_examples() {
        assert_eq!(naf(27).digits(), &[1, 0, 0, -1, 0, -1]);
        assert_eq!(naf(27).to_string(), "100T0T");
        assert!(naf(0).digits().is_empty());
        assert_eq!(naf(7).digits(), &[1, 0, 0, -1]);
        assert_eq!(naf_weight(0), 0);
        assert_eq!(naf_weight(27), 3);
        assert_eq!(naf_weight(87), 4);
        assert_eq!(naf_weight(5), 2);
        assert_eq!(naf(u64::MAX).value(), u64::MAX as i128);
    }

    #[test]
    fn naf_recursion_matches_construction() {
        for n in 0..(1u64 << 16) {
            let e = naf(n);
            assert_eq!(e.value(), n as i128);
            assert!(e.is_non_adjacent());
            assert_eq!(naf_weight(n), e.weight(), "n = {n}");
        }
    }

    /// Minimal weight per value over all {-1,0,1} representations with `bits` digits.
    fn brute_min_weights(bits: u32, limit: i64) -> Vec<u64> {
        let mut best = vec![u64::MAX; limit as usize];
        for code in 0..3u64.pow(bits) {
            let (mut c, mut value, mut weight, mut p) = (code, 0i64, 0u64, 1i64);
            for _ in 0..bits {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                value += d * p;
                weight += (d != 0) as u64;
                p *= 2;
            }
            if (0..limit).contains(&value) {
                let slot = &mut best[value as usize];
                *slot = (*slot).min(weight);
            }
        }
        best
    }

    #[test]
    fn naf_has_minimal_weight() {
        // One digit beyond the binary length suffices for an optimal representation.
        let best = brute_min_weights(11, 1 << 10);
        for n in 0..(1u64 << 10) {
            assert_eq!(naf(n).weight(), best[n as usize], "n = {n}");
        }
    }

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(0, 2).unwrap(), 0);
        assert_eq!(digit_sum(7, 2).unwrap(), 3);
        assert_eq!(digit_sum(469, 2).unwrap(), 6);
        assert_eq!(digit_sum(3, 0), Err(Error::InvalidBase(0)));
    }
}
