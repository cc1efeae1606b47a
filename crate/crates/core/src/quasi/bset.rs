//! The B-set: positive integers not divisible by q whose expansion avoids `0^r`.

use crate::digits::check_base;
use crate::error::{Error, Result};

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidParameter("the B-set needs r >= 1".into()))
    } else {
        Ok(())
    }
}

/// Members of length `1..=max_len`, ordered by length and then value.
pub fn enumerate_bset(q: u32, r: u32, max_len: usize) -> Result<BSetIter> {
    check_base(q)?;
    check_r(r)?;
    if max_len as f64 * (q as f64).log2() > 64.0 {
        return Err(Error::Overflow(format!("B-set members of length {max_len} exceed u64")));
    }
    Ok(BSetIter { q, r, max_len, len: 0, current: Vec::new(), pos: 0 })
}

pub struct BSetIter {
    q: u32,
    r: u32,
    max_len: usize,
    len: usize,
    current: Vec<u64>,
    pos: usize,
}

impl Iterator for BSetIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.pos >= self.current.len() {
            if self.len >= self.max_len {
                return None;
            }
            self.len += 1;
            self.current.clear();
            self.pos = 0;
            let current = &mut self.current;
            walk(self.q, self.r, self.len, &mut |n, len| {
                if len == self.len {
                    current.push(n);
                }
            });
        }
        self.pos += 1;
        Some(self.current[self.pos - 1])
    }
}

/// Calls `visit(n, len)` for every member of length `<= max_len`, in depth-first order.
pub fn for_each_bset_member(q: u32, r: u32, max_len: usize, mut visit: impl FnMut(u64, usize)) -> Result<()> {
    check_base(q)?;
    check_r(r)?;
    if max_len as f64 * (q as f64).log2() > 64.0 {
        return Err(Error::Overflow(format!("B-set members of length {max_len} exceed u64")));
    }
    walk(q, r, max_len, &mut visit);
    Ok(())
}

fn walk(q: u32, r: u32, max_len: usize, visit: &mut dyn FnMut(u64, usize)) {
    fn go(n: u64, len: usize, zeros: u32, q: u32, r: u32, max_len: usize, visit: &mut dyn FnMut(u64, usize)) {
        if zeros == 0 {
            visit(n, len);
        }
        if len == max_len {
            return;
        }
        let base = n * q as u64;
        if zeros + 1 < r {
            go(base, len + 1, zeros + 1, q, r, max_len, visit);
        }
        for d in 1..q as u64 {
            go(base + d, len + 1, 0, q, r, max_len, visit);
        }
    }
    for d in 1..q as u64 {
        if max_len >= 1 {
            go(d, 1, 0, q, r, max_len, visit);
        }
    }
}

/// Number of members of each length `0..=max_len`, via the trailing-zero automaton.
pub fn bset_counts(q: u32, r: u32, max_len: usize) -> Result<Vec<u128>> {
    check_base(q)?;
    check_r(r)?;
    let nonzero = (q - 1) as u128;
    let overflow = || Error::Overflow(format!("B-set count at length {max_len}"));
    // by_zeros[z]: words of the current length that start nonzero and end in exactly z zeros
    let mut by_zeros = vec![0u128; r as usize];
    let mut counts = vec![0u128; max_len + 1];
    for (len, slot) in counts.iter_mut().enumerate().skip(1) {
        let mut next = vec![0u128; r as usize];
        if len == 1 {
            next[0] = nonzero;
        } else {
            let total = by_zeros.iter().try_fold(0u128, |acc, &c| acc.checked_add(c)).ok_or_else(overflow)?;
            next[0] = total.checked_mul(nonzero).ok_or_else(overflow)?;
            next[1..].copy_from_slice(&by_zeros[..r as usize - 1]);
        }
        by_zeros = next;
        *slot = by_zeros[0];
    }
    Ok(counts)
}

/// Exponential growth rate of the member counts: the largest root `y` of
/// `y^r = (q-1)(y^{r-1} + ... + y + 1)`.
pub fn bset_growth(q: u32, r: u32) -> Result<f64> {
    check_base(q)?;
    check_r(r)?;
    let c = (q - 1) as f64;
    let g = |y: f64| {
        let mut poly = 0.0;
        let mut p = 1.0;
        for _ in 0..r {
            poly += p;
            p *= y;
        }
        p - c * poly
    };
    // g(q-1) <= 0 <= g(q): bisect.
    let (mut lo, mut hi) = (c.max(1.0) - 1e-12, q as f64);
    if r == 1 {
        return Ok(c);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(q: u32, r: u32, len: usize) -> Vec<u64> {
        let q64 = q as u64;
        let lo = q64.pow(len as u32 - 1);
        let hi = q64.pow(len as u32);
        (lo..hi)
            .filter(|&n| n % q64 != 0)
            .filter(|&n| {
                let d = crate::digits::digits_msd(n, q);
                d.windows(r as usize).all(|w| w.iter().any(|&x| x != 0))
            })
            .collect()
    }

    #[test]
    fn small_sets() {
        assert_eq!(enumerate_bset(2, 1, 4).unwrap().collect::<Vec<_>>(), vec![1, 3, 7, 15]);
        assert_eq!(enumerate_bset(2, 2, 3).unwrap().collect::<Vec<_>>(), vec![1, 3, 5, 7]);
        assert!(enumerate_bset(2, 0, 3).is_err());
    }

    #[test]
    fn fibonacci_counts() {
        let c = bset_counts(2, 2, 20).unwrap();
        assert_eq!((c[1], c[2]), (1, 1));
        for l in 3..=20 {
            assert_eq!(c[l], c[l - 1] + c[l - 2]);
        }
    }

    #[test]
    fn automaton_counts_match_enumeration() {
        for q in [2u32, 3] {
            for r in [1u32, 2, 3] {
                let max_len = if q == 2 { 14 } else { 9 };
                let counts = bset_counts(q, r, max_len).unwrap();
                let members: Vec<u64> = enumerate_bset(q, r, max_len).unwrap().collect();
                for (len, &count) in counts.iter().enumerate().skip(1) {
                    let got: Vec<u64> =
                        members.iter().copied().filter(|&n| crate::digits::digit_length(n, q) == len).collect();
                    assert_eq!(got.len() as u128, count, "q={q} r={r} len={len}");
                    if len <= 8 {
                        assert_eq!(got, brute(q, r, len));
                    }
                }
                assert!(members.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn growth_rates() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((bset_growth(2, 2).unwrap() - phi).abs() < 1e-12);
        assert!((bset_growth(2, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((bset_growth(3, 1).unwrap() - 2.0).abs() < 1e-15);
        let trib = bset_growth(2, 3).unwrap();
        assert!((trib.powi(3) - trib * trib - trib - 1.0).abs() < 1e-12);
        let c = bset_counts(2, 3, 60).unwrap();
        assert!(((c[60] as f64 / c[59] as f64) - trib).abs() < 1e-9);
    }
}
