use std::collections::VecDeque;

use num_traits::{One, Zero};
use serde::Serialize;

use super::linalg::{rat, Matrix, Rational};
use super::LinearRepresentation;
use crate::digits::check_base;
use crate::error::{Error, Result};

/// Deterministic complete transducer reading digits least significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct Transducer {
    q: u32,
    initial: usize,
    next: Vec<Vec<usize>>,
    output: Vec<Vec<Rational>>,
    final_output: Vec<Rational>,
}

/// Outcome of the three sufficient conditions for quasiadditivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransducerReport {
    pub r: u32,
    pub reset: bool,
    pub reset_output: bool,
    pub trailing_zeros: bool,
}

impl TransducerReport {
    pub fn holds(&self) -> bool {
        self.reset && self.reset_output && self.trailing_zeros
    }
}

impl Transducer {
    /// `next[s][d]` and `output[s][d]` describe the transition from state `s` on digit `d`.
    pub fn new(
        q: u32,
        initial: usize,
        next: Vec<Vec<usize>>,
        output: Vec<Vec<Rational>>,
        final_output: Vec<Rational>,
    ) -> Result<Self> {
        check_base(q)?;
        let states = next.len();
        if states == 0 {
            return Err(Error::MalformedTransducer("no states".into()));
        }
        if initial >= states {
            return Err(Error::MalformedTransducer(format!("initial state {initial} out of range")));
        }
        if output.len() != states || final_output.len() != states {
            return Err(Error::MalformedTransducer("transition, output and final tables differ in size".into()));
        }
        for (s, (row, out)) in next.iter().zip(&output).enumerate() {
            if row.len() != q as usize || out.len() != q as usize {
                return Err(Error::MalformedTransducer(format!("state {s} is not complete on digits 0..{q}")));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= states) {
                return Err(Error::MalformedTransducer(format!("state {s} moves to unknown state {t}")));
            }
        }
        Ok(Transducer { q, initial, next, output, final_output })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn states(&self) -> usize {
        self.next.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn next_state(&self, s: usize, d: u32) -> usize {
        self.next[s][d as usize]
    }

    pub fn output(&self, s: usize, d: u32) -> &Rational {
        &self.output[s][d as usize]
    }

    pub fn final_output(&self, s: usize) -> &Rational {
        &self.final_output[s]
    }

    /// Output sum of `n` read from the initial state, final output included.
    pub fn eval(&self, n: u64) -> Rational {
        let mut state = self.initial;
        let mut sum = Rational::zero();
        let mut m = n;
        while m > 0 {
            let d = (m % self.q as u64) as usize;
            sum += &self.output[state][d];
            state = self.next[state][d];
            m /= self.q as u64;
        }
        sum + &self.final_output[state]
    }

    fn unreachable_state(&self) -> Option<usize> {
        let mut seen = vec![false; self.states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for &t in &self.next[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.iter().position(|&x| !x)
    }

    pub fn check_conditions(&self, r: u32) -> Result<TransducerReport> {
        if let Some(s) = self.unreachable_state() {
            return Err(Error::Disconnected(s));
        }
        let mut reset = true;
        let mut reset_output = true;
        for s in 0..self.states() {
            let mut state = s;
            let mut sum = Rational::zero();
            for _ in 0..r {
                sum += &self.output[state][0];
                state = self.next[state][0];
            }
            reset &= state == self.initial;
            reset_output &= sum == self.final_output[s];
        }
        let trailing_zeros = (0..self.states())
            .all(|s| &self.output[s][0] + &self.final_output[self.next[s][0]] == self.final_output[s]);
        Ok(TransducerReport { r, reset, reset_output, trailing_zeros })
    }

    /// Representation of the output sum on the vector `(g_s(n))_s, 1` where `g_s(n)` is the
    /// output sum of `n` started in `s`. Zero-insensitive iff the trailing-zero condition holds.
    pub fn to_linear_representation(&self) -> LinearRepresentation {
        let s = self.states();
        let matrices = (0..self.q as usize)
            .map(|d| {
                let mut m = Matrix::zeros(s + 1, s + 1);
                for state in 0..s {
                    m[(state, self.next[state][d])] = Rational::one();
                    m[(state, s)] = self.output[state][d].clone();
                }
                m[(s, s)] = Rational::one();
                m
            })
            .collect();
        let mut u = vec![Rational::zero(); s + 1];
        u[self.initial] = Rational::one();
        let mut v = self.final_output.clone();
        v.push(Rational::one());
        LinearRepresentation::new(self.q, u, matrices, v).expect("dimensions agree by construction")
    }

    /// Representation of `c^{output sum}`; outputs must be integers.
    pub fn to_exponential_representation(&self, c: &Rational) -> Result<LinearRepresentation> {
        let power = |x: &Rational| -> Result<Rational> {
            if !x.is_integer() {
                return Err(Error::MalformedTransducer(format!("output {x} is not an integer")));
            }
            let e: i32 = x.to_integer().try_into().map_err(|_| Error::Overflow(format!("exponent {x} too large")))?;
            if c.is_zero() && e < 0 {
                return Err(Error::Domain("zero base with negative exponent".into()));
            }
            Ok(num_traits::pow::Pow::pow(c, e))
        };
        let s = self.states();
        let mut matrices = Vec::with_capacity(self.q as usize);
        for d in 0..self.q as usize {
            let mut m = Matrix::zeros(s, s);
            for state in 0..s {
                m[(state, self.next[state][d])] = power(&self.output[state][d])?;
            }
            matrices.push(m);
        }
        let mut u = vec![Rational::zero(); s];
        u[self.initial] = Rational::one();
        let v = self.final_output.iter().map(power).collect::<Result<Vec<_>>>()?;
        LinearRepresentation::new(self.q, u, matrices, v)
    }

    /// Binary transducer for the NAF weight.
    ///
    /// States: 0 = no carry, 1 = carry, 2 = a nonzero NAF digit is pending.
    pub fn naf_weight() -> Transducer {
        let next = vec![vec![0, 2], vec![2, 1], vec![0, 1]];
        let output = vec![vec![rat(0), rat(0)], vec![rat(0), rat(0)], vec![rat(1), rat(1)]];
        Transducer::new(2, 0, next, output, vec![rat(0), rat(1), rat(1)]).expect("valid table")
    }

    /// Counts occurrences of `block` in the zero-padded expansion.
    ///
    /// A state is the word of the last `|block| - 1` digits read, encoded oldest digit first.
    pub fn block_count(q: u32, block: &[u32]) -> Result<Transducer> {
        check_base(q)?;
        if block.is_empty() || block.iter().any(|&d| d >= q) {
            return Err(Error::InvalidBlock(format!("{block:?}")));
        }
        if block.iter().all(|&d| d == 0) {
            return Err(Error::UnsupportedBlock(block.iter().map(|d| d.to_string()).collect()));
        }
        let m = block.len() - 1;
        let states = (q as usize)
            .checked_pow(m as u32)
            .filter(|&s| s <= 1 << 16)
            .ok_or_else(|| Error::Overflow(format!("block of length {} needs too many states", block.len())))?;
        let decode = |s: usize| -> Vec<u32> {
            let mut w = vec![0u32; m];
            let mut x = s;
            for slot in w.iter_mut().rev() {
                *slot = (x % q as usize) as u32;
                x /= q as usize;
            }
            w
        };
        // reading order is reversed positional order
        let reversed: Vec<u32> = block.iter().rev().copied().collect();
        let step = |s: usize, d: u32| -> (usize, bool) {
            let mut window = decode(s);
            window.push(d);
            let hit = window == reversed;
            let next =
                if m == 0 { 0 } else { window[1..].iter().fold(0usize, |acc, &x| acc * q as usize + x as usize) };
            (next, hit)
        };
        let mut next = Vec::with_capacity(states);
        let mut output = Vec::with_capacity(states);
        let mut final_output = Vec::with_capacity(states);
        for s in 0..states {
            let (row, out): (Vec<usize>, Vec<Rational>) = (0..q)
                .map(|d| {
                    let (t, hit) = step(s, d);
                    (t, rat(hit as i64))
                })
                .unzip();
            next.push(row);
            output.push(out);
            let (mut state, mut hits) = (s, 0);
            for _ in 0..m {
                let (t, hit) = step(state, 0);
                state = t;
                hits += hit as i64;
            }
            final_output.push(rat(hits));
        }
        Transducer::new(q, 0, next, output, final_output)
    }

    /// Single-state transducer emitting each digit.
    pub fn digit_sum(q: u32) -> Result<Transducer> {
        check_base(q)?;
        Transducer::new(q, 0, vec![vec![0; q as usize]], vec![(0..q as i64).map(rat).collect()], vec![rat(0)])
    }
}
