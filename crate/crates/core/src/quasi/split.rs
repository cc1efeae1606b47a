use std::collections::HashMap;

use serde::Serialize;

use super::QuasiSpec;
use crate::digits::{check_base, digits_msd};
use crate::error::Result;
use crate::value::Value;

/// Blocks `n_i` of a split expansion and their q-free parts `m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitResult {
    pub blocks: Vec<u64>,
    pub reduced: Vec<u64>,
}

/// Splits the expansion of `n` left to right, breaking after every maximal run of at least
/// `r` zeros. With `r = 0` every nonzero digit starts a new block.
pub fn split_blocks(n: u64, q: u32, r: u32) -> Result<SplitResult> {
    check_base(q)?;
    let digits = digits_msd(n, q);
    let qq = q as u64;
    let mut blocks = Vec::new();
    let mut current = 0u64;
    let mut zeros = 0u32;
    for (i, &d) in digits.iter().enumerate() {
        if d == 0 {
            zeros += 1;
        } else {
            if current != 0 && zeros >= r {
                blocks.push(current);
                current = 0;
            }
            zeros = 0;
        }
        current = current * qq + d as u64;
        if i + 1 == digits.len() {
            blocks.push(current);
        }
    }
    let reduced = blocks.iter().map(|&b| strip_base_factors(b, qq)).collect();
    Ok(SplitResult { blocks, reduced })
}

fn strip_base_factors(mut n: u64, q: u64) -> u64 {
    while n != 0 && n.is_multiple_of(q) {
        n /= q;
    }
    n
}

/// Evaluates a quasiadditive/-multiplicative function through its block decomposition,
/// memoizing values on the reduced blocks.
pub struct SplitEvaluator<'a> {
    spec: &'a QuasiSpec,
    memo: HashMap<u64, Value>,
}

impl<'a> SplitEvaluator<'a> {
    pub fn new(spec: &'a QuasiSpec) -> Self {
        SplitEvaluator { spec, memo: HashMap::new() }
    }

    pub fn eval(&mut self, n: u64) -> Value {
        let split = split_blocks(n, self.spec.q(), self.spec.r()).expect("spec base is valid");
        let mode = self.spec.mode();
        let mut acc = mode.identity();
        for m in split.reduced {
            let spec = self.spec;
            let value = self.memo.entry(m).or_insert_with(|| spec.eval(m));
            acc = mode.combine(&acc, value);
        }
        acc
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

pub fn eval_by_splitting(f: &QuasiSpec, n: u64) -> Value {
    SplitEvaluator::new(f).eval(n)
}
