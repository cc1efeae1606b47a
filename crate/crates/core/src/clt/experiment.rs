use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::Neumaier;
use crate::error::{Error, Result};
use crate::quasi::QuasiSpec;

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Histogram edges of the standardized values: `[-4, 4]` in steps of 0.5; values outside are
/// counted in the outermost bins.
pub const HISTOGRAM_EDGES: (f64, f64, f64) = (-4.0, 4.0, 0.5);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub function: String,
    pub k: u32,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub ks_distance: f64,
    pub degenerate: bool,
    pub histogram: Vec<HistogramBin>,
}

/// Distribution of `L_k = λ(N_k)` for `N_k` uniform on `{0, ..., q^k - 1}`, computed exhaustively.
pub fn empirical_experiment(f: &QuasiSpec, k: u32, jobs: usize) -> Result<ExperimentReport> {
    let count = (f.q() as u64)
        .checked_pow(k)
        .filter(|&c| c <= 1 << 32)
        .ok_or_else(|| Error::InvalidParameter(format!("{}^{k} integers are too many to enumerate", f.q())))?;
    let distribution = value_distribution(f, count, jobs)?;
    let n = count as f64;
    let mut sum = Neumaier::default();
    for (v, c) in &distribution {
        sum.add(v * *c as f64);
    }
    let mean = sum.sum() / n;
    let mut sq = Neumaier::default();
    for (v, c) in &distribution {
        sq.add((v - mean) * (v - mean) * *c as f64);
    }
    let variance = sq.sum() / n;
    let degenerate = variance <= 1e-300;
    let sd = variance.sqrt();
    let standardize = |v: f64| if degenerate { 0.0 } else { (v - mean) / sd };

    let mut ks: f64 = 0.0;
    let mut below = 0u64;
    for (v, c) in &distribution {
        let phi = normal_cdf(standardize(*v));
        let before = below as f64 / n;
        below += c;
        let after = below as f64 / n;
        ks = ks.max((before - phi).abs()).max((after - phi).abs());
    }

    let (lo, hi, width) = HISTOGRAM_EDGES;
    let bins = ((hi - lo) / width).round() as usize;
    let mut histogram: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin { lo: lo + i as f64 * width, hi: lo + (i + 1) as f64 * width, count: 0 })
        .collect();
    for (v, c) in &distribution {
        let z = standardize(*v);
        let i = (((z - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        histogram[i].count += c;
    }

    Ok(ExperimentReport {
        function: f.name().to_string(),
        k,
        count,
        mean,
        variance,
        ks_distance: ks,
        degenerate,
        histogram,
    })
}

/// Distinct values of λ on `0..count` with multiplicities, in increasing order.
fn value_distribution(f: &QuasiSpec, count: u64, jobs: usize) -> Result<Vec<(f64, u64)>> {
    let workers = (jobs.clamp(1, 64) as u64).min(count.max(1));
    let chunk = count.div_ceil(workers);
    let tally = |start: u64, end: u64| -> Result<HashMap<u64, u64>> {
        let mut map = HashMap::new();
        for n in start..end {
            // +0.0 normalizes negative zero
            let v = f.lambda(n)? + 0.0;
            *map.entry(v.to_bits()).or_insert(0) += 1;
        }
        Ok(map)
    };
    let parts: Vec<Result<HashMap<u64, u64>>> = if workers == 1 {
        vec![tally(0, count)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let (start, end) = (w * chunk, ((w + 1) * chunk).min(count));
                    s.spawn(move || tally(start, end))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut merged: BTreeMap<OrderedF64, u64> = BTreeMap::new();
    for part in parts {
        for (bits, c) in part? {
            *merged.entry(OrderedF64(f64::from_bits(bits))).or_insert(0) += c;
        }
    }
    Ok(merged.into_iter().map(|(v, c)| (v.0, c)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrderedF64(f64);

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::naf_weight;
    use crate::funcs::Builtin;
    use crate::value::{Mode, Value};

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841344746068543).abs() < 1e-12);
        assert!((normal_cdf(-1.96) - 0.024997895148220435).abs() < 1e-12);
        assert!(normal_cdf(-40.0) >= 0.0 && normal_cdf(40.0) <= 1.0);
    }

    #[test]
    fn exhaustive_moments_match_direct_computation() {
        let f = Builtin::NafWeight.spec().unwrap();
        let report = empirical_experiment(&f, 12, 1).unwrap();
        let values: Vec<f64> = (0..4096).map(|n| naf_weight(n) as f64).collect();
        let mean = values.iter().sum::<f64>() / 4096.0;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4096.0;
        assert_eq!(report.count, 4096);
        assert!((report.mean - mean).abs() < 1e-12);
        assert!((report.variance - var).abs() < 1e-12);
        assert!(report.ks_distance > 0.0 && report.ks_distance < 1.0);
        assert_eq!(report.histogram.iter().map(|b| b.count).sum::<u64>(), 4096);
        assert!(!report.degenerate);
    }

    #[test]
    fn kolmogorov_distance_oracle() {
        // independent brute force over the sorted sample
        let f = Builtin::AdjustedGray.spec().unwrap();
        let report = empirical_experiment(&f, 10, 1).unwrap();
        let mut values: Vec<f64> = (0..1024).map(|n| f.lambda(n).unwrap()).collect();
        values.sort_by(f64::total_cmp);
        let sd = report.variance.sqrt();
        let mut ks: f64 = 0.0;
        for v in &values {
            let phi = normal_cdf((v - report.mean) / sd);
            let ecdf_after = values.iter().filter(|&&w| w <= *v).count() as f64 / 1024.0;
            let ecdf_before = values.iter().filter(|&&w| w < *v).count() as f64 / 1024.0;
            ks = ks.max((ecdf_after - phi).abs()).max((ecdf_before - phi).abs());
        }
        assert!((report.ks_distance - ks).abs() < 1e-15);
    }

    #[test]
    fn workers_do_not_change_the_report() {
        let f = Builtin::OptimalReps.spec().unwrap();
        assert_eq!(empirical_experiment(&f, 12, 1).unwrap(), empirical_experiment(&f, 12, 4).unwrap());
    }

    #[test]
    fn constant_function_is_degenerate() {
        let one = QuasiSpec::new("one", 2, 0, Mode::Multiplicative, |_| Value::one()).unwrap();
        let report = empirical_experiment(&one, 8, 1).unwrap();
        assert!(report.degenerate);
        assert_eq!(report.variance, 0.0);
        assert_eq!(report.ks_distance, 0.5);
    }
}
