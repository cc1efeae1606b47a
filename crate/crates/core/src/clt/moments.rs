use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{effective_r, Neumaier};
use crate::error::{Error, Result};
use crate::quasi::{bset_counts, bset_growth, for_each_bset_member, QuasiSpec};
use crate::regular::linalg::{dot, solve, solve_f64, Matrix, Rational, Vector};
use crate::regular::LinearRepresentation;
use crate::value::{rational_to_f64, Mode, Value};

/// Number of per-length contributions used to fit the tail model.
pub const TAIL_WINDOW: usize = 6;

/// Fitted tail `a_l ~ P(l) gamma^l` with `P` given in powers of `l - max_len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailModel {
    pub gamma: f64,
    pub window: usize,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Truncated { max_len: usize, tail: Option<TailModel> },
}

/// `B_t(1/q, 0)`, `B_tt(1/q, 0)` and `B_tx(1/q, 0)` for the B-set with parameters `(q, r)`.
#[derive(Debug, Clone)]
pub struct MomentSums {
    pub q: u32,
    pub r: u32,
    pub bt: Value,
    pub btt: Value,
    pub btx: Value,
    pub provenance: Provenance,
}

impl MomentSums {
    pub fn zero(q: u32, r: u32) -> MomentSums {
        MomentSums { q, r, bt: Value::zero(), btt: Value::zero(), btx: Value::zero(), provenance: Provenance::Exact }
    }
}

/// Per-length sums over B-set members: counts, `sum λ` and `sum λ^2`, all unweighted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthProfile {
    pub q: u32,
    pub r: u32,
    pub counts: Vec<u128>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl LengthProfile {
    pub fn max_len(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Per-length sums of λ and λ² over the B-set up to `max_len`.
///
/// Uses a layered walk over distinct `(trailing zeros, F(n))` states when the function carries an
/// integral representation, plain enumeration otherwise.
pub fn length_profile(f: &QuasiSpec, max_len: usize, jobs: usize) -> Result<LengthProfile> {
    let q = f.q();
    let r = effective_r(f.r());
    let counts = bset_counts(q, r, max_len)?;
    if let Some(rep) = f.representation() {
        if let Some(layers) = IntegralRep::new(rep).and_then(|ir| ir.layers(r, max_len, jobs)) {
            let mut first = vec![0.0; max_len + 1];
            let mut second = vec![0.0; max_len + 1];
            for (len, members) in layers.iter().enumerate() {
                let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
                for (value, mult) in members {
                    let lambda = lambda_of(f, &Value::Exact(value.clone()))?;
                    s1.add(*mult as f64 * lambda);
                    s2.add(*mult as f64 * lambda * lambda);
                }
                first[len + 1] = s1.sum();
                second[len + 1] = s2.sum();
            }
            return Ok(LengthProfile { q, r, counts, first, second });
        }
    }
    let mut first = vec![Neumaier::default(); max_len + 1];
    let mut second = vec![Neumaier::default(); max_len + 1];
    let mut failure = None;
    for_each_bset_member(q, r, max_len, |n, len| {
        if failure.is_some() {
            return;
        }
        match f.lambda(n) {
            Ok(lambda) => {
                first[len].add(lambda);
                second[len].add(lambda * lambda);
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(LengthProfile {
        q,
        r,
        counts,
        first: first.iter().map(Neumaier::sum).collect(),
        second: second.iter().map(Neumaier::sum).collect(),
    })
}

fn lambda_of(f: &QuasiSpec, value: &Value) -> Result<f64> {
    match f.mode() {
        Mode::Additive => Ok(value.to_f64()),
        Mode::Multiplicative if value.is_positive() => Ok(value.to_f64().ln()),
        Mode::Multiplicative => Err(Error::Domain(format!("{} takes the nonpositive value {value}", f.name()))),
    }
}

/// Integer copy of a representation for the layered walk.
struct IntegralRep {
    u: Vec<i64>,
    m: Vec<Vec<Vec<i64>>>,
    v: Vec<i64>,
}

type Layer = BTreeMap<(u32, Vec<i64>), u64>;

impl IntegralRep {
    fn new(rep: &LinearRepresentation) -> Option<IntegralRep> {
        if !rep.is_integral() {
            return None;
        }
        let int = |x: &Rational| x.to_integer().to_i64();
        let u = rep.u().iter().map(int).collect::<Option<Vec<_>>>()?;
        let v = rep.v().iter().map(int).collect::<Option<Vec<_>>>()?;
        let m = rep
            .matrices()
            .iter()
            .map(|mat| mat.to_rows().iter().map(|row| row.iter().map(int).collect::<Option<Vec<_>>>()).collect())
            .collect::<Option<Vec<_>>>()?;
        Some(IntegralRep { u, m, v })
    }

    fn apply(&self, d: usize, x: &[i64]) -> Option<Vec<i64>> {
        self.m[d]
            .iter()
            .map(|row| row.iter().zip(x).try_fold(0i64, |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?)))
            .collect()
    }

    fn value(&self, x: &[i64]) -> Option<i64> {
        self.u.iter().zip(x).try_fold(0i64, |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?))
    }

    fn step(&self, layer: &[(&(u32, Vec<i64>), &u64)], q: usize, r: u32) -> Option<Layer> {
        let mut next = Layer::new();
        for ((z, x), &mult) in layer {
            for d in 0..q {
                let z2 = if d == 0 { z + 1 } else { 0 };
                if z2 >= r {
                    continue;
                }
                let y = self.apply(d, x)?;
                let slot = next.entry((z2, y)).or_insert(0);
                *slot = slot.checked_add(mult)?;
            }
        }
        Some(next)
    }

    /// For each length `1..=max_len`, the member values with multiplicities; `None` on overflow.
    fn layers(&self, r: u32, max_len: usize, jobs: usize) -> Option<Vec<Vec<(BigRational, u64)>>> {
        let q = self.m.len();
        let mut layer = Layer::new();
        for d in 1..q {
            *layer.entry((0, self.apply(d, &self.v)?)).or_insert(0) += 1;
        }
        let mut out = Vec::with_capacity(max_len);
        for len in 1..=max_len {
            let mut members: BTreeMap<i64, u64> = BTreeMap::new();
            for ((z, x), &mult) in &layer {
                if *z == 0 {
                    let slot = members.entry(self.value(x)?).or_insert(0);
                    *slot = slot.checked_add(mult)?;
                }
            }
            out.push(members.into_iter().map(|(v, c)| (BigRational::from_integer(v.into()), c)).collect());
            if len == max_len {
                break;
            }
            let entries: Vec<_> = layer.iter().collect();
            let workers = jobs.clamp(1, 64).min(entries.len().max(1));
            layer = if workers == 1 {
                self.step(&entries, q, r)?
            } else {
                let chunk = entries.len().div_ceil(workers);
                let parts: Vec<Option<Layer>> = std::thread::scope(|s| {
                    let handles: Vec<_> =
                        entries.chunks(chunk).map(|part| s.spawn(move || self.step(part, q, r))).collect();
                    handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
                });
                let mut merged = Layer::new();
                for part in parts {
                    for (key, mult) in part? {
                        let slot = merged.entry(key).or_insert(0);
                        *slot = slot.checked_add(mult)?;
                    }
                }
                merged
            };
        }
        Some(out)
    }
}

/// `sum_{m >= 1} m^j y^m` for `j <= 3`.
fn power_series_tail(j: usize, y: f64) -> f64 {
    let w = 1.0 - y;
    match j {
        0 => y / w,
        1 => y / (w * w),
        2 => y * (1.0 + y) / (w * w * w),
        3 => y * (1.0 + 4.0 * y + y * y) / (w * w * w * w),
        _ => unreachable!("tail polynomials have degree at most 3"),
    }
}

/// `sum_{l > base} P(l - base) y^l` for `P` with coefficients `coeffs` (lowest first).
pub(crate) fn tail_sum(coeffs: &[f64], base: usize, y: f64) -> f64 {
    y.powi(base as i32) * coeffs.iter().enumerate().map(|(j, c)| c * power_series_tail(j, y)).sum::<f64>()
}

/// Multiplies `P(m)` by `(base + m)`.
pub(crate) fn times_length(coeffs: &[f64], base: usize) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() + 1];
    for (j, c) in coeffs.iter().enumerate() {
        out[j] += c * base as f64;
        out[j + 1] += c;
    }
    out
}

/// Least-squares polynomial of degree `deg` through `(x_i, y_i)`.
fn polyfit(xs: &[f64], ys: &[f64], deg: usize) -> Option<Vec<f64>> {
    let n = deg + 1;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for (&x, &y) in xs.iter().zip(ys) {
        for i in 0..n {
            b[i] += x.powi(i as i32) * y;
            for j in 0..n {
                a[i * n + j] += x.powi((i + j) as i32);
            }
        }
    }
    solve_f64(&a, &b, n)
}

/// Fits `a_l / gamma^l` on the last `TAIL_WINDOW` lengths: degree 1 for first moments,
/// degree 2 for second moments.
pub fn fit_tail(profile: &LengthProfile) -> Result<TailModel> {
    let (q, r, big_l) = (profile.q, profile.r, profile.max_len());
    if big_l < TAIL_WINDOW + 1 {
        return Err(Error::InvalidParameter(format!("tail extrapolation needs max_len > {TAIL_WINDOW}")));
    }
    let gamma = bset_growth(q, r)? / q as f64;
    let lens: Vec<usize> = (big_l + 1 - TAIL_WINDOW..=big_l).collect();
    let xs: Vec<f64> = lens.iter().map(|&l| l as f64 - big_l as f64).collect();
    let scaled = |sums: &[f64]| -> Vec<f64> {
        lens.iter().map(|&l| sums[l] / (q as f64).powi(l as i32) / gamma.powi(l as i32)).collect()
    };
    let fit = |ys: Vec<f64>, deg| polyfit(&xs, &ys, deg).ok_or_else(|| Error::Convergence("singular tail fit".into()));
    let first = fit(scaled(&profile.first), 1)?;
    let second = fit(scaled(&profile.second), 2)?;
    Ok(TailModel { gamma, window: TAIL_WINDOW, first, second })
}

/// Moment sums from a length profile, optionally with the fitted tail added.
pub fn truncated_moments(profile: &LengthProfile, tail: bool) -> Result<MomentSums> {
    let (q, r, big_l) = (profile.q, profile.r, profile.max_len());
    let qf = q as f64;
    let (mut bt, mut btt, mut btx) = (Neumaier::default(), Neumaier::default(), Neumaier::default());
    for l in 1..=big_l {
        let w = qf.powi(-(l as i32));
        bt.add(w * profile.first[l]);
        btt.add(w * profile.second[l]);
        btx.add(l as f64 * qf * w * profile.first[l]);
    }
    let model = if tail && profile.first.iter().chain(&profile.second).any(|&x| x != 0.0) {
        let model = fit_tail(profile)?;
        let g = model.gamma;
        bt.add(tail_sum(&model.first, big_l, g));
        btt.add(tail_sum(&model.second, big_l, g));
        btx.add(qf * tail_sum(&times_length(&model.first, big_l), big_l, g));
        Some(model)
    } else {
        None
    };
    Ok(MomentSums {
        q,
        r,
        bt: Value::Real(bt.sum()),
        btt: Value::Real(btt.sum()),
        btx: Value::Real(btx.sum()),
        provenance: Provenance::Truncated { max_len: big_l, tail: model },
    })
}

/// Convenience: profile plus truncated sums.
pub fn truncated_moments_for(f: &QuasiSpec, max_len: usize, tail: bool, jobs: usize) -> Result<MomentSums> {
    truncated_moments(&length_profile(f, max_len, jobs)?, tail)
}

/// Linear recurrence for per-length sums of `u^t F(n)` over B-set members.
///
/// State: blocks indexed by the number of trailing zeros `z < r`, each holding a vector of the
/// representation space. Appending a nonzero digit `d` maps block `z` to block 0 via `M_d`;
/// appending 0 maps block `z` to block `z + 1` via `M_0`.
#[derive(Debug, Clone)]
pub struct TransferSystem {
    q: u32,
    t: Matrix,
    start: Vector,
    proj: Vector,
}

impl TransferSystem {
    pub fn new(rep: &LinearRepresentation, r: u32) -> TransferSystem {
        let (q, d, r) = (rep.q(), rep.dim(), r as usize);
        let mut nonzero = Matrix::zeros(d, d);
        for digit in 1..q {
            nonzero = &nonzero + rep.matrix(digit);
        }
        let mut t = Matrix::zeros(r * d, r * d);
        for z in 0..r {
            for i in 0..d {
                for j in 0..d {
                    t[(i, z * d + j)] = nonzero[(i, j)].clone();
                    if z + 1 < r {
                        t[((z + 1) * d + i, z * d + j)] = rep.matrix(0)[(i, j)].clone();
                    }
                }
            }
        }
        let mut start = vec![Rational::zero(); r * d];
        start[..d].clone_from_slice(&nonzero.mul_vec(rep.v()));
        let mut proj = vec![Rational::zero(); r * d];
        proj[..d].clone_from_slice(rep.u());
        TransferSystem { q, t, start, proj }
    }

    /// Sum for members of each length `1..=max_len` (index 0 unused).
    pub fn per_length(&self, max_len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero()];
        let mut x = self.start.clone();
        for _ in 1..=max_len {
            out.push(dot(&self.proj, &x));
            x = self.t.mul_vec(&x);
        }
        out
    }

    /// `(sum_l q^{-l} S_l, sum_l l q^{1-l} S_l)`.
    pub fn weighted_sums(&self) -> Result<(Rational, Rational)> {
        let n = self.t.rows();
        let qinv = Rational::new(1.into(), self.q.into());
        let resolvent = &Matrix::identity(n) - &self.t.scale(&qinv);
        let y = solve(&resolvent, &self.start).ok_or(Error::SpectralRadius)?;
        let z = solve(&resolvent, &y).ok_or(Error::SpectralRadius)?;
        Ok((dot(&self.proj, &y) * qinv, dot(&self.proj, &z)))
    }

    /// `sum_l S_l x^l = x P (I - xT)^{-1} X_1`.
    pub fn series(&self, x: f64) -> Result<f64> {
        let n = self.t.rows();
        let t = self.t.to_f64();
        let a: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 } - x * t[k]).collect();
        let b: Vec<f64> = self.start.iter().map(rational_to_f64).collect();
        let y = solve_f64(&a, &b, n).ok_or(Error::SpectralRadius)?;
        Ok(x * self.proj.iter().zip(&y).map(|(p, y)| rational_to_f64(p) * y).sum::<f64>())
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }
}

/// The first- and second-moment systems of an additive function with representation `rep`.
#[derive(Debug, Clone)]
pub struct ExactSystems {
    pub first: TransferSystem,
    pub second: TransferSystem,
}

impl ExactSystems {
    pub fn new(rep: &LinearRepresentation, r: u32) -> Result<ExactSystems> {
        if !rep.is_zero_insensitive() {
            return Err(Error::NotZeroInsensitive);
        }
        let rep = rep.minimize()?;
        let square = rep.kron(&rep)?.minimize()?;
        Ok(ExactSystems { first: TransferSystem::new(&rep, r), second: TransferSystem::new(&square, r) })
    }
}

/// Exact moment sums of the additive function represented by `rep` over the `(q, r)` B-set.
pub fn exact_moments(rep: &LinearRepresentation, r: u32) -> Result<MomentSums> {
    let r = effective_r(r);
    let systems = ExactSystems::new(rep, r)?;
    let (bt, btx) = systems.first.weighted_sums()?;
    let (btt, _) = systems.second.weighted_sums()?;
    Ok(MomentSums {
        q: rep.q(),
        r,
        bt: Value::Exact(bt),
        btt: Value::Exact(btt),
        btx: Value::Exact(btx),
        provenance: Provenance::Exact,
    })
}

/// Exact moment sums for an additive spec carrying a representation.
pub fn exact_moments_for(f: &QuasiSpec) -> Result<MomentSums> {
    if f.mode() != Mode::Additive {
        return Err(Error::InvalidParameter(format!(
            "exact moments need an additive function; {} is multiplicative",
            f.name()
        )));
    }
    let rep = f
        .representation()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no linear representation", f.name())))?;
    exact_moments(rep, f.r())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::naf_weight;
    use crate::funcs::Builtin;
    use crate::quasi::enumerate_bset;
    use crate::regular::fixtures;
    use crate::regular::linalg::rat;

    fn frac(p: i64, q: i64) -> Value {
        Value::Exact(BigRational::new(p.into(), q.into()))
    }

    #[test]
    fn naf_weight_exact_sums() {
        let m = exact_moments(&fixtures::naf_weight(), 2).unwrap();
        assert_eq!(m.bt, frac(16, 3));
        assert_eq!(m.btt, frac(176, 9));
        assert_eq!(m.btx, frac(736, 9));
    }

    #[test]
    fn per_length_sums_match_enumeration() {
        let sys = TransferSystem::new(&fixtures::naf_weight(), 2);
        let per = sys.per_length(14);
        let mut direct = [0i64; 15];
        for n in enumerate_bset(2, 2, 14).unwrap() {
            direct[crate::digits::digit_length(n, 2)] += naf_weight(n) as i64;
        }
        for l in 1..=14 {
            assert_eq!(per[l], rat(direct[l]));
        }
        let x: f64 = 0.3;
        let series: f64 = (1..=14).map(|l| direct[l] as f64 * x.powi(l as i32)).sum::<f64>();
        // tail beyond 14 is below 1e-3 at this x
        assert!((sys.series(x).unwrap() - series).abs() < 1e-3);
    }

    #[test]
    fn zero_function_has_zero_sums() {
        let zero = LinearRepresentation::zero(2, 1).unwrap();
        let m = exact_moments(&zero, 2).unwrap();
        assert_eq!((m.bt.clone(), m.btt.clone(), m.btx.clone()), (Value::zero(), Value::zero(), Value::zero()));
        let one = QuasiSpec::new("one", 2, 3, Mode::Multiplicative, |_| Value::one()).unwrap();
        let m = truncated_moments_for(&one, 12, true, 1).unwrap();
        assert_eq!((m.bt.to_f64(), m.btt.to_f64(), m.btx.to_f64()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn layered_walk_matches_enumeration() {
        let rho = Builtin::OptimalReps.spec().unwrap();
        let fast = length_profile(&rho, 16, 1).unwrap();
        let plain = QuasiSpec::new("rho", 2, 3, Mode::Multiplicative, move |n| rho.eval(n)).unwrap();
        let slow = length_profile(&plain, 16, 1).unwrap();
        assert_eq!(fast.counts, slow.counts);
        for l in 1..=16 {
            assert!((fast.first[l] - slow.first[l]).abs() <= 1e-9 * slow.first[l].abs().max(1.0));
            assert!((fast.second[l] - slow.second[l]).abs() <= 1e-9 * slow.second[l].abs().max(1.0));
        }
        let rho = Builtin::OptimalReps.spec().unwrap();
        assert_eq!(length_profile(&rho, 16, 3).unwrap(), fast);
    }

    #[test]
    fn truncation_with_tail_matches_exact_sums() {
        for b in [Builtin::NafWeight, Builtin::BlockCount { q: 2, block: vec![0, 1, 0, 1] }] {
            let f = b.spec().unwrap();
            let exact = exact_moments_for(&f).unwrap();
            let approx = truncated_moments_for(&f, 40, true, 1).unwrap();
            for (a, e) in [(&approx.bt, &exact.bt), (&approx.btt, &exact.btt), (&approx.btx, &exact.btx)] {
                assert!(
                    (a.to_f64() - e.to_f64()).abs() < 1e-9 * e.to_f64().abs(),
                    "{b}: {} vs {}",
                    a.to_f64(),
                    e.to_f64()
                );
            }
        }
    }

    #[test]
    fn tail_closed_forms() {
        let y: f64 = 0.8;
        for j in 0..=3 {
            let direct: f64 = (1..4000).map(|m| (m as f64).powi(j as i32) * y.powi(m)).sum();
            assert!((power_series_tail(j, y) - direct).abs() < 1e-9 * direct);
        }
        let c = [0.5, -0.25, 0.125];
        let direct: f64 = (11..4000)
            .map(|l| {
                let m = (l - 10) as f64;
                (c[0] + c[1] * m + c[2] * m * m) * y.powi(l)
            })
            .sum();
        assert!((tail_sum(&c, 10, y) - direct).abs() < 1e-12);
        let with_l: f64 = (11..4000)
            .map(|l| {
                let m = (l - 10) as f64;
                l as f64 * (c[0] + c[1] * m + c[2] * m * m) * y.powi(l)
            })
            .sum();
        assert!((tail_sum(&times_length(&c, 10), 10, y) - with_l).abs() < 1e-10);
    }

    #[test]
    fn multiplicative_functions_need_truncation() {
        let rho = Builtin::OptimalReps.spec().unwrap();
        assert!(exact_moments_for(&rho).is_err());
        let bad = QuasiSpec::new("neg", 2, 1, Mode::Multiplicative, |n| Value::from_int(if n == 3 { -1 } else { 1 }))
            .unwrap();
        assert!(matches!(length_profile(&bad, 5, 1), Err(Error::Domain(_))));
    }
}
