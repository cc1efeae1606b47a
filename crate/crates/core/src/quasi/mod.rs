//! The functional-equation engine: verification of `f(q^{k+r} a + b) = f(a) ∘ f(b)`,
//! closure properties, splitting into blocks and B-set enumeration.

mod bset;
mod split;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::digits::check_base;
use crate::error::{Error, Result};
use crate::regular::LinearRepresentation;
use crate::value::{Mode, Value};

pub use bset::{bset_counts, bset_growth, enumerate_bset, for_each_bset_member, BSetIter};
pub use split::{eval_by_splitting, split_blocks, SplitEvaluator, SplitResult};

pub type Evaluator = Arc<dyn Fn(u64) -> Value + Send + Sync>;

/// A digital function together with its base, parameter and mode.
///
/// The optional linear representation, when present, must describe the same sequence as the
/// evaluator; it is used for fast enumeration and exact moment computations.
#[derive(Clone)]
pub struct QuasiSpec {
    name: String,
    q: u32,
    r: u32,
    mode: Mode,
    eval: Evaluator,
    representation: Option<Arc<LinearRepresentation>>,
}

impl fmt::Debug for QuasiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuasiSpec")
            .field("name", &self.name)
            .field("q", &self.q)
            .field("r", &self.r)
            .field("mode", &self.mode)
            .field("representation", &self.representation.as_ref().map(|rep| rep.dim()))
            .finish()
    }
}

impl QuasiSpec {
    pub fn new<F>(name: impl Into<String>, q: u32, r: u32, mode: Mode, eval: F) -> Result<Self>
    where
        F: Fn(u64) -> Value + Send + Sync + 'static,
    {
        check_base(q)?;
        Ok(QuasiSpec { name: name.into(), q, r, mode, eval: Arc::new(eval), representation: None })
    }

    pub fn with_representation(mut self, rep: LinearRepresentation) -> Result<Self> {
        if rep.q() != self.q {
            return Err(Error::Composition(format!(
                "representation base {} differs from function base {}",
                rep.q(),
                self.q
            )));
        }
        self.representation = Some(Arc::new(rep));
        Ok(self)
    }

    /// Same function, claimed parameter replaced by `r`.
    pub fn with_parameter(&self, r: u32) -> QuasiSpec {
        QuasiSpec { r, ..self.clone() }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn representation(&self) -> Option<&LinearRepresentation> {
        self.representation.as_deref()
    }

    pub fn eval(&self, n: u64) -> Value {
        (self.eval)(n)
    }

    pub fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.eval)
    }

    /// λ(n): `log f(n)` in multiplicative mode, `f(n)` in additive mode.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        let value = self.eval(n);
        match self.mode {
            Mode::Additive => Ok(value.to_f64()),
            Mode::Multiplicative => {
                if !value.is_positive() {
                    return Err(Error::Domain(format!("{}({n}) = {value} is not positive", self.name)));
                }
                Ok(value.to_f64().ln())
            }
        }
    }

    /// Checks `f(0)` and `f(qa) = f(a)` for `a <= a_max`.
    pub fn check_basic_properties(&self, a_max: u64) -> std::result::Result<(), String> {
        let f0 = self.eval(0);
        let zero_ok = match self.mode {
            Mode::Additive => f0.approx_eq(&Value::zero()),
            Mode::Multiplicative => {
                f0.approx_eq(&Value::one()) || (0..=a_max).all(|n| self.eval(n).approx_eq(&Value::zero()))
            }
        };
        if !zero_ok {
            return Err(format!("f(0) = {f0} violates the {} normalisation", self.mode));
        }
        for a in 0..=a_max {
            let qa = a.checked_mul(self.q as u64).ok_or("window overflows u64")?;
            if !self.eval(qa).approx_eq(&self.eval(a)) {
                return Err(format!("f({qa}) != f({a})"));
            }
        }
        Ok(())
    }
}

/// Brute-force window for the defining identity: all `a <= a_max`, `k <= k_max`, `b < q^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub a_max: u64,
    pub k_max: u32,
}

impl Default for Window {
    fn default() -> Self {
        Window { a_max: 64, k_max: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub a: u64,
    pub k: u32,
    pub b: u64,
    /// f(q^{k+r} a + b)
    pub lhs: Value,
    /// f(a) + f(b) or f(a) f(b)
    pub rhs: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verification {
    Ok,
    Counterexample(Counterexample),
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

/// Checks the defining identity on the window, reporting the first violation in
/// lexicographic `(a, k, b)` order.
pub fn verify_identity(f: &QuasiSpec, window: Window) -> Result<Verification> {
    verify_with_parameter(f, f.r, window)
}

fn verify_with_parameter(f: &QuasiSpec, r: u32, window: Window) -> Result<Verification> {
    let q = f.q as u64;
    let overflow = || Error::Overflow(format!("window a <= {}, k <= {} with r = {r}", window.a_max, window.k_max));
    let top = q.checked_pow(window.k_max + r).ok_or_else(overflow)?;
    top.checked_mul(window.a_max + 1).ok_or_else(overflow)?;

    // f(b) for every b < q^{k_max} is reused across all a.
    let b_max = q.pow(window.k_max);
    let fb: Vec<Value> = (0..b_max).map(|b| f.eval(b)).collect();
    for a in 0..=window.a_max {
        let fa = f.eval(a);
        for k in 0..=window.k_max {
            let shift = q.pow(k + r);
            for b in 0..q.pow(k) {
                let n = shift * a + b;
                let lhs = f.eval(n);
                let rhs = f.mode.combine(&fa, &fb[b as usize]);
                if !lhs.approx_eq(&rhs) {
                    return Ok(Verification::Counterexample(Counterexample { a, k, b, lhs, rhs }));
                }
            }
        }
    }
    Ok(Verification::Ok)
}

/// Re-checks the identity at a larger parameter `s >= r`.
pub fn monotone_parameter_check(f: &QuasiSpec, s: u32, window: Window) -> Result<Verification> {
    if s < f.r {
        return Err(Error::InvalidParameter(format!("s = {s} is smaller than r = {}", f.r)));
    }
    verify_with_parameter(f, s, window)
}

/// The linear combination `alpha f + beta g` of two additive functions in the same base.
pub fn combine(f: &QuasiSpec, g: &QuasiSpec, alpha: &BigRational, beta: &BigRational) -> Result<QuasiSpec> {
    if f.mode != Mode::Additive || g.mode != Mode::Additive {
        return Err(Error::Composition("linear combinations need two additive functions".into()));
    }
    if f.q != g.q {
        return Err(Error::Composition(format!("bases differ: {} vs {}", f.q, g.q)));
    }
    let (fe, ge) = (f.evaluator(), g.evaluator());
    let (a, b) = (alpha.clone(), beta.clone());
    let name = format!("{}*{} + {}*{}", alpha, f.name, beta, g.name);
    let spec = QuasiSpec::new(name, f.q, f.r.max(g.r), Mode::Additive, move |n| &fe(n).scale(&a) + &ge(n).scale(&b))?;
    match (f.representation(), g.representation()) {
        (Some(rf), Some(rg)) => spec.with_representation(rf.linear_combination(rg, alpha, beta)?),
        _ => Ok(spec),
    }
}

/// Base of the exponential/logarithm used by [`exp_log_bridge`].
#[derive(Debug, Clone, PartialEq)]
pub enum LogBase {
    Natural,
    Rational(BigRational),
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Natural => f.write_str("e"),
            LogBase::Rational(c) => write!(f, "{c}"),
        }
    }
}

/// Number of arguments on which positivity is checked before taking logarithms.
const BRIDGE_CHECK_LIMIT: u64 = 1 << 14;

/// Additive `f` becomes `c^f`; positive multiplicative `f` becomes `log_c f`. Same `q` and `r`.
pub fn exp_log_bridge(f: &QuasiSpec, base: LogBase) -> Result<QuasiSpec> {
    if let LogBase::Rational(c) = &base {
        if !c.is_positive() {
            return Err(Error::Domain(format!("base {c} must be positive")));
        }
        if c.is_one() && f.mode == Mode::Multiplicative {
            return Err(Error::Domain("logarithm base must differ from 1".into()));
        }
    }
    let fe = f.evaluator();
    match f.mode {
        Mode::Additive => {
            let name = format!("{}^{}", base, f.name);
            QuasiSpec::new(name, f.q, f.r, Mode::Multiplicative, move |n| exp_value(&base, &fe(n)))
        }
        Mode::Multiplicative => {
            let limit = BRIDGE_CHECK_LIMIT.min((f.q as u64).saturating_pow(12));
            if let Some(n) = (0..limit).find(|&n| !f.eval(n).is_positive()) {
                return Err(Error::Domain(format!("{}({n}) = {} is not positive", f.name, f.eval(n))));
            }
            let name = format!("log_{}({})", base, f.name);
            QuasiSpec::new(name, f.q, f.r, Mode::Additive, move |n| log_value(&base, &fe(n)))
        }
    }
}

fn exp_value(base: &LogBase, x: &Value) -> Value {
    match (base, x) {
        (LogBase::Rational(c), Value::Exact(e)) if e.is_integer() => match e.to_integer().to_i32() {
            Some(k) => Value::Exact(num_traits::pow::Pow::pow(c, k)),
            None => Value::Real(crate::value::rational_to_f64(c).powf(x.to_f64())),
        },
        (LogBase::Rational(c), _) => Value::Real(crate::value::rational_to_f64(c).powf(x.to_f64())),
        (LogBase::Natural, _) => Value::Real(x.to_f64().exp()),
    }
}

fn log_value(base: &LogBase, x: &Value) -> Value {
    if let (LogBase::Rational(c), Value::Exact(v)) = (base, x) {
        if let Some(k) = exact_log(c, v) {
            return Value::Exact(BigRational::from_integer(BigInt::from(k)));
        }
    }
    let v = x.to_f64();
    if v <= 0.0 {
        return Value::Real(f64::NAN);
    }
    match base {
        LogBase::Natural => Value::Real(v.ln()),
        LogBase::Rational(c) => Value::Real(v.ln() / crate::value::rational_to_f64(c).ln()),
    }
}

/// Integer `k` with `c^k = v`, if there is one.
fn exact_log(c: &BigRational, v: &BigRational) -> Option<i64> {
    if !v.is_positive() || c.is_one() {
        return None;
    }
    if v.is_one() {
        return Some(0);
    }
    // Orient so that we multiply towards v.
    let (step, sign) =
        if (c > &BigRational::one()) == (v > &BigRational::one()) { (c.clone(), 1) } else { (c.recip(), -1) };
    let mut power = BigRational::one();
    for k in 1..=4096i64 {
        power *= &step;
        if &power == v {
            return Some(sign * k);
        }
        if (step > BigRational::one() && &power > v) || (step < BigRational::one() && &power < v) {
            return None;
        }
    }
    None
}

/// Convenience: zero check on an exact value.
#[cfg(test)]
fn is_exact_zero(v: &Value) -> bool {
    use num_traits::Zero;
    v.as_exact().map(|x| x.is_zero()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{digit_sum, naf_weight};
    use crate::funcs::Builtin;

    fn hn_spec(r: u32) -> QuasiSpec {
        QuasiSpec::new("naf-weight", 2, r, Mode::Additive, |n| Value::from(naf_weight(n))).unwrap()
    }

    /// Independent brute force of the first failing triple.
    fn first_failure(f: impl Fn(u64) -> u64, r: u32, a_max: u64, k_max: u32) -> Option<(u64, u32, u64)> {
        for a in 0..=a_max {
            for k in 0..=k_max {
                for b in 0..(1u64 << k) {
                    if f((a << (k + r)) + b) != f(a) + f(b) {
                        return Some((a, k, b));
                    }
                }
            }
        }
        None
    }

    #[test]
    fn naf_weight_identity() {
        let w = Window { a_max: 32, k_max: 6 };
        assert!(verify_identity(&hn_spec(2), w).unwrap().is_ok());
        let expected = first_failure(naf_weight, 1, 32, 6).expect("r = 1 must fail");
        match verify_identity(&hn_spec(1), w).unwrap() {
            Verification::Counterexample(c) => {
                assert_eq!((c.a, c.k, c.b), expected);
                assert!(!c.lhs.approx_eq(&c.rhs));
            }
            Verification::Ok => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn opt_reps_identity() {
        let rho = Builtin::OptimalReps.spec().unwrap();
        assert_eq!(rho.r(), 3);
        assert!(verify_identity(&rho, Window { a_max: 32, k_max: 6 }).unwrap().is_ok());
    }

    #[test]
    fn larger_parameters_keep_the_identity() {
        let w = Window { a_max: 16, k_max: 5 };
        assert!(monotone_parameter_check(&hn_spec(2), 3, w).unwrap().is_ok());
        assert!(monotone_parameter_check(&hn_spec(2), 5, w).unwrap().is_ok());
        let rho = Builtin::OptimalReps.spec().unwrap();
        assert!(monotone_parameter_check(&rho, 4, w).unwrap().is_ok());
        assert!(monotone_parameter_check(&hn_spec(2), 1, w).is_err());
    }

    #[test]
    fn window_overflow_is_reported() {
        let f = hn_spec(2);
        let w = Window { a_max: u64::MAX / 2, k_max: 40 };
        assert!(matches!(verify_identity(&f, w), Err(Error::Overflow(_))));
    }

    #[test]
    fn combinations() {
        let one = BigRational::one();
        let f = hn_spec(2);
        let zero = combine(&f, &f, &one, &-one.clone()).unwrap();
        assert_eq!(zero.r(), 2);
        assert!((0..200).all(|n| is_exact_zero(&zero.eval(n))));

        let g = Builtin::AdjustedGray.spec().unwrap();
        let f = Builtin::NafWeight.spec().unwrap();
        let sum = combine(&f, &g, &one, &one).unwrap();
        assert_eq!(sum.r(), 2);
        assert!(verify_identity(&sum, Window { a_max: 32, k_max: 6 }).unwrap().is_ok());
        let rep = sum.representation().expect("both summands carry representations");
        for n in 0..512 {
            assert_eq!(Value::Exact(rep.eval(n)), sum.eval(n));
        }

        let enlarged = combine(&g, &f, &one, &<BigRational as num_traits::Zero>::zero()).unwrap();
        assert_eq!(enlarged.r(), 2);
        assert!((0..200).all(|n| enlarged.eval(n) == g.eval(n)));

        let rho = Builtin::OptimalReps.spec().unwrap();
        assert!(matches!(combine(&f, &rho, &one, &one), Err(Error::Composition(_))));
    }

    #[test]
    fn exp_and_log() {
        let s2 = QuasiSpec::new("digit-sum", 2, 0, Mode::Additive, |n| Value::from(digit_sum(n, 2).unwrap())).unwrap();
        let two = LogBase::Rational(BigRational::from_integer(2.into()));
        let pow = exp_log_bridge(&s2, two.clone()).unwrap();
        assert_eq!(pow.mode(), Mode::Multiplicative);
        for n in 0..1024u64 {
            assert_eq!(pow.eval(n), Value::from(1u64 << n.count_ones()));
            assert!(pow.eval(n).is_exact());
        }
        let back = exp_log_bridge(&pow, two).unwrap();
        for n in 0..1024u64 {
            assert!(back.eval(n).is_exact());
            assert_eq!(back.eval(n), s2.eval(n));
        }

        let rho = Builtin::OptimalReps.spec().unwrap();
        let log_rho = exp_log_bridge(&rho, LogBase::Natural).unwrap();
        assert_eq!((log_rho.mode(), log_rho.r()), (Mode::Additive, 3));
        assert!(verify_identity(&log_rho, Window { a_max: 32, k_max: 6 }).unwrap().is_ok());

        let signed =
            QuasiSpec::new("bad", 2, 0, Mode::Multiplicative, |n| Value::from_int(1 - (n as i64 % 3))).unwrap();
        assert!(matches!(exp_log_bridge(&signed, LogBase::Natural), Err(Error::Domain(_))));
    }

    #[test]
    fn basic_properties_of_builtins() {
        for b in Builtin::all_quasi() {
            let spec = b.spec().unwrap();
            spec.check_basic_properties(512).unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
        }
    }
}
