use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use digitfn::clt::{
    effective_r, empirical_experiment, exact_moments_for, fit_tail, gf_identity_check, is_degenerate, jacobsthal_f64,
    length_profile, mean_constant, rlt_constants, singularity_constants, truncated_moments, variance_constant, BSeries,
    ExactSystems, MomentSums, Provenance,
};
use digitfn::digits::{naf, to_expansion};
use digitfn::funcs::Builtin;
use digitfn::quasi::{
    bset_counts, bset_growth, enumerate_bset, eval_by_splitting, split_blocks, verify_identity, QuasiSpec,
    Verification, Window,
};
use digitfn::regular::io::{representation_from_json, transducer_from_json};
use digitfn::regular::{check_quasiadditive_minimized, LinearRepresentation};
use digitfn::value::format_real;
use digitfn::{Mode, Value};
use serde_json::{json, Value as Json};

use crate::report::{self, real, reals, status, Report};

#[derive(Debug)]
pub enum CliError {
    Lib(digitfn::Error),
    Io { path: String, source: std::io::Error },
    File { path: String, source: digitfn::Error },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "cannot access {path}: {source}"),
            CliError::File { path, source } => write!(f, "{path}: {source}"),
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
        }
    }
}

impl From<digitfn::Error> for CliError {
    fn from(e: digitfn::Error) -> Self {
        CliError::Lib(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub report: Json,
    /// Every check in the report passed.
    pub pass: bool,
}

impl Outcome {
    fn ok(report: Report) -> Outcome {
        Outcome { report: report.into_json(), pass: true }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse_file<T>(path: &Path, parse: impl Fn(&str) -> digitfn::Result<T>) -> Result<T> {
    parse(&read(path)?).map_err(|source| CliError::File { path: path.display().to_string(), source })
}

fn resolve(name: &str) -> Result<(Builtin, QuasiSpec)> {
    let builtin = Builtin::from_str(name)?;
    let spec = builtin.spec()?;
    Ok((builtin, spec))
}

fn counterexample(f: &QuasiSpec, r: u32, v: &Verification) -> Json {
    match v {
        Verification::Ok => Json::Null,
        Verification::Counterexample(c) => {
            let n = (f.q() as u128).pow(c.k + r) * c.a as u128 + c.b as u128;
            json!({
                "a": c.a,
                "k": c.k,
                "b": c.b,
                "n": u64::try_from(n).map_or_else(|_| Json::from(n.to_string()), Json::from),
                "lhs": report::value(&c.lhs),
                "rhs": report::value(&c.rhs),
            })
        }
    }
}

fn with_mode(f: &QuasiSpec, r: u32, mode: Mode) -> Result<QuasiSpec> {
    let e = f.evaluator();
    Ok(QuasiSpec::new(f.name(), f.q(), r, mode, move |n| e(n))?)
}

pub fn eval(name: &str, ns: &[u64]) -> Result<Outcome> {
    let (builtin, f) = resolve(name)?;
    let mut pass = true;
    let mut values = Vec::new();
    for &n in ns {
        let direct = f.eval(n);
        let mut row = Report::new().with("n", n).with("value", report::value(&direct));
        if builtin.is_quasi() {
            let split = eval_by_splitting(&f, n);
            let blocks = split_blocks(n, f.q(), f.r())?;
            pass &= split == direct;
            row.set("by_splitting", report::value(&split));
            row.set("blocks", blocks.blocks);
        }
        row.set("expansion", to_expansion(n, f.q())?.to_string());
        if matches!(builtin, Builtin::NafWeight | Builtin::NafExp) {
            row.set("naf", naf(n).to_string());
        }
        values.push(row.into_json());
    }
    let report = Report::new()
        .with("function", f.name())
        .with("q", f.q())
        .with("r", f.r())
        .with("mode", f.mode().to_string())
        .with("values", values);
    Ok(Outcome { report: report.into_json(), pass })
}

pub fn split(n: u64, q: u32, r: u32) -> Result<Outcome> {
    let s = split_blocks(n, q, r)?;
    Ok(Outcome::ok(
        Report::new()
            .with("n", n)
            .with("q", q)
            .with("r", r)
            .with("expansion", to_expansion(n, q)?.to_string())
            .with("blocks", s.blocks)
            .with("reduced", s.reduced),
    ))
}

pub fn check_quasi(
    name: &str,
    q: Option<u32>,
    r: Option<u32>,
    mode: Option<&str>,
    a_max: u64,
    k_max: u32,
) -> Result<Outcome> {
    let (_, f) = resolve(name)?;
    if let Some(q) = q {
        if q != f.q() {
            return Err(CliError::Usage(format!("{} is defined in base {}, not {q}", f.name(), f.q())));
        }
    }
    let mode = mode.map(Mode::from_str).transpose()?.unwrap_or(f.mode());
    let r = r.unwrap_or(f.r());
    let g = with_mode(&f, r, mode)?;
    let window = Window { a_max, k_max };
    let basic = g.check_basic_properties(a_max);
    let v = verify_identity(&g, window)?;
    let pass = basic.is_ok() && v.is_ok();
    let mut report = Report::new()
        .with("function", g.name())
        .with("q", g.q())
        .with("r", r)
        .with("mode", mode.to_string())
        .with("window", json!({"a_max": a_max, "k_max": k_max}))
        .with("basic_properties", basic.err().unwrap_or_else(|| "ok".into()));
    if mode == Mode::Multiplicative {
        report.set("growth_exponent", growth_exponent(&g).map_or(Json::Null, real));
    }
    let report = report
        .with("identity", status(v.is_ok()))
        .with("counterexample", counterexample(&g, r, &v))
        .with("status", status(pass));
    Ok(Outcome { report: report.into_json(), pass })
}

/// Arguments sampled by the empirical growth check.
const GROWTH_WINDOW: u64 = 1 << 16;

/// `max |log f(n)| / log n` over `2 <= n < GROWTH_WINDOW`, or `None` if some value is not positive.
fn growth_exponent(f: &QuasiSpec) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for n in 2..GROWTH_WINDOW {
        let v = f.eval(n);
        if !v.is_positive() {
            return None;
        }
        worst = worst.max(v.to_f64().ln().abs() / (n as f64).ln());
    }
    Some(worst)
}

fn representation_summary(path: &Path, rep: &LinearRepresentation) -> Report {
    let minimal = rep.minimize().map(|m| Json::from(m.dim())).unwrap_or(Json::Null);
    Report::new()
        .with("file", path.display().to_string())
        .with("q", rep.q())
        .with("dim", rep.dim())
        .with("minimal_dim", minimal)
        .with("zero_insensitive", rep.is_zero_insensitive())
}

pub fn check_regular(path: &Path, mult: bool, r: Option<u32>) -> Result<Outcome> {
    let rep = parse_file(path, representation_from_json)?;
    let mut report = representation_summary(path, &rep);
    let pass = if mult {
        report.set("property", "quasimultiplicative");
        let r = match r {
            Some(r) => Some(r),
            None => rep.find_quasimultiplicative_parameter()?,
        };
        report.set("r", r);
        match r {
            Some(r) => {
                let raw = rep.check_quasimultiplicative_raw(r);
                let canonical = rep.check_quasimultiplicative(r)?;
                report.set("conditions", json!({"M_0^r = v u^t": raw, "after minimization": canonical}));
                canonical
            }
            None => false,
        }
    } else {
        report.set("property", "quasiadditive");
        let r = match r {
            Some(r) => Some(r),
            None => {
                let mut found = None;
                for s in 0..=rep.dim() as u32 {
                    if check_quasiadditive_minimized(&rep, s)?.holds() {
                        found = Some(s);
                        break;
                    }
                }
                found
            }
        };
        report.set("r", r);
        match r {
            Some(r) => {
                let c = check_quasiadditive_minimized(&rep, r)?;
                report.set(
                    "conditions",
                    json!({
                        "u^t v = 0": c.uv_zero,
                        "U^t (M_0^r - I) v = 0": c.left_orthogonal,
                        "u^t (M_0^r - I) V = 0": c.right_orthogonal,
                        "U^t M_0^r V = 0": c.cross_zero,
                    }),
                );
                report.set("dim_U", c.dim_u);
                report.set("dim_V", c.dim_v);
                c.holds()
            }
            None => false,
        }
    };
    report.set("status", status(pass));
    Ok(Outcome { report: report.into_json(), pass })
}

pub fn check_transducer(path: &Path, r: u32, a_max: u64, k_max: u32) -> Result<Outcome> {
    let t = parse_file(path, transducer_from_json)?;
    let c = t.check_conditions(r)?;
    let machine = t.clone();
    let f =
        QuasiSpec::new(path.display().to_string(), t.q(), r, Mode::Additive, move |n| Value::Exact(machine.eval(n)))?;
    let v = verify_identity(&f, Window { a_max, k_max })?;
    let pass = c.holds() && v.is_ok();
    let report = Report::new()
        .with("file", path.display().to_string())
        .with("q", t.q())
        .with("states", t.states())
        .with("r", r)
        .with(
            "conditions",
            json!({
                "reset": c.reset,
                "reset_output": c.reset_output,
                "trailing_zeros": c.trailing_zeros,
            }),
        )
        .with("identity", status(v.is_ok()))
        .with("counterexample", counterexample(&f, r, &v))
        .with("status", status(pass));
    Ok(Outcome { report: report.into_json(), pass })
}

pub struct ConstantsRequest<'a> {
    pub function: &'a str,
    pub exact: bool,
    pub truncate: Option<usize>,
    pub tail: bool,
    pub terms: u32,
    pub singularity: bool,
    pub jobs: usize,
}

/// Truncation length used when neither `--exact` nor `--truncate` is given and exact moments
/// are unavailable.
const DEFAULT_TRUNCATION: usize = 28;

pub fn constants(req: &ConstantsRequest) -> Result<Outcome> {
    let (builtin, f) = resolve(req.function)?;
    if builtin == Builtin::RltJacobsthal {
        if req.exact || req.truncate.is_some() {
            return Err(CliError::Usage(format!("{} takes --terms instead of --exact or --truncate", f.name())));
        }
        let c = rlt_constants(jacobsthal_f64, req.terms);
        let report = Report::new()
            .with("function", f.name())
            .with("mu", real(c.mu))
            .with("sigma2", real(c.sigma2))
            .with("provenance", json!({"kind": "run-length", "terms": c.terms}))
            .with("tail_params", Json::Null)
            .with("degenerate", c.sigma2.abs() < 1e-12);
        return Ok(Outcome::ok(report));
    }
    if !builtin.is_quasi() {
        return Err(CliError::Lib(digitfn::Error::Domain(format!(
            "{} does not satisfy a functional equation",
            f.name()
        ))));
    }
    let exact = match (req.exact, req.truncate) {
        (true, _) => true,
        (false, Some(_)) => false,
        (false, None) => f.mode() == Mode::Additive && f.representation().is_some(),
    };
    let (q, r) = (f.q(), effective_r(f.r()));
    let (moments, series): (MomentSums, Option<BSeries>) = if exact {
        let m = exact_moments_for(&f)?;
        let series = match (req.singularity, f.representation()) {
            (true, Some(rep)) => Some(BSeries::exact(ExactSystems::new(rep, r)?, q, r)),
            _ => None,
        };
        (m, series)
    } else {
        let max_len = req.truncate.unwrap_or(DEFAULT_TRUNCATION);
        let profile = length_profile(&f, max_len, req.jobs)?;
        let m = truncated_moments(&profile, req.tail)?;
        let series = if req.singularity {
            let tail = if req.tail { Some(fit_tail(&profile)?) } else { None };
            Some(BSeries::from_profile(profile, tail))
        } else {
            None
        };
        (m, series)
    };
    let mu = mean_constant(&moments, moments.q, moments.r);
    let sigma2 = variance_constant(&moments, moments.q, moments.r);
    let (provenance, tail_params) = match &moments.provenance {
        Provenance::Exact => (json!({"kind": "exact"}), Json::Null),
        Provenance::Truncated { max_len, tail } => (
            json!({"kind": "truncated", "max_len": max_len, "tail": tail.is_some()}),
            tail.as_ref().map_or(Json::Null, |t| {
                json!({
                    "gamma": real(t.gamma),
                    "window": t.window,
                    "first": reals(&t.first),
                    "second": reals(&t.second),
                })
            }),
        ),
    };
    let mut report = Report::new()
        .with("function", f.name())
        .with("q", q)
        .with("r", r)
        .with("mode", f.mode().to_string())
        .with("mu", report::value(&mu))
        .with("sigma2", report::value(&sigma2))
        .with("provenance", provenance)
        .with("tail_params", tail_params)
        .with("degenerate", is_degenerate(&sigma2));
    if let Some(series) = series {
        let s = singularity_constants(&series)?;
        report.set("singularity", json!({"alpha0": real(s.alpha0), "mu": real(s.mu), "sigma2": real(s.sigma2)}));
    }
    Ok(Outcome::ok(report))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    create(path)?.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn experiment(
    name: &str,
    ks: &[u32],
    out: Option<&Path>,
    histogram: Option<&Path>,
    jobs: usize,
) -> Result<Outcome> {
    let (_, f) = resolve(name)?;
    let mut rows = Vec::new();
    let mut csv = String::from("k,mean,variance,ks_distance\n");
    let mut hist = String::from("k,lo,hi,count\n");
    for &k in ks {
        let e = empirical_experiment(&f, k, jobs)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            k,
            format_real(e.mean),
            format_real(e.variance),
            format_real(e.ks_distance)
        ));
        for b in &e.histogram {
            hist.push_str(&format!("{},{},{},{}\n", k, format_real(b.lo), format_real(b.hi), b.count));
        }
        rows.push(json!({
            "k": k,
            "count": e.count,
            "mean": real(e.mean),
            "variance": real(e.variance),
            "ks_distance": real(e.ks_distance),
            "degenerate": e.degenerate,
        }));
    }
    if let Some(path) = out {
        write_all(path, &csv)?;
    }
    if let Some(path) = histogram {
        write_all(path, &hist)?;
    }
    Ok(Outcome::ok(Report::new().with("function", f.name()).with("rows", rows)))
}

pub fn gf_check(name: &str, max_k: usize, t_values: &[i32]) -> Result<Outcome> {
    let (_, f) = resolve(name)?;
    let g = gf_identity_check(&f, max_k, t_values)?;
    let mismatches: Vec<Json> = g
        .mismatches
        .iter()
        .map(|m| json!({"t": m.t, "k": m.k, "closed_form": m.closed_form, "direct": m.direct}))
        .collect();
    let pass = g.holds();
    let report = Report::new()
        .with("function", g.function)
        .with("r", g.r)
        .with("max_k", g.max_k)
        .with("t", g.t_values)
        .with("exact", g.exact)
        .with("checked", g.checked)
        .with("mismatches", mismatches)
        .with("status", status(pass));
    Ok(Outcome { report: report.into_json(), pass })
}

/// Members listed by `bset --list` at most.
const LIST_LIMIT: u128 = 1 << 16;

pub fn bset(q: u32, r: u32, max_len: usize, list: bool) -> Result<Outcome> {
    let counts = bset_counts(q, r, max_len)?;
    let as_json = |c: u128| u64::try_from(c).map_or_else(|_| Json::from(c.to_string()), Json::from);
    let mut report = Report::new()
        .with("q", q)
        .with("r", r)
        .with("max_len", max_len)
        .with("counts", counts[1..].iter().map(|&c| as_json(c)).collect::<Vec<_>>())
        .with("growth", real(bset_growth(q, r)?));
    if list {
        let total: u128 = counts.iter().sum();
        if total > LIST_LIMIT {
            return Err(CliError::Usage(format!("{total} members exceed the listing limit of {LIST_LIMIT}")));
        }
        report.set("members", enumerate_bset(q, r, max_len)?.collect::<Vec<u64>>());
    }
    Ok(Outcome::ok(report))
}
