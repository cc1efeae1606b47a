use serde::Serialize;

use super::moments::{tail_sum, ExactSystems, LengthProfile, TailModel};
use crate::error::{Error, Result};
use crate::quasi::bset_growth;

/// Step for the first derivative of α.
pub const MEAN_STEP: f64 = 1e-4;
/// Step for the second derivative of log α.
pub const VARIANCE_STEP: f64 = 1e-3;

enum Source {
    Exact(Box<ExactSystems>),
    Profile { profile: LengthProfile, tail: Option<TailModel> },
}

/// Second-order model `B(x, t) ~ B_0(x) + t B_1(x) + t^2/2 B_2(x)` where `B_j(x)` sums `λ^j x^l`
/// over the B-set.
pub struct BSeries {
    q: u32,
    r: u32,
    source: Source,
}

impl BSeries {
    pub fn exact(systems: ExactSystems, q: u32, r: u32) -> BSeries {
        BSeries { q, r, source: Source::Exact(Box::new(systems)) }
    }

    pub fn from_profile(profile: LengthProfile, tail: Option<TailModel>) -> BSeries {
        BSeries { q: profile.q, r: profile.r, source: Source::Profile { profile, tail } }
    }

    /// Count generating function `(q-1)x / (1 - (q-1)x(1 + x + ... + x^{r-1}))`.
    pub fn b0(&self, x: f64) -> f64 {
        let c = (self.q - 1) as f64;
        let geometric: f64 = (0..self.r).map(|j| x.powi(j as i32)).sum();
        c * x / (1.0 - c * x * geometric)
    }

    fn profile_series(&self, sums: &[f64], coeffs: Option<&[f64]>, gamma: f64, x: f64) -> f64 {
        let head: f64 = sums.iter().enumerate().skip(1).map(|(l, s)| s * x.powi(l as i32)).sum();
        let tail = coeffs.map_or(0.0, |c| tail_sum(c, sums.len() - 1, gamma * self.q as f64 * x));
        head + tail
    }

    pub fn b1(&self, x: f64) -> Result<f64> {
        match &self.source {
            Source::Exact(s) => s.first.series(x),
            Source::Profile { profile, tail } => Ok(self.profile_series(
                &profile.first,
                tail.as_ref().map(|t| t.first.as_slice()),
                tail.as_ref().map_or(0.0, |t| t.gamma),
                x,
            )),
        }
    }

    pub fn b2(&self, x: f64) -> Result<f64> {
        match &self.source {
            Source::Exact(s) => s.second.series(x),
            Source::Profile { profile, tail } => Ok(self.profile_series(
                &profile.second,
                tail.as_ref().map(|t| t.second.as_slice()),
                tail.as_ref().map_or(0.0, |t| t.gamma),
                x,
            )),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.b0(x) + t * self.b1(x)? + 0.5 * t * t * self.b2(x)?)
    }

    /// Upper end of the search interval: just below the pole of the count series.
    fn radius(&self) -> Result<f64> {
        Ok(0.999 / bset_growth(self.q, self.r)?.max(1.0))
    }
}

/// The real root near `1/q` of `x + x^r B(x, t) = 1`, by Newton steps safeguarded with bisection.
pub fn dominant_singularity(series: &BSeries, t: f64) -> Result<f64> {
    let r = series.r as i32;
    let g = |x: f64| -> Result<f64> { Ok(x + x.powi(r) * series.eval(x, t)? - 1.0) };
    let x0 = 1.0 / series.q as f64;
    if t == 0.0 {
        return Ok(x0);
    }
    let radius = series.radius()?;
    let (mut lo, mut hi);
    if g(x0)? > 0.0 {
        hi = x0;
        lo = x0;
        while g(lo)? > 0.0 {
            lo *= 0.9;
            if lo < 1e-12 {
                return Err(Error::Convergence(format!("no sign change below 1/q at t = {t}")));
            }
        }
    } else {
        lo = x0;
        hi = x0;
        while g(hi)? < 0.0 {
            hi = (hi * 1.01).min(radius);
            if hi >= radius && g(hi)? < 0.0 {
                return Err(Error::Convergence(format!("no root below the radius {radius} at t = {t}")));
            }
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let h = 1e-7 * x;
        let slope = (g(x + h)? - g(x - h)?) / (2.0 * h);
        let newton = x - gx / slope;
        x = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-16 * x || (gx / slope).abs() < 1e-17 * x {
            return Ok(x);
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityConstants {
    pub alpha0: f64,
    /// `-q α'(0)` by central differences.
    pub mu: f64,
    /// `-(log α)''(0)` by central differences.
    pub sigma2: f64,
}

pub fn singularity_constants(series: &BSeries) -> Result<SingularityConstants> {
    let alpha = |t: f64| dominant_singularity(series, t);
    let alpha0 = alpha(0.0)?;
    let h = MEAN_STEP;
    let mu = -(series.q as f64) * (alpha(h)? - alpha(-h)?) / (2.0 * h);
    let h = VARIANCE_STEP;
    let sigma2 = -(alpha(h)?.ln() - 2.0 * alpha0.ln() + alpha(-h)?.ln()) / (h * h);
    Ok(SingularityConstants { alpha0, mu, sigma2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::moments::{fit_tail, length_profile, ExactSystems};
    use crate::funcs::Builtin;
    use crate::regular::fixtures;

    #[test]
    fn alpha_at_zero_is_one_over_q() {
        let s = BSeries::exact(ExactSystems::new(&fixtures::naf_weight(), 2).unwrap(), 2, 2);
        assert_eq!(dominant_singularity(&s, 0.0).unwrap(), 0.5);
        // the equation holds at 1/q with t = 0
        assert!((0.5 + 0.25 * s.b0(0.5) - 1.0).abs() < 1e-15);
        let root = dominant_singularity(&s, 0.05).unwrap();
        assert!((root + root * root * s.eval(root, 0.05).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn naf_weight_constants_from_the_singularity() {
        let s = BSeries::exact(ExactSystems::new(&fixtures::naf_weight(), 2).unwrap(), 2, 2);
        let c = singularity_constants(&s).unwrap();
        assert!((c.mu - 1.0 / 3.0).abs() < 1e-6, "{}", c.mu);
        assert!((c.sigma2 - 2.0 / 27.0).abs() < 1e-5, "{}", c.sigma2);
    }

    #[test]
    fn exponential_bridge_scales_the_mean() {
        let f = Builtin::NafExp.spec().unwrap();
        let profile = length_profile(&f, 40, 1).unwrap();
        let tail = fit_tail(&profile).unwrap();
        let c = singularity_constants(&BSeries::from_profile(profile, Some(tail))).unwrap();
        assert!((c.mu - std::f64::consts::LN_2 / 3.0).abs() < 1e-4, "{}", c.mu);
    }
}
