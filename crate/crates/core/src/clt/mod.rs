//! Generating functions and central limit constants.
//!
//! For a B-set member `n` let `λ(n) = f(n)` (additive) or `log f(n)` (multiplicative). The
//! constants are computed from `B_t(1/q, 0) = sum q^{-l(n)} λ(n)`, `B_tt(1/q, 0) = sum q^{-l(n)} λ(n)^2`
//! and `B_tx(1/q, 0) = sum l(n) q^{1-l(n)} λ(n)`.

mod constants;
mod experiment;
mod gf;
mod moments;
mod singularity;

pub use constants::{is_degenerate, jacobsthal_f64, mean_constant, rlt_constants, variance_constant, RltConstants};
pub use experiment::{empirical_experiment, normal_cdf, ExperimentReport, HistogramBin, HISTOGRAM_EDGES};
pub use gf::{gf_coefficients, gf_identity_check, GfMismatch, GfReport};
pub use moments::{
    exact_moments, exact_moments_for, fit_tail, length_profile, truncated_moments, truncated_moments_for, ExactSystems,
    LengthProfile, MomentSums, Provenance, TailModel, TransferSystem, TAIL_WINDOW,
};
pub use singularity::{
    dominant_singularity, singularity_constants, BSeries, SingularityConstants, MEAN_STEP, VARIANCE_STEP,
};

/// B-set parameter used for a function with parameter `r`: the identity with `r = 0` implies it
/// with `r = 1`, and the B-set needs `r >= 1`.
pub fn effective_r(r: u32) -> u32 {
    r.max(1)
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.compensation
    }
}
