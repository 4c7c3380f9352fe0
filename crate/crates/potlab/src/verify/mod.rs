//! Experiment harness: reproduces each boundedness relation, scaling
//! exponent, counterexample divergence rate, and interpolation identity at
//! desk scale, and classifies exponent triples into the boundedness regions
//! of the operator.

use crate::funcfam::FuncError;
use crate::kernel::KernelError;
use crate::lorentz::LorentzError;
use crate::operator::OperatorError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod catalog;
mod classify;
mod divergence;
mod halfnorm;
mod interp;
mod oneil;
mod scaling;
mod sharpness;

pub use catalog::{run_catalog_experiment, CatalogExperiment};
pub use classify::{classify_exponents, compute_barycentric, RegionLabel, RegionVerdict};
pub use divergence::{
    run_critical_divergence, run_critical_divergence_linear, CriticalDivergenceConfig,
};
pub use halfnorm::{run_half_norm_uniformity, HalfNormPair};
pub use interp::run_interpolation_crossover;
pub use oneil::run_oneil_check;
pub use sharpness::{
    run_mollifier_blowup, run_sharpness_endpoint, run_sharpness_interior, QEndpoint,
};
pub use scaling::{run_scaling_lower, run_scaling_upper};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("superlevel set empty at lambda={lambda} (quadrature under-resolution)")]
    EmptySuperlevel { lambda: f64 },
    #[error("outer radius {outer} too small for profile radius {needed}")]
    OuterRadiusTooSmall { outer: f64, needed: f64 },
    #[error("fitted lower constant not positive: {0}")]
    NonPositiveBound(f64),
    #[error("rearrangement envelope violated at t={t}: h*(t)={value} exceeds {bound}")]
    EnvelopeViolation { t: f64, value: f64, bound: f64 },
}

/// Reciprocal exponent triple `(1/p, 1/q, 1/r)`; `inv_r = 0` encodes `r = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub inv_p: f64,
    pub inv_q: f64,
    pub inv_r: f64,
}

impl ExponentTriple {
    pub fn new(inv_p: f64, inv_q: f64, inv_r: f64) -> Result<Self, VerifyError> {
        if !(0.0..=1.0).contains(&inv_p) || !(0.0..=1.0).contains(&inv_q) {
            return Err(VerifyError::InvalidExponents(format!(
                "1/p and 1/q must lie in [0,1] (got {inv_p}, {inv_q})"
            )));
        }
        if !(inv_r >= 0.0) || !inv_r.is_finite() {
            return Err(VerifyError::InvalidExponents(format!(
                "1/r must be a nonnegative real (got {inv_r})"
            )));
        }
        Ok(Self {
            inv_p,
            inv_q,
            inv_r,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One named sub-criterion of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Experiment outcome: the measured sequence, the fitted rate model, the
/// expected rate, and the verdict. `checks` carries every named
/// sub-criterion; the verdict passes only when all of them do.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameter_sequence: Vec<f64>,
    pub measured: Vec<f64>,
    pub fit_slope: f64,
    pub fit_intercept: f64,
    pub r_squared: f64,
    pub expected_slope: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub checks: Vec<CheckResult>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Assemble a report whose verdict is the conjunction of the checks.
    pub fn from_checks(
        experiment_id: &str,
        parameter_sequence: Vec<f64>,
        measured: Vec<f64>,
        fit: Option<(f64, f64, f64)>,
        expected_slope: f64,
        tolerance: f64,
        checks: Vec<CheckResult>,
    ) -> Self {
        let (fit_slope, fit_intercept, r_squared) = fit.unwrap_or((0.0, 0.0, 1.0));
        let verdict = if checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            experiment_id: experiment_id.to_string(),
            parameter_sequence,
            measured,
            fit_slope,
            fit_intercept,
            r_squared,
            expected_slope,
            tolerance,
            verdict,
            checks,
        }
    }

    /// One-line human-readable summary.
    pub fn summary_line(&self) -> String {
        let status = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        format!(
            "[{status}] {}: slope={:.6} expected={:.6} r2={:.4} ({} checks)",
            self.experiment_id,
            self.fit_slope,
            self.expected_slope,
            self.r_squared,
            self.checks.len()
        )
    }
}

/// Standard check pair for a slope experiment: slope within tolerance of the
/// expectation, fit quality at least `min_r2`.
pub(crate) fn slope_checks(
    fit: &crate::fitting::LineFit,
    expected: f64,
    tolerance: f64,
    min_r2: f64,
) -> Vec<CheckResult> {
    vec![
        CheckResult::new(
            "slope_matches_expected",
            (fit.slope - expected).abs() <= tolerance,
            format!(
                "fitted {:.6}, expected {:.6}, tolerance {:.6}",
                fit.slope, expected, tolerance
            ),
        ),
        CheckResult::new(
            "fit_quality",
            fit.r_squared >= min_r2,
            format!("r_squared {:.6} (needs >= {min_r2})", fit.r_squared),
        ),
    ]
}

/// Shared default potential parameters for the 1-D experiments.
#[cfg(test)]
pub(crate) fn default_params_1d() -> crate::params::PotentialParams {
    crate::params::PotentialParams::new(1, 0.5).expect("valid default parameters")
}

/// Require a sequence to be geometric within a relative tolerance.
pub(crate) fn require_geometric(seq: &[f64], what: &str) -> Result<(), VerifyError> {
    if seq.len() < 2 {
        return Err(VerifyError::Precondition(format!(
            "{what} needs at least two entries"
        )));
    }
    let ratio = seq[1] / seq[0];
    for w in seq.windows(2) {
        let r = w[1] / w[0];
        if !r.is_finite() || (r / ratio - 1.0).abs() > 1e-9 {
            return Err(VerifyError::Precondition(format!(
                "{what} must be geometric (ratios {ratio} vs {r})"
            )));
        }
    }
    Ok(())
}
