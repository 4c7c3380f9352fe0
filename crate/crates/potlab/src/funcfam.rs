//! Exactly evaluable test-function families: indicators, power-log profiles,
//! dilates, mollifiers, constants, and polynomial-taper bumps. These are the
//! inputs of every construction and counterexample experiment.

use crate::fitting::{self, TailBehavior};
use crate::params::{unit_ball_volume, unit_sphere_area};
use crate::quad;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FuncError {
    #[error("invalid function: {0}")]
    Invalid(String),
    #[error("function has center of dimension {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("norm quadrature inconclusive after {halvings} cutoff halvings")]
    InconclusiveDivergence { halvings: usize },
    #[error("operation requires a radial function")]
    NotRadial,
    #[error("exponent p must satisfy 1 <= p <= inf (got {0})")]
    ExponentOutOfRange(f64),
}

/// Closed-form test function on `ℝⁿ`, evaluable exactly at any point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticFunction {
    /// Indicator of the ball `B(center, radius)`.
    Indicator { center: Vec<f64>, radius: f64 },
    /// `|x|^{-a} log(e/|x|)^{-b}` on the punctured ball `B(0, rho) \ {0}`,
    /// zero at the origin and outside.
    PowerLog {
        power_exp: f64,
        log_exp: f64,
        support_radius: f64,
    },
    /// `x -> lambda^{norm_exp} base(lambda x)` with `lambda >= 1`.
    Dilate {
        base: Box<AnalyticFunction>,
        lambda: f64,
        norm_exp: f64,
    },
    /// `1_{B(0,eps)} / |B(0,eps)|`; integrates to 1 exactly.
    Mollifier { epsilon: f64 },
    Constant { value: f64 },
    /// Radial plateau: 1 on `B(0, inner)`, 0 outside `B(0, outer)`,
    /// quintic polynomial taper between.
    SmoothBump { inner: f64, outer: f64 },
}

impl AnalyticFunction {
    pub fn validate(&self, n: usize) -> Result<(), FuncError> {
        match self {
            Self::Indicator { center, radius } => {
                if center.len() != n {
                    return Err(FuncError::DimensionMismatch {
                        got: center.len(),
                        expected: n,
                    });
                }
                if !(*radius > 0.0) {
                    return Err(FuncError::Invalid(format!(
                        "indicator radius must be positive (got {radius})"
                    )));
                }
            }
            Self::PowerLog {
                power_exp,
                log_exp,
                support_radius,
            } => {
                if !(*support_radius > 0.0 && *support_radius <= 1.0) {
                    return Err(FuncError::Invalid(format!(
                        "power-log support radius must lie in (0, 1] (got {support_radius})"
                    )));
                }
                if !power_exp.is_finite() || !log_exp.is_finite() {
                    return Err(FuncError::Invalid("power-log exponents must be finite".into()));
                }
            }
            Self::Dilate {
                base,
                lambda,
                norm_exp,
            } => {
                if !(*lambda >= 1.0) {
                    return Err(FuncError::Invalid(format!(
                        "dilation factor must be >= 1 (got {lambda})"
                    )));
                }
                if !norm_exp.is_finite() {
                    return Err(FuncError::Invalid("dilation norm exponent must be finite".into()));
                }
                base.validate(n)?;
            }
            Self::Mollifier { epsilon } => {
                if !(*epsilon > 0.0 && *epsilon < 0.125) {
                    return Err(FuncError::Invalid(format!(
                        "mollifier width must lie in (0, 1/8) (got {epsilon})"
                    )));
                }
            }
            Self::Constant { value } => {
                if !value.is_finite() {
                    return Err(FuncError::Invalid("constant value must be finite".into()));
                }
            }
            Self::SmoothBump { inner, outer } => {
                if !(*inner > 0.0 && inner < outer) {
                    return Err(FuncError::Invalid(format!(
                        "bump needs 0 < inner < outer (got {inner}, {outer})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pointwise evaluation. Nonnegative for nonnegative parameters.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Indicator { center, radius } => {
                let d2: f64 = x
                    .iter()
                    .zip(center.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 < radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Dilate {
                base,
                lambda,
                norm_exp,
            } => {
                let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                lambda.powf(*norm_exp) * base.eval(&scaled)
            }
            Self::Constant { value } => *value,
            _ => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.eval_radial(r, x.len())
            }
        }
    }

    /// Whether the function depends on `|x|` only.
    pub fn is_radial(&self) -> bool {
        match self {
            Self::Indicator { center, .. } => center.iter().all(|c| *c == 0.0),
            Self::Dilate { base, .. } => base.is_radial(),
            _ => true,
        }
    }

    /// Radial profile value at `|x| = r`. Requires [`is_radial`](Self::is_radial).
    pub fn eval_radial(&self, r: f64, n: usize) -> f64 {
        debug_assert!(self.is_radial());
        match self {
            Self::Indicator { radius, .. } => {
                if r < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Self::PowerLog {
                power_exp,
                log_exp,
                support_radius,
            } => {
                if r <= 0.0 || r >= *support_radius {
                    return 0.0;
                }
                // log(e/r) = 1 - ln r >= 1 on the support since rho <= 1
                let l = 1.0 - r.ln();
                r.powf(-power_exp) * l.powf(-log_exp)
            }
            Self::Dilate {
                base,
                lambda,
                norm_exp,
            } => lambda.powf(*norm_exp) * base.eval_radial(lambda * r, n),
            Self::Mollifier { epsilon } => {
                if r < *epsilon {
                    1.0 / (unit_ball_volume(n) * epsilon.powi(n as i32))
                } else {
                    0.0
                }
            }
            Self::Constant { value } => *value,
            Self::SmoothBump { inner, outer } => {
                if r <= *inner {
                    1.0
                } else if r >= *outer {
                    0.0
                } else {
                    let u = (r - inner) / (outer - inner);
                    1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
                }
            }
        }
    }

    /// Radius of a ball centered at the origin containing the support
    /// (`f64::INFINITY` for a nonzero constant).
    pub fn support_radius(&self, _n: usize) -> f64 {
        match self {
            Self::Indicator { center, radius } => {
                let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                c + radius
            }
            Self::PowerLog { support_radius, .. } => *support_radius,
            Self::Dilate { base, lambda, .. } => base.support_radius(_n) / lambda,
            Self::Mollifier { epsilon } => *epsilon,
            Self::Constant { value } => {
                if *value == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::SmoothBump { outer, .. } => *outer,
        }
    }

    /// `L^p` norm by radial quadrature or exact formula; `f64::INFINITY`
    /// when the defining integral diverges (detected by the cutoff ratio
    /// test). `p = f64::INFINITY` gives the essential supremum.
    pub fn lp_norm_analytic(&self, p: f64, n: usize) -> Result<f64, FuncError> {
        if !(p >= 1.0) {
            return Err(FuncError::ExponentOutOfRange(p));
        }
        self.validate(n)?;
        if p.is_infinite() {
            return self.sup_norm(n);
        }
        match self {
            Self::Indicator { radius, .. } => {
                Ok((unit_ball_volume(n) * radius.powi(n as i32)).powf(1.0 / p))
            }
            Self::Mollifier { epsilon } => {
                let mass = unit_ball_volume(n) * epsilon.powi(n as i32);
                Ok(mass.powf(1.0 / p - 1.0))
            }
            Self::Constant { value } => {
                if *value == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Self::Dilate {
                base,
                lambda,
                norm_exp,
            } => {
                let base_norm = base.lp_norm_analytic(p, n)?;
                Ok(lambda.powf(norm_exp - n as f64 / p) * base_norm)
            }
            _ => self.lp_norm_radial_quadrature(p, n),
        }
    }

    fn sup_norm(&self, n: usize) -> Result<f64, FuncError> {
        match self {
            Self::Indicator { .. } => Ok(1.0),
            Self::Mollifier { epsilon } => {
                Ok(1.0 / (unit_ball_volume(n) * epsilon.powi(n as i32)))
            }
            Self::Constant { value } => Ok(value.abs()),
            Self::SmoothBump { .. } => Ok(1.0),
            Self::Dilate {
                base,
                lambda,
                norm_exp,
            } => Ok(lambda.powf(*norm_exp) * base.sup_norm(n)?),
            Self::PowerLog {
                power_exp,
                log_exp,
                support_radius,
            } => {
                if *power_exp > 0.0 || (*power_exp == 0.0 && *log_exp < 0.0) {
                    return Ok(f64::INFINITY);
                }
                // bounded profile: scan a log grid of radii
                let (radii, _) = quad::log_trapezoid_nodes(support_radius * 1e-9, *support_radius, 4096);
                Ok(radii
                    .iter()
                    .map(|r| self.eval_radial(*r, n))
                    .fold(0.0_f64, f64::max))
            }
        }
    }

    fn lp_norm_radial_quadrature(&self, p: f64, n: usize) -> Result<f64, FuncError> {
        let rho = self.support_radius(n);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let omega = unit_sphere_area(n);
        let power_int = |eps: f64| -> f64 {
            let (radii, weights) = quad::log_midpoint_nodes(eps, rho, 1600);
            omega
                * radii
                    .iter()
                    .zip(&weights)
                    .map(|(r, w)| {
                        self.eval_radial(*r, n).powf(p) * r.powf(n as f64 - 1.0) * w
                    })
                    .sum::<f64>()
        };
        const MAX_HALVINGS: usize = 40;
        let mut values = Vec::with_capacity(MAX_HALVINGS);
        let mut log_scales = Vec::with_capacity(MAX_HALVINGS);
        let mut converged = false;
        for k in 0..MAX_HALVINGS {
            let eps = rho * 0.25 * 0.5_f64.powi(k as i32);
            values.push(power_int(eps));
            log_scales.push(1.0 - eps.ln());
            if k < 11 {
                continue;
            }
            match fitting::classify_tail(&values, &log_scales) {
                TailBehavior::Converged => {
                    converged = true;
                    let tail = fitting::geometric_tail_estimate(&values);
                    let value = *values.last().unwrap();
                    // keep halving until the projected tail is negligible
                    if tail <= 1e-7 * value.max(f64::MIN_POSITIVE) {
                        return Ok((value + tail).powf(1.0 / p));
                    }
                }
                TailBehavior::Diverged => return Ok(f64::INFINITY),
                TailBehavior::Ambiguous => converged = false,
            }
        }
        if converged {
            let total = values.last().unwrap() + fitting::geometric_tail_estimate(&values);
            return Ok(total.powf(1.0 / p));
        }
        Err(FuncError::InconclusiveDivergence {
            halvings: MAX_HALVINGS,
        })
    }
}
