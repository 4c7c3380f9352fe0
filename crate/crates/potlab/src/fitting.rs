//! Least-squares line fits and cutoff-sequence rate analysis.

use serde::{Deserialize, Serialize};

/// Ordinary least-squares line fit with coefficient of determination.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// OLS fit of `y = slope * x + intercept`. Requires at least two points.
pub fn fit_line(points: &[(f64, f64)]) -> LineFit {
    assert!(points.len() >= 2, "need at least two points for a line fit");
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    LineFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Outcome of the cutoff-halving ratio test on a truncated-integral sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailBehavior {
    Converged,
    Diverged,
    Ambiguous,
}

/// Number of late increment ratios examined by [`classify_tail`].
pub const RATIO_WINDOW: usize = 5;
/// An increment ratio at or above this value signals a persistent tail.
pub const RATIO_THRESHOLD: f64 = 0.9;
/// Late slope of `ln(increment * L)` vs `ln L` below which the scaled
/// increments decay, i.e. the sequence saturates.
pub const PERSISTENCE_SLOPE_THRESHOLD: f64 = -0.05;

/// Classify a truncated-value sequence taken at shrinking inner cutoffs.
///
/// `values[k]` is the truncated quantity at cutoff `eps_k`; `log_scales[k]`
/// is `log(e / eps_k)` (strictly increasing). The sequence must be
/// nondecreasing up to a small tolerance; violations return `Ambiguous`.
///
/// Two statistics are combined:
/// - the raw increment ratios over the last [`RATIO_WINDOW`] halvings
///   (ratio >= [`RATIO_THRESHOLD`] means the tail is not dying geometrically);
/// - the late slope of `ln(increment * L)` against `ln L`, which separates a
///   borderline `dL/L` tail (slope ~ 0) from a convergent `dL/L^c`, `c > 1`
///   tail (negative slope) at cutoff depths where the raw ratios of both
///   regimes are close to 1.
pub fn classify_tail(values: &[f64], log_scales: &[f64]) -> TailBehavior {
    assert_eq!(values.len(), log_scales.len());
    if values.len() < 4 {
        return TailBehavior::Ambiguous;
    }
    let scale = values
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let incs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if incs.iter().any(|d| *d < -1e-9 * scale) {
        return TailBehavior::Ambiguous;
    }
    let total: f64 = incs.iter().sum();
    if total <= 1e-10 * scale {
        return TailBehavior::Converged;
    }

    let ratios: Vec<f64> = incs
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let window = RATIO_WINDOW.min(ratios.len());
    let late = &ratios[ratios.len() - window..];
    let all_high = late.iter().all(|r| *r >= RATIO_THRESHOLD);
    let all_low = late.iter().all(|r| *r < RATIO_THRESHOLD);

    // scaled-increment persistence: fit ln(inc * L) vs ln L on the late half
    let pts: Vec<(f64, f64)> = incs
        .iter()
        .zip(log_scales.iter())
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, l)| (l.ln(), (d * l).ln()))
        .collect();
    if pts.len() < 3 {
        return if all_low {
            TailBehavior::Converged
        } else {
            TailBehavior::Ambiguous
        };
    }
    let half = &pts[pts.len() / 2..];
    let persistence = if half.len() >= 3 {
        fit_line(half).slope
    } else {
        fit_line(&pts).slope
    };

    if all_high && persistence >= PERSISTENCE_SLOPE_THRESHOLD {
        TailBehavior::Diverged
    } else if all_low || persistence < PERSISTENCE_SLOPE_THRESHOLD {
        TailBehavior::Converged
    } else {
        TailBehavior::Ambiguous
    }
}

/// Increment ratios `(v[k+2]-v[k+1])/(v[k+1]-v[k])` of a sequence.
pub fn increment_ratios(values: &[f64]) -> Vec<f64> {
    let incs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    incs.windows(2)
        .map(|w| if w[0] != 0.0 { w[1] / w[0] } else { 0.0 })
        .collect()
}

/// Geometric extrapolation of the remaining tail after the last increment,
/// assuming increments keep decaying at the last observed ratio.
pub fn geometric_tail_estimate(values: &[f64]) -> f64 {
    if values.len() < 3 {
        return 0.0;
    }
    let d_last = values[values.len() - 1] - values[values.len() - 2];
    let d_prev = values[values.len() - 2] - values[values.len() - 3];
    if d_last <= 0.0 || d_prev <= 0.0 {
        return 0.0;
    }
    let rho = (d_last / d_prev).min(0.89);
    d_last * rho / (1.0 - rho)
}
