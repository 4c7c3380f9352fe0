//! Convolution inequality check in Lorentz norms: with
//! `1/r + 1 = 1/p + 1/q` and `1/α <= 1/α1 + 1/α2`,
//! `‖f*g‖_{r,α} <= 3r ‖f‖_{p,α1} ‖g‖_{q,α2}` (dimension 1).

use super::{CheckResult, ExperimentReport, VerifyError};
use crate::funcfam::AnalyticFunction;
use crate::lorentz::{lorentz_norm, GridFunction, LorentzIndex, NormMethod};

/// Index bundle for one convolution check.
#[derive(Debug, Clone, Copy)]
pub struct OneilIndices {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha: f64,
}

fn validate(idx: &OneilIndices) -> Result<(), VerifyError> {
    let OneilIndices {
        p,
        q,
        r,
        alpha1,
        alpha2,
        alpha,
    } = *idx;
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if !(v > 1.0 && v.is_finite()) {
            return Err(VerifyError::Precondition(format!(
                "{name} must lie in (1, infinity) (got {v})"
            )));
        }
    }
    if (1.0 / r + 1.0 - 1.0 / p - 1.0 / q).abs() > 1e-9 {
        return Err(VerifyError::Precondition(format!(
            "convolution indices must satisfy 1/r + 1 = 1/p + 1/q (got {}, {})",
            1.0 / r + 1.0,
            1.0 / p + 1.0 / q
        )));
    }
    let inv = |a: f64| if a.is_infinite() { 0.0 } else { 1.0 / a };
    if inv(alpha) > inv(alpha1) + inv(alpha2) + 1e-12 {
        return Err(VerifyError::Precondition(format!(
            "second indices must satisfy 1/alpha <= 1/alpha1 + 1/alpha2 (got {} vs {})",
            inv(alpha),
            inv(alpha1) + inv(alpha2)
        )));
    }
    Ok(())
}

/// Discrete linear convolution of two sampled profiles on a common grid.
fn convolve_grids(f: &[f64], g: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; 2 * n - 1];
    for (i, fv) in f.iter().enumerate() {
        if *fv == 0.0 {
            continue;
        }
        for (j, gv) in g.iter().enumerate() {
            out[i + j] += fv * gv;
        }
    }
    for v in &mut out {
        *v *= h;
    }
    out
}

pub fn run_oneil_check(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    idx: &OneilIndices,
) -> Result<ExperimentReport, VerifyError> {
    validate(idx)?;
    f.validate(1)?;
    g.validate(1)?;
    let rho_f = f.support_radius(1);
    let rho_g = g.support_radius(1);
    if !rho_f.is_finite() || !rho_g.is_finite() {
        return Err(VerifyError::Precondition(
            "convolution check needs compactly supported inputs".into(),
        ));
    }

    let half_width = rho_f.max(rho_g).max(0.5) * 1.05;
    let cells = 1 << 12;
    let h = 2.0 * half_width / cells as f64;
    let f_grid = GridFunction::from_analytic(f, 1, half_width, cells)?;
    let g_grid = GridFunction::from_analytic(g, 1, half_width, cells)?;
    let conv = convolve_grids(f_grid.samples(), g_grid.samples(), h);
    let conv_grid = GridFunction::new(
        1,
        vec![-2.0 * half_width],
        vec![h],
        vec![conv.len()],
        conv,
    )?;

    let norm_f = lorentz_norm(
        &f_grid,
        &LorentzIndex::new(idx.p, idx.alpha1)?,
        NormMethod::Rearrangement,
    )?;
    let norm_g = lorentz_norm(
        &g_grid,
        &LorentzIndex::new(idx.q, idx.alpha2)?,
        NormMethod::Rearrangement,
    )?;
    let norm_conv = lorentz_norm(
        &conv_grid,
        &LorentzIndex::new(idx.r, idx.alpha)?,
        NormMethod::Rearrangement,
    )?;

    let denominator = norm_f * norm_g;
    let ratio = if denominator > 0.0 {
        norm_conv / denominator
    } else {
        0.0
    };
    let bound = 3.0 * idx.r;
    let degenerate = denominator == 0.0;
    let checks = vec![CheckResult::new(
        "convolution_norm_ratio",
        (degenerate && norm_conv == 0.0) || ratio <= bound,
        format!(
            "|f*g|_(r,a) / (|f|_(p,a1) |g|_(q,a2)) = {ratio:.4} (bound 3r = {bound})"
        ),
    )];
    Ok(ExperimentReport::from_checks(
        "oneil",
        vec![idx.p, idx.q, idx.r, idx.alpha1, idx.alpha2, idx.alpha],
        vec![norm_conv, norm_f, norm_g, ratio],
        None,
        0.0,
        0.0,
        checks,
    ))
}
