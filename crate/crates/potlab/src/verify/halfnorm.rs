//! Uniformity of the `L^1 x L^1 -> L^{1/2}` bound: the normalized
//! half-power integral `∫ |J_s(f,g)|^{1/2} / (|f|_1 |g|_1)^{1/2}` stays
//! bounded across input families spanning several decades of width, with
//! no trend as the width shrinks.

use super::{CheckResult, ExperimentReport, VerifyError};
use crate::fitting;
use crate::funcfam::AnalyticFunction;
use crate::kernel::KernelEvalSpec;
use crate::operator::{PotentialOperator, QuadratureSpec, CUTOFF_FLOOR};
use crate::params::PotentialParams;

/// One member of the width family.
#[derive(Debug, Clone)]
pub struct HalfNormPair {
    pub f: AnalyticFunction,
    pub g: AnalyticFunction,
    pub width: f64,
}

/// Normalized half-power integral of the potential for one pair.
pub(crate) fn half_norm_value(
    op: &PotentialOperator,
    f: &AnalyticFunction,
    g: &AnalyticFunction,
) -> Result<f64, VerifyError> {
    let n = op.params().dimension();
    if n != 1 {
        return Err(VerifyError::Precondition(
            "half-norm family runs on the line".into(),
        ));
    }
    let l1f = f.lp_norm_analytic(1.0, n)?;
    let l1g = g.lp_norm_analytic(1.0, n)?;
    if !(l1f > 0.0 && l1f.is_finite() && l1g > 0.0 && l1g.is_finite()) {
        return Err(VerifyError::Precondition(
            "half-norm inputs need positive finite mass".into(),
        ));
    }
    let rho_f = f.support_radius(n);
    let rho_g = g.support_radius(n);
    let half_width = (rho_f + rho_g) / 2.0 + 0.5;
    let cells = 1024;
    let h = 2.0 * half_width / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let x = -half_width + (i as f64 + 0.5) * h;
        let v = op.bilinear_bessel_truncated(f, g, &[x], CUTOFF_FLOOR)?;
        acc += v.max(0.0).sqrt() * h;
    }
    Ok(acc / (l1f * l1g).sqrt())
}

/// Run the width family: verdict passes when every value is finite and the
/// log-log trend of value against width stays within ±0.05 of flat.
pub fn run_half_norm_uniformity(
    params: &PotentialParams,
    pairs: &[HalfNormPair],
) -> Result<ExperimentReport, VerifyError> {
    if pairs.len() < 2 {
        return Err(VerifyError::Precondition(
            "uniformity needs at least two family members".into(),
        ));
    }
    let op = PotentialOperator::new(
        *params,
        &KernelEvalSpec::default(),
        QuadratureSpec {
            outer_radius: 8.0,
            ..QuadratureSpec::default_for(params.dimension())
        },
    )?;
    let mut widths = Vec::with_capacity(pairs.len());
    let mut values = Vec::with_capacity(pairs.len());
    for pair in pairs {
        widths.push(pair.width);
        values.push(half_norm_value(&op, &pair.f, &pair.g)?);
    }
    let all_finite = values.iter().all(|v| v.is_finite());
    let points: Vec<(f64, f64)> = widths
        .iter()
        .zip(&values)
        .map(|(w, v)| (w.ln(), v.ln()))
        .collect();
    let fit = fitting::fit_line(&points);

    let sup = values.iter().cloned().fold(0.0_f64, f64::max);
    let checks = vec![
        CheckResult::new(
            "values_finite_and_bounded",
            all_finite && sup.is_finite(),
            format!("sup over the family = {sup:.4}"),
        ),
        CheckResult::new(
            "trend_flat_across_widths",
            fit.slope.abs() <= 0.05,
            format!("slope of ln(value) vs ln(width) = {:.4} (band ±0.05)", fit.slope),
        ),
    ];
    Ok(ExperimentReport::from_checks(
        "half_norm_uniformity",
        widths,
        values,
        Some((fit.slope, fit.intercept, fit.r_squared)),
        0.0,
        0.05,
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::default_params_1d;

    #[test]
    fn rejects_massless_inputs() {
        let params = default_params_1d();
        let zero = AnalyticFunction::Constant { value: 0.0 };
        let pairs = vec![
            HalfNormPair {
                f: zero.clone(),
                g: zero.clone(),
                width: 1.0,
            },
            HalfNormPair {
                f: zero.clone(),
                g: zero,
                width: 0.1,
            },
        ];
        assert!(matches!(
            run_half_norm_uniformity(&params, &pairs),
            Err(VerifyError::Precondition(_))
        ));
    }

    #[test]
    fn indicator_pair_value_finite() {
        let params = default_params_1d();
        let op = PotentialOperator::new(
            params,
            &KernelEvalSpec::default(),
            QuadratureSpec::default_for(1),
        )
        .unwrap();
        let f = AnalyticFunction::Indicator {
            center: vec![0.0],
            radius: 1.0,
        };
        let v = half_norm_value(&op, &f, &f).unwrap();
        assert!(v.is_finite() && v > 0.0, "got {v}");
    }
}
