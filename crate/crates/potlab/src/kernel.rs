//! Pointwise evaluation of the Bessel kernel `G_s` and Riesz kernel
//! `I_s(x) = |x|^{s-n}`, with fitted asymptotic constants.
//!
//! `G_s` has no elementary closed form for general `(n, s)`; it is evaluated
//! through the heat-kernel subordination representation
//!
//! ```text
//! G_s(x) = (4π)^{-s/2} Γ(s/2)^{-1} ∫_0^∞ exp(-π|x|²/t) exp(-t/(4π)) t^{(s-n)/2} dt/t
//! ```
//!
//! discretized by the trapezoid rule in `ln t`. The integrand decays
//! double-exponentially at both ends of the log axis, so the rule converges
//! rapidly; a node-doubling check guards every pointwise evaluation.

use crate::fitting::{self, TailBehavior};
use crate::params::{unit_sphere_area, PotentialParams};
use crate::quad;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

/// Radii below this are rejected: the kernel is singular at the origin and
/// only used pointwise away from it.
pub const MIN_RADIUS: f64 = 1e-8;

/// Relative tolerance for the node-doubling accuracy check.
pub const DOUBLING_REL_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("radius must be positive and at least {MIN_RADIUS} (got {0})")]
    RadiusOutOfRange(f64),
    #[error("subordination quadrature did not converge: {n_nodes} vs {n2_nodes} nodes differ by {rel_diff:.3e} (tolerance {DOUBLING_REL_TOL:.1e})")]
    NonConvergent {
        n_nodes: usize,
        n2_nodes: usize,
        rel_diff: f64,
    },
    #[error("decay fit failed: r_squared {r_squared:.4} below 0.98 or rate {c_decay:.4} not positive")]
    FitFailure { r_squared: f64, c_decay: f64 },
    #[error("L^t norm of the kernel is finite only for 1 <= t < n/(n-s) (got t={t}, bound {bound})")]
    IntegrabilityRange { t: f64, bound: f64 },
    #[error("Fourier check is implemented for dimension 1 only (got n={0})")]
    FourierDimension(usize),
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),
}

/// Quadrature controls for the subordination integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEvalSpec {
    /// Node count for the `t`-integral over `[t_min, t_max]`.
    pub subordination_nodes: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for KernelEvalSpec {
    fn default() -> Self {
        Self {
            subordination_nodes: 2048,
            t_min: 1e-8,
            t_max: 1e3,
        }
    }
}

impl KernelEvalSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        if self.subordination_nodes < 16 {
            return Err(KernelError::InvalidSpec(format!(
                "subordination_nodes must be >= 16 (got {})",
                self.subordination_nodes
            )));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max) {
            return Err(KernelError::InvalidSpec(format!(
                "need 0 < t_min < t_max (got {} .. {})",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    /// Node density per unit of `ln t`, preserved when the window widens.
    fn node_density(&self) -> f64 {
        self.subordination_nodes as f64 / (self.t_max / self.t_min).ln()
    }
}

/// Effective `t`-window for a given radius. The integrand's lower shoulder
/// sits near `t ~ π r²`, so small radii force the window below `t_min`;
/// large radii push the upper shoulder toward `t ~ 2π r`.
fn effective_window(spec: &KernelEvalSpec, radius: f64) -> (f64, f64) {
    let t_lo = spec.t_min.min(std::f64::consts::PI * radius * radius * 1e-4);
    let t_hi = spec.t_max.max(8.0 * std::f64::consts::PI * radius);
    (t_lo, t_hi)
}

fn subordination_prefactor(params: &PotentialParams) -> f64 {
    let s = params.order();
    (4.0 * std::f64::consts::PI).powf(-s / 2.0) / gamma(s / 2.0)
}

fn subordination_sum(params: &PotentialParams, radius: f64, t_lo: f64, t_hi: f64, count: usize) -> f64 {
    let n = params.dimension() as f64;
    let s = params.order();
    let pi = std::f64::consts::PI;
    let u_lo = t_lo.ln();
    let du = (t_hi.ln() - u_lo) / (count - 1) as f64;
    let half = (s - n) / 2.0;
    let mut acc = 0.0;
    for i in 0..count {
        let u = u_lo + du * i as f64;
        let t = u.exp();
        let v = (-pi * radius * radius / t - t / (4.0 * pi) + half * u).exp();
        acc += if i == 0 || i == count - 1 { v / 2.0 } else { v };
    }
    acc * du
}

/// `G_s(x)` for `|x| = radius`, with a node-doubling accuracy check.
pub fn eval_bessel_kernel(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    radius: f64,
) -> Result<f64, KernelError> {
    spec.validate()?;
    if !(radius >= MIN_RADIUS) || !radius.is_finite() {
        return Err(KernelError::RadiusOutOfRange(radius));
    }
    let (t_lo, t_hi) = effective_window(spec, radius);
    let count = ((t_hi / t_lo).ln() * spec.node_density()).ceil() as usize + 1;
    let count = count.max(spec.subordination_nodes);
    let pref = subordination_prefactor(params);
    let coarse = pref * subordination_sum(params, radius, t_lo, t_hi, count);
    let fine = pref * subordination_sum(params, radius, t_lo, t_hi, 2 * count);
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    let rel_diff = (fine - coarse).abs() / scale;
    if rel_diff > DOUBLING_REL_TOL {
        return Err(KernelError::NonConvergent {
            n_nodes: count,
            n2_nodes: 2 * count,
            rel_diff,
        });
    }
    Ok(fine)
}

/// Evaluate `G_s` at many radii sharing one widened `t`-window, with a single
/// doubling check on the whole batch. Radii must be positive.
pub fn eval_bessel_many(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    radii: &[f64],
) -> Result<Vec<f64>, KernelError> {
    spec.validate()?;
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().cloned().fold(0.0_f64, f64::max);
    if !(r_min > 0.0) {
        return Err(KernelError::RadiusOutOfRange(r_min));
    }
    let (t_lo, _) = effective_window(spec, r_min);
    let (_, t_hi) = effective_window(spec, r_max);
    let count = (((t_hi / t_lo).ln() * spec.node_density()).ceil() as usize + 1)
        .max(spec.subordination_nodes);
    let pref = subordination_prefactor(params);

    let batch = |count: usize| -> Vec<f64> {
        let n = params.dimension() as f64;
        let s = params.order();
        let pi = std::f64::consts::PI;
        let u_lo = t_lo.ln();
        let du = (t_hi.ln() - u_lo) / (count - 1) as f64;
        let half = (s - n) / 2.0;
        // per-node factor independent of the radius
        let mut node_t = Vec::with_capacity(count);
        let mut node_f = Vec::with_capacity(count);
        for i in 0..count {
            let u = u_lo + du * i as f64;
            let t = u.exp();
            let w = if i == 0 || i == count - 1 { du / 2.0 } else { du };
            node_t.push(t);
            node_f.push(w * (-t / (4.0 * pi) + half * u).exp());
        }
        radii
            .iter()
            .map(|r| {
                let rr = pi * r * r;
                let mut acc = 0.0;
                for (t, f) in node_t.iter().zip(&node_f) {
                    acc += (-rr / t).exp() * f;
                }
                pref * acc
            })
            .collect()
    };

    let coarse = batch(count);
    let fine = batch(2 * count);
    let mut worst = 0.0_f64;
    for (a, b) in coarse.iter().zip(&fine) {
        let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        // ignore radii whose kernel value is below the noise floor
        if *b > 1e-280 {
            worst = worst.max(rel);
        }
    }
    if worst > DOUBLING_REL_TOL * 10.0 {
        return Err(KernelError::NonConvergent {
            n_nodes: count,
            n2_nodes: 2 * count,
            rel_diff: worst,
        });
    }
    Ok(fine)
}

/// `I_s(x) = radius^{s-n}`. Pure arithmetic; `radius` must be positive.
pub fn eval_riesz_kernel(params: &PotentialParams, radius: f64) -> f64 {
    assert!(radius > 0.0, "riesz kernel needs a positive radius");
    radius.powf(params.order() - params.dimension() as f64)
}

/// Fitted kernel constants: `c_small` bounds `G_s(r) <= c_small r^{s-n}` on
/// the unit ball, `(c_large, c_decay)` fit the exponential tail
/// `G_s(r) ~ c_large exp(-c_decay r)` on `[1, 10]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelConstants {
    pub c_small: f64,
    pub c_large: f64,
    pub c_decay: f64,
    pub decay_r_squared: f64,
}

pub fn fit_kernel_constants(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
) -> Result<KernelConstants, KernelError> {
    fit_kernel_constants_with(params, spec, 64, 32)
}

/// As [`fit_kernel_constants`] with explicit grid sizes (used for the
/// refinement-stability check).
pub fn fit_kernel_constants_with(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    small_grid: usize,
    decay_grid: usize,
) -> Result<KernelConstants, KernelError> {
    let n = params.dimension() as f64;
    let s = params.order();
    let (small_r, _) = quad::log_trapezoid_nodes(1e-4, 1.0, small_grid);
    let g_small = eval_bessel_many(params, spec, &small_r)?;
    let c_small = small_r
        .iter()
        .zip(&g_small)
        .map(|(r, g)| g * r.powf(n - s))
        .fold(0.0_f64, f64::max);

    let (large_r, _) = quad::uniform_trapezoid_nodes(1.0, 10.0, decay_grid);
    let g_large = eval_bessel_many(params, spec, &large_r)?;
    let pts: Vec<(f64, f64)> = large_r
        .iter()
        .zip(&g_large)
        .map(|(r, g)| (*r, g.ln()))
        .collect();
    let fit = fitting::fit_line(&pts);
    let c_decay = -fit.slope;
    if fit.r_squared < 0.98 || c_decay <= 0.0 {
        return Err(KernelError::FitFailure {
            r_squared: fit.r_squared,
            c_decay,
        });
    }
    Ok(KernelConstants {
        c_small,
        c_large: fit.intercept.exp(),
        c_decay,
        decay_r_squared: fit.r_squared,
    })
}

/// Fitted lower constant: `inf` over a log grid of radii in `(0, 1]` of
/// `G_s(r) r^{n-s}`, so that `G_s(r) >= c r^{s-n}` holds on the grid.
pub fn fit_kernel_lower_constant(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
) -> Result<f64, KernelError> {
    let n = params.dimension() as f64;
    let s = params.order();
    let (radii, _) = quad::log_trapezoid_nodes(1e-4, 1.0, 64);
    let g = eval_bessel_many(params, spec, &radii)?;
    Ok(radii
        .iter()
        .zip(&g)
        .map(|(r, g)| g * r.powf(n - s))
        .fold(f64::INFINITY, f64::min))
}

/// Total mass `∫_{ℝⁿ} G_s`. Equals 1 exactly (the Fourier transform at 0).
pub fn kernel_mass(params: &PotentialParams, spec: &KernelEvalSpec) -> Result<f64, KernelError> {
    let n = params.dimension() as f64;
    let s = params.order();
    let omega = unit_sphere_area(params.dimension());
    let r_lo = 1e-6;
    let (radii, weights) = quad::log_trapezoid_nodes(r_lo, 45.0, 3000);
    let g = eval_bessel_many(params, spec, &radii)?;
    let body: f64 = radii
        .iter()
        .zip(&weights)
        .zip(&g)
        .map(|((r, w), g)| g * r.powf(n - 1.0) * w)
        .sum();
    // analytic head: G ~ c r^{s-n} below r_lo
    let c_hat = g[0] * radii[0].powf(n - s);
    let head = c_hat * r_lo.powf(s) / s;
    Ok(omega * (body + head))
}

/// Mass of the kernel over the annulus `r0 <= |y| <= r1`.
pub fn kernel_annulus_mass(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    r0: f64,
    r1: f64,
) -> Result<f64, KernelError> {
    assert!(0.0 < r0 && r0 < r1);
    let n = params.dimension() as f64;
    let omega = unit_sphere_area(params.dimension());
    let (radii, weights) = quad::log_trapezoid_nodes(r0, r1, 1200);
    let g = eval_bessel_many(params, spec, &radii)?;
    Ok(omega
        * radii
            .iter()
            .zip(&weights)
            .zip(&g)
            .map(|((r, w), g)| g * r.powf(n - 1.0) * w)
            .sum::<f64>())
}

/// `‖G_s‖_{L^t}`, finite for `1 <= t < n/(n-s)`.
pub fn kernel_lt_norm(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    t: f64,
) -> Result<f64, KernelError> {
    let n = params.dimension() as f64;
    let s = params.order();
    let bound = n / (n - s);
    if !(1.0..bound).contains(&t) {
        return Err(KernelError::IntegrabilityRange { t, bound });
    }
    let omega = unit_sphere_area(params.dimension());
    let r_lo = 1e-6;
    let (radii, weights) = quad::log_trapezoid_nodes(r_lo, 45.0, 3000);
    let g = eval_bessel_many(params, spec, &radii)?;
    let body: f64 = radii
        .iter()
        .zip(&weights)
        .zip(&g)
        .map(|((r, w), g)| g.powf(t) * r.powf(n - 1.0) * w)
        .sum();
    let c_hat = g[0] * radii[0].powf(n - s);
    let head_exp = n - (n - s) * t; // positive in range
    let head = c_hat.powf(t) * r_lo.powf(head_exp) / head_exp;
    Ok((omega * (body + head)).powf(1.0 / t))
}

/// Truncated `t`-th power integral `∫_{eps<|x|<1} G_s^t dx`, the probe for
/// the integrability boundary `t < n/(n-s)`.
pub fn truncated_lt_power(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    t: f64,
    eps: f64,
) -> Result<f64, KernelError> {
    assert!(eps > 0.0 && eps < 1.0);
    let n = params.dimension() as f64;
    let omega = unit_sphere_area(params.dimension());
    let (radii, weights) = quad::log_trapezoid_nodes(eps, 1.0, 1600);
    let g = eval_bessel_many(params, spec, &radii)?;
    Ok(omega
        * radii
            .iter()
            .zip(&weights)
            .zip(&g)
            .map(|((r, w), g)| g.powf(t) * r.powf(n - 1.0) * w)
            .sum::<f64>())
}

/// Ratio-test classification of the truncated `L^t` power as `eps -> 0`.
pub fn lt_membership_behavior(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    t: f64,
    halvings: usize,
) -> Result<TailBehavior, KernelError> {
    let mut values = Vec::with_capacity(halvings);
    let mut log_scales = Vec::with_capacity(halvings);
    for k in 0..halvings {
        let eps = 0.25 * 0.5_f64.powi(k as i32);
        values.push(truncated_lt_power(params, spec, t, eps)?);
        log_scales.push(1.0 - eps.ln());
    }
    Ok(fitting::classify_tail(&values, &log_scales))
}

/// Quadrature Fourier transform `∫ G_s(x) e^{-2πi x ξ} dx` (dimension 1,
/// real and even, so a cosine transform).
pub fn fourier_transform_1d(
    params: &PotentialParams,
    spec: &KernelEvalSpec,
    xi: f64,
) -> Result<f64, KernelError> {
    if params.dimension() != 1 {
        return Err(KernelError::FourierDimension(params.dimension()));
    }
    let s = params.order();
    let r_lo = 1e-7;
    let (mut radii, mut weights) = quad::log_trapezoid_nodes(r_lo, 0.05, 1200);
    let (ru, wu) = quad::uniform_trapezoid_nodes(0.05, 45.0, 9000);
    radii.extend_from_slice(&ru);
    weights.extend_from_slice(&wu);
    let g = eval_bessel_many(params, spec, &radii)?;
    let body: f64 = radii
        .iter()
        .zip(&weights)
        .zip(&g)
        .map(|((r, w), g)| g * (2.0 * std::f64::consts::PI * r * xi).cos() * w)
        .sum();
    let c_hat = g[0] * radii[0].powf(1.0 - s);
    let head = c_hat * r_lo.powf(s) / s;
    Ok(2.0 * (body + head))
}

/// The exact Fourier transform `(1 + 4π²ξ²)^{-s/2}` for comparison.
pub fn fourier_transform_exact(params: &PotentialParams, xi: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (1.0 + 4.0 * pi * pi * xi * xi).powf(-params.order() / 2.0)
}

/// Dense log-radius lookup table for `G_s`, for use inside quadrature loops.
/// Piecewise-linear in `(ln r, ln G)`; radii below the table floor use the
/// `r^{s-n}` asymptote, radii above the ceiling evaluate to 0.
#[derive(Debug, Clone)]
pub struct KernelTable {
    ln_r_lo: f64,
    ln_r_hi: f64,
    step_inv: f64,
    ln_g: Vec<f64>,
    head_coeff: f64,
    head_exp: f64,
}

impl KernelTable {
    pub fn build(
        params: &PotentialParams,
        spec: &KernelEvalSpec,
        r_lo: f64,
        r_hi: f64,
        points: usize,
    ) -> Result<Self, KernelError> {
        assert!(points >= 16 && r_lo > 0.0 && r_hi > r_lo);
        let ln_lo = r_lo.ln();
        let ln_hi = r_hi.ln();
        let step = (ln_hi - ln_lo) / (points - 1) as f64;
        let radii: Vec<f64> = (0..points).map(|i| (ln_lo + step * i as f64).exp()).collect();
        let g = eval_bessel_many(params, spec, &radii)?;
        let ln_g: Vec<f64> = g.iter().map(|v| v.max(1e-300).ln()).collect();
        let n = params.dimension() as f64;
        let s = params.order();
        Ok(Self {
            ln_r_lo: ln_lo,
            ln_r_hi: ln_hi,
            step_inv: 1.0 / step,
            head_coeff: g[0] * radii[0].powf(n - s),
            head_exp: s - n,
            ln_g,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        let lr = r.ln();
        if lr < self.ln_r_lo {
            return self.head_coeff * r.powf(self.head_exp);
        }
        if lr >= self.ln_r_hi {
            return 0.0;
        }
        let pos = (lr - self.ln_r_lo) * self.step_inv;
        let idx = pos as usize;
        let frac = pos - idx as f64;
        let a = self.ln_g[idx];
        let b = self.ln_g[(idx + 1).min(self.ln_g.len() - 1)];
        (a + (b - a) * frac).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yukawa(r: f64) -> f64 {
        (-r).exp() / (4.0 * std::f64::consts::PI * r)
    }

    #[test]
    fn matches_yukawa_closed_form() {
        let params = PotentialParams::new(3, 2.0).unwrap();
        let spec = KernelEvalSpec::default();
        for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let got = eval_bessel_kernel(&params, &spec, r).unwrap();
            let want = yukawa(r);
            assert!(
                ((got - want) / want).abs() < 1e-5,
                "r={r}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn yukawa_value_at_one() {
        let params = PotentialParams::new(3, 2.0).unwrap();
        let got = eval_bessel_kernel(&params, &KernelEvalSpec::default(), 1.0).unwrap();
        assert!((got - 0.029276).abs() < 1e-5, "got {got}");
    }

    #[test]
    fn rejects_tiny_radius() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        assert!(matches!(
            eval_bessel_kernel(&params, &KernelEvalSpec::default(), 1e-9),
            Err(KernelError::RadiusOutOfRange(_))
        ));
    }

    #[test]
    fn doubling_check_fires_on_coarse_spec() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let spec = KernelEvalSpec {
            subordination_nodes: 16,
            ..Default::default()
        };
        assert!(matches!(
            eval_bessel_kernel(&params, &spec, 1.0),
            Err(KernelError::NonConvergent { .. })
        ));
    }

    #[test]
    fn riesz_values() {
        let p1 = PotentialParams::new(1, 0.5).unwrap();
        assert!((eval_riesz_kernel(&p1, 4.0) - 0.5).abs() < 1e-15);
        let p3 = PotentialParams::new(3, 2.0).unwrap();
        assert!((eval_riesz_kernel(&p3, 1.0) - 1.0).abs() < 1e-15);
        let p2 = PotentialParams::new(2, 1.0).unwrap();
        assert!((eval_riesz_kernel(&p2, 0.25) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mass_is_one() {
        let spec = KernelEvalSpec::default();
        for (n, s) in [(1usize, 0.5), (2, 1.0), (3, 1.5)] {
            let params = PotentialParams::new(n, s).unwrap();
            let m = kernel_mass(&params, &spec).unwrap();
            assert!((m - 1.0).abs() < 1e-4, "(n,s)=({n},{s}): mass {m}");
        }
    }

    #[test]
    fn exponential_decay_bound() {
        // G_s(10)/G_s(5) < exp(-c*5) for a fitted c > 0
        let params = PotentialParams::new(1, 0.5).unwrap();
        let spec = KernelEvalSpec::default();
        let c = fit_kernel_constants(&params, &spec).unwrap();
        assert!(c.c_decay > 0.0);
        let g5 = eval_bessel_kernel(&params, &spec, 5.0).unwrap();
        let g10 = eval_bessel_kernel(&params, &spec, 10.0).unwrap();
        assert!(g10 / g5 < (-0.5 * c.c_decay * 5.0).exp());
    }

    #[test]
    fn yukawa_fitted_constants() {
        let params = PotentialParams::new(3, 2.0).unwrap();
        let c = fit_kernel_constants(&params, &KernelEvalSpec::default()).unwrap();
        let want = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((c.c_small - want).abs() / want < 0.01, "c_small {}", c.c_small);
        assert!((c.c_decay - 1.0).abs() < 0.3, "c_decay {}", c.c_decay);
        assert!(c.decay_r_squared > 0.98);
    }

    #[test]
    fn small_radius_ratio_increases_toward_origin() {
        // (n=2, s=1): G r^{n-s} increases as r decreases on the grid
        let params = PotentialParams::new(2, 1.0).unwrap();
        let spec = KernelEvalSpec::default();
        let (radii, _) = quad::log_trapezoid_nodes(1e-4, 1.0, 24);
        let g = eval_bessel_many(&params, &spec, &radii).unwrap();
        let ratios: Vec<f64> = radii.iter().zip(&g).map(|(r, g)| g * r).collect();
        for w in ratios.windows(2) {
            assert!(w[0] >= w[1] * 0.9999, "{} vs {}", w[0], w[1]);
        }
    }

    #[test]
    fn dominated_by_riesz_on_unit_ball() {
        for (n, s) in [(1usize, 0.5), (2, 1.0), (3, 2.0)] {
            let params = PotentialParams::new(n, s).unwrap();
            let spec = KernelEvalSpec::default();
            let c = fit_kernel_constants(&params, &spec).unwrap();
            let (radii, _) = quad::log_trapezoid_nodes(1e-4, 1.0, 40);
            let g = eval_bessel_many(&params, &spec, &radii).unwrap();
            for (r, g) in radii.iter().zip(&g) {
                assert!(*g <= c.c_small * eval_riesz_kernel(&params, *r) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn positive_and_radially_decreasing() {
        let params = PotentialParams::new(2, 1.3).unwrap();
        let spec = KernelEvalSpec::default();
        let (radii, _) = quad::log_trapezoid_nodes(1e-3, 20.0, 60);
        let g = eval_bessel_many(&params, &spec, &radii).unwrap();
        for v in &g {
            assert!(*v > 0.0);
        }
        for w in g.windows(2) {
            assert!(w[0] >= w[1], "kernel must not increase outward");
        }
    }

    #[test]
    fn lt_membership_boundary() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let spec = KernelEvalSpec::default();
        let bound = 2.0; // n/(n-s)
        let below = lt_membership_behavior(&params, &spec, 0.75 * bound, 14).unwrap();
        assert_eq!(below, TailBehavior::Converged);
        let above = lt_membership_behavior(&params, &spec, 1.05 * bound, 14).unwrap();
        assert_eq!(above, TailBehavior::Diverged);
        // divergent case: value ratios stay bounded away from 1
        let mut vals = Vec::new();
        for k in 0..10 {
            let eps = 0.25 * 0.5_f64.powi(k);
            vals.push(truncated_lt_power(&params, &spec, 1.05 * bound, eps).unwrap());
        }
        let last_ratio = vals[9] / vals[8];
        assert!(last_ratio > 1.02, "ratio {last_ratio}");
    }

    #[test]
    fn fourier_matches_exact() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let spec = KernelEvalSpec::default();
        for xi in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let got = fourier_transform_1d(&params, &spec, xi).unwrap();
            let want = fourier_transform_exact(&params, xi);
            assert!((got - want).abs() < 1e-3, "xi={xi}: got {got}, want {want}");
        }
    }

    #[test]
    fn table_interpolation_accuracy() {
        let params = PotentialParams::new(3, 2.0).unwrap();
        let spec = KernelEvalSpec::default();
        let table = KernelTable::build(&params, &spec, 1e-9, 64.0, 8192).unwrap();
        for r in [1e-8, 1e-5, 0.01, 0.3, 1.0, 7.0, 30.0] {
            let want = yukawa(r);
            let got = table.eval(r);
            assert!(
                ((got - want) / want).abs() < 1e-4,
                "r={r}: got {got}, want {want}"
            );
        }
        assert_eq!(table.eval(100.0), 0.0);
    }

    #[test]
    fn lower_constant_positive() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let c = fit_kernel_lower_constant(&params, &KernelEvalSpec::default()).unwrap();
        assert!(c > 1e-6, "lower constant suspiciously small: {c}");
    }
}
