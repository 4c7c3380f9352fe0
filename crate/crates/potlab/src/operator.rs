//! Quadrature evaluation of the bilinear Bessel potential
//! `J_s(f,g)(x) = ∫ G_s(y) f(x-y) g(x+y) dy`, its Riesz-kernel counterpart,
//! the linear potential `G_s * f`, and kernel-free dyadic ball averages.
//!
//! The kernel singularity sits at `y = 0` regardless of `x`, so every path
//! integrates on a composite radial grid: log-spaced midpoints inside
//! `split_radius`, uniform midpoints out to `outer_radius`. Midpoint rules
//! keep nodes off support boundaries and off the singular point itself.
//!
//! Truncated integrals at a ladder of inner cutoffs share one master grid,
//! so cutoff increments are exact partial sums and the divergence ratio test
//! sees monotone data.

use crate::fitting::{self, TailBehavior};
use crate::funcfam::{AnalyticFunction, FuncError};
use crate::kernel::{KernelError, KernelEvalSpec, KernelTable};
use crate::params::{unit_sphere_area, PotentialParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

/// Hard floor for inner cutoffs; radii below this are never integrated.
pub const CUTOFF_FLOOR: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("evaluation point has dimension {got}, parameters have {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("cutoff ratio test ambiguous (neither converged nor diverged): {0}")]
    CutoffNonconvergence(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
}

/// Node counts and cutoff radii for the singular quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Excise `|y| < inner_cutoff` (0 means integrate down to the floor).
    pub inner_cutoff: f64,
    /// Truncate `|y| > outer_radius`.
    pub outer_radius: f64,
    pub radial_nodes: usize,
    /// Angular nodes for the 2-D reduction in dimensions 2 and 3.
    pub angular_nodes: usize,
    /// Boundary between the log-spaced singular region and the uniform
    /// smooth region.
    pub split_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            inner_cutoff: 0.0,
            outer_radius: 20.0,
            radial_nodes: 4096,
            angular_nodes: 256,
            split_radius: 0.1,
        }
    }
}

impl QuadratureSpec {
    /// Defaults sized per dimension.
    pub fn default_for(n: usize) -> Self {
        Self {
            radial_nodes: if n == 1 { 4096 } else { 1024 },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        if !(self.inner_cutoff >= 0.0
            && self.inner_cutoff < self.split_radius
            && self.split_radius < self.outer_radius)
        {
            return Err(OperatorError::InvalidSpec(format!(
                "need inner_cutoff < split_radius < outer_radius (got {}, {}, {})",
                self.inner_cutoff, self.split_radius, self.outer_radius
            )));
        }
        if self.radial_nodes < 8 || self.angular_nodes < 8 {
            return Err(OperatorError::InvalidSpec(
                "node counts must be at least 8".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a bilinear evaluation with divergence detection. When
/// `diverged` is set, `value` is the truncated lower bound at
/// `cutoff_used`, not a converged integral.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BilinearEvalResult {
    pub value: f64,
    pub diverged: bool,
    pub cutoff_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelKind {
    Bessel,
    Riesz,
    /// No kernel weight (dyadic ball averages).
    Flat,
}

/// Evaluator holding the kernel lookup table for a fixed `(n, s)` and
/// quadrature spec. All methods are pure; the evaluator is `Sync` and can
/// be shared across threads.
pub struct PotentialOperator {
    params: PotentialParams,
    quad: QuadratureSpec,
    table: KernelTable,
}

impl PotentialOperator {
    pub fn new(
        params: PotentialParams,
        kernel_spec: &KernelEvalSpec,
        quad: QuadratureSpec,
    ) -> Result<Self, OperatorError> {
        quad.validate()?;
        kernel_spec.validate()?;
        let r_hi = quad.outer_radius.max(60.0) * 1.1;
        let table = KernelTable::build(&params, kernel_spec, CUTOFF_FLOOR, r_hi, 8192)?;
        Ok(Self {
            params,
            quad,
            table,
        })
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Kernel profile value `G_s(r)` from the lookup table.
    pub fn kernel_at(&self, r: f64) -> f64 {
        self.table.eval(r)
    }

    fn kernel_value(&self, kind: KernelKind, r: f64) -> f64 {
        match kind {
            KernelKind::Bessel => self.table.eval(r),
            KernelKind::Riesz => r.powf(self.params.order() - self.params.dimension() as f64),
            KernelKind::Flat => 1.0,
        }
    }

    /// Composite positive-radius grid: log midpoints on
    /// `[inner, min(split, outer)]`, uniform midpoints on `(split, outer]`.
    fn radial_grid(&self, inner: f64, outer: f64) -> Vec<(f64, f64)> {
        let mut nodes = Vec::new();
        let split = self.quad.split_radius.min(outer);
        if inner < split {
            let count = self.quad.radial_nodes;
            let du = (split / inner).ln() / count as f64;
            for i in 0..count {
                let r = inner * ((i as f64 + 0.5) * du).exp();
                nodes.push((r, du * r));
            }
        }
        if outer > split {
            let count = self.quad.radial_nodes;
            let h = (outer - split) / count as f64;
            for i in 0..count {
                nodes.push((split + (i as f64 + 0.5) * h, h));
            }
        }
        nodes
    }

    fn check_dims(
        &self,
        f: &AnalyticFunction,
        g: Option<&AnalyticFunction>,
        x: &[f64],
    ) -> Result<(), OperatorError> {
        let n = self.params.dimension();
        if x.len() != n {
            return Err(OperatorError::DimensionMismatch {
                got: x.len(),
                expected: n,
            });
        }
        f.validate(n)?;
        if let Some(g) = g {
            g.validate(n)?;
        }
        Ok(())
    }

    /// Per-radius contributions of the bilinear integrand, aggregated over
    /// sign/angle, ascending in radius. Summing the second components over
    /// `r >= eps` gives the integral truncated at `eps`.
    fn bilinear_contributions(
        &self,
        kind: KernelKind,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
        inner: f64,
        outer: f64,
    ) -> Result<Vec<(f64, f64)>, OperatorError> {
        let n = self.params.dimension();
        let safe = |v: f64| if v.is_finite() { v } else { 0.0 };
        let grid = self.radial_grid(inner, outer);

        if n == 1 {
            let x0 = x[0];
            let out = grid
                .iter()
                .map(|&(r, w)| {
                    let k = self.kernel_value(kind, r);
                    let plus = safe(f.eval(&[x0 - r])) * safe(g.eval(&[x0 + r]));
                    let minus = safe(f.eval(&[x0 + r])) * safe(g.eval(&[x0 - r]));
                    (r, k * (plus + minus) * w)
                })
                .collect();
            return Ok(out);
        }

        let radial_inputs = f.is_radial() && g.is_radial();
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();

        if radial_inputs && x_norm < 1e-14 {
            // pure radial reduction at the origin
            let omega = unit_sphere_area(n);
            let out = grid
                .iter()
                .map(|&(r, w)| {
                    let k = self.kernel_value(kind, r);
                    let v = safe(f.eval_radial(r, n)) * safe(g.eval_radial(r, n));
                    (r, omega * k * v * r.powi(n as i32 - 1) * w)
                })
                .collect();
            return Ok(out);
        }

        if radial_inputs {
            // 2-D reduction over (|y|, angle between x and y)
            let m = self.quad.angular_nodes;
            let dth = std::f64::consts::PI / m as f64;
            let angles: Vec<(f64, f64)> = (0..m)
                .map(|j| {
                    let th = (j as f64 + 0.5) * dth;
                    let ang_w = match n {
                        2 => 2.0 * dth,
                        _ => 2.0 * std::f64::consts::PI * th.sin() * dth,
                    };
                    (th.cos(), ang_w)
                })
                .collect();
            let out = grid
                .iter()
                .map(|&(r, w)| {
                    let k = self.kernel_value(kind, r);
                    let mut acc = 0.0;
                    for &(c, aw) in &angles {
                        let d_minus =
                            (x_norm * x_norm + r * r - 2.0 * x_norm * r * c).max(0.0).sqrt();
                        let d_plus =
                            (x_norm * x_norm + r * r + 2.0 * x_norm * r * c).max(0.0).sqrt();
                        acc +=
                            safe(f.eval_radial(d_minus, n)) * safe(g.eval_radial(d_plus, n)) * aw;
                    }
                    (r, k * acc * r.powi(n as i32 - 1) * w)
                })
                .collect();
            return Ok(out);
        }

        if n == 2 {
            // Cartesian fallback for non-radial inputs
            let m = 512;
            let h = 2.0 * outer / m as f64;
            let mut out = Vec::with_capacity(m * m / 2);
            for i in 0..m {
                let y0 = -outer + (i as f64 + 0.5) * h;
                for j in 0..m {
                    let y1 = -outer + (j as f64 + 0.5) * h;
                    let r = (y0 * y0 + y1 * y1).sqrt();
                    if r < inner || r > outer {
                        continue;
                    }
                    let k = self.kernel_value(kind, r);
                    let v = safe(f.eval(&[x[0] - y0, x[1] - y1]))
                        * safe(g.eval(&[x[0] + y0, x[1] + y1]));
                    if v != 0.0 {
                        out.push((r, k * v * h * h));
                    }
                }
            }
            out.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            return Ok(out);
        }

        Err(OperatorError::UnsupportedGeometry(
            "dimension 3 with a nonzero base point needs radial inputs".into(),
        ))
    }

    /// Truncated bilinear integral with the given kernel at a single inner
    /// cutoff (no divergence analysis).
    fn truncated(
        &self,
        kind: KernelKind,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
        eps: f64,
    ) -> Result<f64, OperatorError> {
        self.check_dims(f, Some(g), x)?;
        let inner = eps.max(CUTOFF_FLOOR);
        let contribs = self.bilinear_contributions(kind, f, g, x, inner, self.quad.outer_radius)?;
        Ok(contribs.iter().map(|(_, c)| c).sum())
    }

    /// `J_s(f,g)(x)` truncated at `|y| >= eps` (Bessel kernel).
    pub fn bilinear_bessel_truncated(
        &self,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
        eps: f64,
    ) -> Result<f64, OperatorError> {
        self.truncated(KernelKind::Bessel, f, g, x, eps)
    }

    /// Riesz-kernel counterpart of
    /// [`bilinear_bessel_truncated`](Self::bilinear_bessel_truncated).
    pub fn bilinear_riesz_truncated(
        &self,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
        eps: f64,
    ) -> Result<f64, OperatorError> {
        self.truncated(KernelKind::Riesz, f, g, x, eps)
    }

    fn bilinear_with_ratio_test(
        &self,
        kind: KernelKind,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
    ) -> Result<BilinearEvalResult, OperatorError> {
        self.check_dims(f, Some(g), x)?;
        let base = self.quad.inner_cutoff.max(CUTOFF_FLOOR);
        let start = (base * 64.0).min(self.quad.split_radius / 4.0);
        let levels: Vec<f64> = if start <= base {
            vec![base]
        } else {
            let count = ((start / base).log2().floor() as usize + 1).min(8);
            (0..count)
                .map(|j| base * 2.0_f64.powi((count - 1 - j) as i32))
                .collect()
        };

        let contribs = self.bilinear_contributions(kind, f, g, x, base, self.quad.outer_radius)?;
        // partial sums of one master grid: increments across levels are
        // exact and nonnegative for nonnegative integrands
        let values: Vec<f64> = levels
            .iter()
            .map(|eps| {
                contribs
                    .iter()
                    .filter(|(r, _)| *r >= *eps)
                    .map(|(_, c)| c)
                    .sum::<f64>()
            })
            .collect();
        let log_scales: Vec<f64> = levels.iter().map(|e| 1.0 - e.ln()).collect();

        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let total_growth = values.last().unwrap() - values.first().unwrap();
        if values.len() < 4 || total_growth.abs() <= 1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Ok(BilinearEvalResult {
                value: *values.last().unwrap(),
                diverged: false,
                cutoff_used: base,
            });
        }

        match fitting::classify_tail(&values, &log_scales) {
            TailBehavior::Converged => Ok(BilinearEvalResult {
                value: values.last().unwrap() + fitting::geometric_tail_estimate(&values),
                diverged: false,
                cutoff_used: base,
            }),
            TailBehavior::Diverged => Ok(BilinearEvalResult {
                value: *values.last().unwrap(),
                diverged: true,
                cutoff_used: base,
            }),
            TailBehavior::Ambiguous => Err(OperatorError::CutoffNonconvergence(format!(
                "truncated values {values:?} at cutoffs {levels:?}"
            ))),
        }
    }

    /// `J_s(f,g)(x)` with divergence detection by the cutoff-halving ratio
    /// test on a shared master grid.
    pub fn bilinear_bessel(
        &self,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
    ) -> Result<BilinearEvalResult, OperatorError> {
        self.bilinear_with_ratio_test(KernelKind::Bessel, f, g, x)
    }

    /// `I_s(f,g)(x) = ∫ |y|^{s-n} f(x-y) g(x+y) dy` with divergence detection.
    pub fn bilinear_riesz(
        &self,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
    ) -> Result<BilinearEvalResult, OperatorError> {
        self.bilinear_with_ratio_test(KernelKind::Riesz, f, g, x)
    }

    /// Linear potential `(G_s * f)(x)` by convolution quadrature over the
    /// support of `f` (nodes clustered at the kernel singularity `z = x`).
    /// Cross-checks `bilinear_bessel(f, 1, x)` through an independent grid.
    pub fn linear_bessel(&self, f: &AnalyticFunction, x: &[f64]) -> Result<f64, OperatorError> {
        self.check_dims(f, None, x)?;
        let n = self.params.dimension();
        let rho = f.support_radius(n);
        if !rho.is_finite() {
            // no compact support: fall back to the y-centered grid
            let one = AnalyticFunction::Constant { value: 1.0 };
            return Ok(self.bilinear_bessel(f, &one, x)?.value);
        }
        let safe = |v: f64| if v.is_finite() { v } else { 0.0 };
        match n {
            1 => {
                let x0 = x[0];
                let (lo, hi) = support_interval_1d(f, rho);
                let mut acc = 0.0;
                let count = self.quad.radial_nodes;
                let h = (hi - lo) / count as f64;
                for i in 0..count {
                    let z = lo + (i as f64 + 0.5) * h;
                    acc += safe(f.eval(&[z])) * self.table.eval((x0 - z).abs()) * h;
                }
                // replace the coarse cells next to the kernel singularity
                // z = x with log-clustered nodes
                if x0 > lo && x0 < hi {
                    let z_lo = (x0 - h).max(lo);
                    let z_hi = (x0 + h).min(hi);
                    let mut coarse = 0.0;
                    for i in 0..count {
                        let z = lo + (i as f64 + 0.5) * h;
                        if z >= z_lo && z <= z_hi {
                            coarse += safe(f.eval(&[z])) * self.table.eval((x0 - z).abs()) * h;
                        }
                    }
                    let mut fine = 0.0;
                    for (side_width, sign) in [(x0 - z_lo, -1.0), (z_hi - x0, 1.0)] {
                        if side_width <= CUTOFF_FLOOR {
                            continue;
                        }
                        let m = 512;
                        let du = (side_width / CUTOFF_FLOOR).ln() / m as f64;
                        for i in 0..m {
                            let d = CUTOFF_FLOOR * ((i as f64 + 0.5) * du).exp();
                            let z = x0 + sign * d;
                            fine += safe(f.eval(&[z])) * self.table.eval(d) * du * d;
                        }
                    }
                    acc += fine - coarse;
                }
                Ok(acc)
            }
            _ => {
                if !f.is_radial() {
                    return Err(OperatorError::UnsupportedGeometry(
                        "linear potential in dimension >= 2 needs a radial input".into(),
                    ));
                }
                // 2-D reduction over (|z|, angle between x and z)
                let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let m = self.quad.angular_nodes;
                let dth = std::f64::consts::PI / m as f64;
                let count = self.quad.radial_nodes;
                let du = (rho / CUTOFF_FLOOR).ln() / count as f64;
                let mut acc = 0.0;
                for i in 0..count {
                    let zr = CUTOFF_FLOOR * ((i as f64 + 0.5) * du).exp();
                    let w = du * zr;
                    let fz = safe(f.eval_radial(zr, n));
                    if fz == 0.0 {
                        continue;
                    }
                    let mut ang = 0.0;
                    for j in 0..m {
                        let th = (j as f64 + 0.5) * dth;
                        let d = (x_norm * x_norm + zr * zr - 2.0 * x_norm * zr * th.cos())
                            .max(0.0)
                            .sqrt()
                            .max(CUTOFF_FLOOR);
                        let ang_w = match n {
                            2 => 2.0 * dth,
                            _ => 2.0 * std::f64::consts::PI * th.sin() * dth,
                        };
                        ang += self.table.eval(d) * ang_w;
                    }
                    acc += fz * ang * zr.powi(n as i32 - 1) * w;
                }
                Ok(acc)
            }
        }
    }

    /// Dyadic piece `B_k(f,g)(x) = ∫_{|y| < 2^{-k}} f(x-y) g(x+y) dy`
    /// (no kernel weight).
    pub fn dyadic_piece(
        &self,
        k: i32,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        x: &[f64],
    ) -> Result<f64, OperatorError> {
        self.check_dims(f, Some(g), x)?;
        let radius = 2.0_f64.powi(-k);
        let contribs =
            self.bilinear_contributions(KernelKind::Flat, f, g, x, CUTOFF_FLOOR, radius.min(1e6))?;
        Ok(contribs.iter().map(|(_, c)| c).sum())
    }

    /// Batch evaluation of `J_s(f,g)` at many points (parallel, ordered).
    pub fn bilinear_bessel_batch(
        &self,
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        xs: &[Vec<f64>],
    ) -> Result<Vec<BilinearEvalResult>, OperatorError> {
        xs.par_iter()
            .map(|x| self.bilinear_bessel(f, g, x))
            .collect()
    }
}

fn support_interval_1d(f: &AnalyticFunction, rho: f64) -> (f64, f64) {
    // only the indicator carries an off-center support
    if let AnalyticFunction::Indicator { center, radius } = f {
        (center[0] - radius, center[0] + radius)
    } else {
        (-rho, rho)
    }
}

/// Dyadic weight `a_k`: `2^{k(n-s)}` for `k >= 0`, `exp(-2^{-k}/4)` for `k < 0`.
pub fn dyadic_weight(k: i32, params: &PotentialParams) -> f64 {
    if k >= 0 {
        2.0_f64.powf(k as f64 * (params.dimension() as f64 - params.order()))
    } else {
        (-(2.0_f64.powi(-k)) / 4.0).exp()
    }
}

/// CSV export of batch results: `x, value, diverged, cutoff_used`.
pub fn write_batch_csv<W: Write>(
    mut w: W,
    xs: &[Vec<f64>],
    results: &[BilinearEvalResult],
) -> std::io::Result<()> {
    writeln!(w, "x,value,diverged,cutoff_used")?;
    for (x, r) in xs.iter().zip(results) {
        let coords = x
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(w, "{},{},{},{}", coords, r.value, r.diverged, r.cutoff_used)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::unit_ball_volume;

    fn op(n: usize, s: f64) -> PotentialOperator {
        let params = PotentialParams::new(n, s).unwrap();
        PotentialOperator::new(
            params,
            &KernelEvalSpec::default(),
            QuadratureSpec::default_for(n),
        )
        .unwrap()
    }

    fn indicator(radius: f64) -> AnalyticFunction {
        AnalyticFunction::Indicator {
            center: vec![0.0],
            radius,
        }
    }

    fn zero() -> AnalyticFunction {
        AnalyticFunction::Constant { value: 0.0 }
    }

    #[test]
    fn zero_inputs_give_zero() {
        let op = op(1, 0.5);
        let r = op.bilinear_bessel(&zero(), &zero(), &[0.3]).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.diverged);
        let r = op.bilinear_riesz(&zero(), &zero(), &[0.0]).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn riesz_indicator_pair_at_origin() {
        // f = g = 1_{B(0,1)}, n=1, s=1/2: ∫_{-1}^{1} |y|^{-1/2} dy = 4
        let op = op(1, 0.5);
        let r = op
            .bilinear_riesz(&indicator(1.0), &indicator(1.0), &[0.0])
            .unwrap();
        assert!(!r.diverged);
        assert!((r.value - 4.0).abs() < 4e-3, "got {}", r.value);
    }

    #[test]
    fn bessel_indicator_plateau_exceeds_annulus_mass() {
        // J_s(1_{B(0,R)}, 1_{B(0,R)})(x) >= ∫_{1/2<=|y|<=1} G_s for |x| <= R-2
        let op = op(1, 0.5);
        let params = PotentialParams::new(1, 0.5).unwrap();
        let c0 =
            crate::kernel::kernel_annulus_mass(&params, &KernelEvalSpec::default(), 0.5, 1.0)
                .unwrap();
        assert!(c0 > 0.0);
        let f = indicator(4.0);
        for x in [0.0, 1.0, 1.9] {
            let r = op.bilinear_bessel(&f, &f, &[x]).unwrap();
            assert!(r.value >= c0, "x={x}: {} < {c0}", r.value);
        }
    }

    #[test]
    fn critical_power_log_pair_diverges() {
        // 1/p + 1/q = s/n with beta+gamma <= 1: J_s(f,g)(0) = infinity
        let op = op(1, 0.5);
        let f = AnalyticFunction::PowerLog {
            power_exp: 0.25,
            log_exp: 0.4,
            support_radius: 1.0,
        };
        let r = op.bilinear_bessel(&f, &f, &[0.0]).unwrap();
        assert!(r.diverged, "expected divergence, value {}", r.value);
        assert!(r.value > 0.0);
    }

    #[test]
    fn yukawa_linear_potential_of_unit_ball() {
        // n=3, s=2: (G_2 * 1_{B(0,1)})(0) = 1 - 2/e
        let op = op(3, 2.0);
        let f = AnalyticFunction::Indicator {
            center: vec![0.0; 3],
            radius: 1.0,
        };
        let got = op.linear_bessel(&f, &[0.0; 3]).unwrap();
        let want = 1.0 - 2.0 * (-1.0_f64).exp();
        assert!(((got - want) / want).abs() < 1e-3, "got {got}, want {want}");
    }

    #[test]
    fn linear_constant_gives_kernel_mass() {
        let op = op(1, 0.5);
        let got = op
            .linear_bessel(&AnalyticFunction::Constant { value: 1.0 }, &[0.7])
            .unwrap();
        assert!((got - 1.0).abs() < 1e-3, "got {got}");
    }

    #[test]
    fn linear_matches_bilinear_with_constant_partner() {
        let op = op(1, 0.5);
        let one = AnalyticFunction::Constant { value: 1.0 };
        let f = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        for x in [0.0, 0.3, 0.9, 2.0] {
            let lin = op.linear_bessel(&f, &[x]).unwrap();
            let bil = op.bilinear_bessel(&f, &one, &[x]).unwrap().value;
            assert!(
                ((lin - bil) / bil.abs().max(1e-12)).abs() < 5e-3,
                "x={x}: linear {lin} vs bilinear {bil}"
            );
        }
    }

    #[test]
    fn mollifier_potential_bounded_below_on_annulus() {
        // (G_s * f_eps)(x) >= c |x|^{s-n} for 4 eps <= |x| <= 1/2
        let op = op(1, 0.5);
        let eps = 0.01;
        let f = AnalyticFunction::Mollifier { epsilon: eps };
        for x in [4.0 * eps, 0.1, 0.25, 0.5] {
            let v = op.linear_bessel(&f, &[x]).unwrap();
            let ratio = v * x.powf(0.5);
            assert!(ratio > 0.1, "x={x}: scaled value {ratio}");
        }
    }

    #[test]
    fn dyadic_piece_of_constants_is_ball_volume() {
        for (n, s) in [(1usize, 0.5), (2, 1.0)] {
            let op = op(n, s);
            let one = AnalyticFunction::Constant { value: 1.0 };
            for k in [-2, 0, 3] {
                let got = op.dyadic_piece(k, &one, &one, &vec![0.1; n]).unwrap();
                let want = unit_ball_volume(n) * 2.0_f64.powi(-k * n as i32);
                assert!(
                    ((got - want) / want).abs() < 1e-3,
                    "n={n} k={k}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn dyadic_piece_vanishes_for_large_k() {
        let op = op(1, 0.5);
        let f = indicator(1.0);
        let b20 = op.dyadic_piece(20, &f, &f, &[0.0]).unwrap();
        assert!(b20 < 1e-5, "got {b20}");
    }

    #[test]
    fn dyadic_weights_exact() {
        let p1 = PotentialParams::new(1, 0.5).unwrap();
        assert_eq!(dyadic_weight(0, &p1), 1.0);
        assert!((dyadic_weight(2, &p1) - 2.0).abs() < 1e-15);
        assert!((dyadic_weight(-3, &p1) - (-2.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn shell_sum_reconstructs_bilinear() {
        // sum_k [B_k - B_{k+1}] weighted by the kernel at shell midpoints
        // approximates J_s within 10%
        let op = op(1, 0.5);
        let f = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        for x in [0.0, 0.25, 0.6] {
            let direct = op.bilinear_bessel(&f, &f, &[x]).unwrap().value;
            let mut sum = 0.0;
            for k in -3..30 {
                let bk = op.dyadic_piece(k, &f, &f, &[x]).unwrap();
                let bk1 = op.dyadic_piece(k + 1, &f, &f, &[x]).unwrap();
                let mid = 0.75 * 2.0_f64.powi(-k);
                sum += (bk - bk1) * op.kernel_at(mid);
            }
            assert!(
                ((sum - direct) / direct).abs() < 0.1,
                "x={x}: shell sum {sum} vs direct {direct}"
            );
        }
    }

    #[test]
    fn dyadic_majorization_with_shell_maxima() {
        // truncated J_s <= sum_k max_{shell k}(G_s) * [B_k - B_{k+1}]
        let op = op(1, 0.5);
        let f = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        for x in [0.0, 0.4] {
            let direct = op.bilinear_bessel(&f, &f, &[x]).unwrap().value;
            let mut sum = 0.0;
            for k in -3..30 {
                let bk = op.dyadic_piece(k, &f, &f, &[x]).unwrap();
                let bk1 = op.dyadic_piece(k + 1, &f, &f, &[x]).unwrap();
                // kernel decreases radially: shell max is at the inner edge
                let shell_max = op.kernel_at(2.0_f64.powi(-k - 1));
                sum += (bk - bk1).max(0.0) * shell_max;
            }
            assert!(
                sum * 1.1 >= direct,
                "x={x}: weighted shell sum {sum} vs direct {direct}"
            );
        }
    }

    #[test]
    fn symmetry_in_swapped_arguments() {
        // for even f, g: J_s(f,g)(x) = J_s(g,f)(x)
        let op = op(1, 0.5);
        let f = AnalyticFunction::SmoothBump {
            inner: 0.25,
            outer: 0.75,
        };
        let g = indicator(1.0);
        for x in [0.0, 0.3, 1.1] {
            let a = op.bilinear_bessel(&f, &g, &[x]).unwrap().value;
            let b = op.bilinear_bessel(&g, &f, &[x]).unwrap().value;
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn bilinearity_via_mollifier_indicator_scaling() {
        // Mollifier{eps} = Indicator{0,eps} / (v_n eps^n): exact quadrature scaling
        let op = op(1, 0.5);
        let eps = 0.05;
        let moll = AnalyticFunction::Mollifier { epsilon: eps };
        let ind = AnalyticFunction::Indicator {
            center: vec![0.0],
            radius: eps,
        };
        let g = indicator(1.0);
        let mass = unit_ball_volume(1) * eps;
        for x in [0.0, 0.2] {
            let a = op.bilinear_bessel(&moll, &g, &[x]).unwrap().value;
            let b = op.bilinear_bessel(&ind, &g, &[x]).unwrap().value / mass;
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1e-10),
                "x={x}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn bessel_dominated_by_riesz() {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let spec = KernelEvalSpec::default();
        let c = crate::kernel::fit_kernel_constants(&params, &spec).unwrap();
        let op = op(1, 0.5);
        let f = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        for i in 0..20 {
            let x = -1.5 + 3.0 * i as f64 / 19.0;
            let b = op.bilinear_bessel(&f, &f, &[x]).unwrap().value;
            let r = op.bilinear_riesz(&f, &f, &[x]).unwrap().value;
            assert!(
                b <= c.c_small * r * (1.0 + 1e-6) + 1e-12,
                "x={x}: bessel {b} vs bound {}",
                c.c_small * r
            );
        }
    }

    #[test]
    fn sup_bound_below_critical_sum() {
        // 1/p + 1/q < s/n: sup_x J_s(f,g) <= ||G||_{t'} ||f||_p ||g||_q
        let n = 1;
        let s = 0.8;
        let params = PotentialParams::new(n, s).unwrap();
        let op = op(n, s);
        let (p, q) = (4.0, 4.0); // 1/p + 1/q = 0.5 < 0.8
        let t_conj = 2.0; // conjugate of t with 1/t = 1/p + 1/q
        let gnorm =
            crate::kernel::kernel_lt_norm(&params, &KernelEvalSpec::default(), t_conj).unwrap();
        let f = indicator(1.0);
        let g = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        let bound =
            gnorm * f.lp_norm_analytic(p, n).unwrap() * g.lp_norm_analytic(q, n).unwrap();
        for i in 0..20 {
            let x = -2.0 + 4.0 * i as f64 / 19.0;
            let v = op.bilinear_bessel(&f, &g, &[x]).unwrap().value;
            assert!(v <= bound * (1.0 + 1e-6), "x={x}: {v} > {bound}");
        }
    }

    #[test]
    fn radial_reduction_continuous_at_origin() {
        let op = op(2, 1.0);
        let f = AnalyticFunction::SmoothBump {
            inner: 0.5,
            outer: 1.0,
        };
        let at0 = op.bilinear_bessel(&f, &f, &[0.0, 0.0]).unwrap().value;
        let near0 = op.bilinear_bessel(&f, &f, &[1e-3, 0.0]).unwrap().value;
        assert!(
            ((at0 - near0) / at0).abs() < 5e-3,
            "origin {at0} vs near {near0}"
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let op = op(2, 1.0);
        let f = AnalyticFunction::Constant { value: 1.0 };
        assert!(matches!(
            op.bilinear_bessel(&f, &f, &[0.0]),
            Err(OperatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_radial_3d_off_origin_rejected() {
        let op = op(3, 1.5);
        let f = AnalyticFunction::Indicator {
            center: vec![0.5, 0.0, 0.0],
            radius: 1.0,
        };
        let g = AnalyticFunction::Constant { value: 1.0 };
        assert!(matches!(
            op.bilinear_bessel(&f, &g, &[0.1, 0.0, 0.0]),
            Err(OperatorError::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn batch_matches_single_evaluations() {
        let op = op(1, 0.5);
        let f = indicator(1.0);
        let xs: Vec<Vec<f64>> = vec![vec![0.0], vec![0.5], vec![1.2]];
        let batch = op.bilinear_bessel_batch(&f, &f, &xs).unwrap();
        for (x, r) in xs.iter().zip(&batch) {
            let single = op.bilinear_bessel(&f, &f, x).unwrap();
            assert_eq!(single.value, r.value);
        }
        let mut csv = Vec::new();
        write_batch_csv(&mut csv, &xs, &batch).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("x,value,diverged,cutoff_used\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
