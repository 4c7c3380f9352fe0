//! Exponent-region classifier and barycentric coordinates for the
//! three-point restricted weak-type interpolation geometry.

use super::{ExponentTriple, VerifyError};
use crate::params::PotentialParams;
use serde::{Deserialize, Serialize};

const TOL: f64 = 1e-9;

/// Boundedness region of an exponent triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    /// Lebesgue plane `1/r = 1/p + 1/q` (finite `r`): strong-type bounds.
    StrongLebesgue,
    /// Fractional surface `1/r = 1/p + 1/q - s/n` (interior and the `p=1`
    /// or `q=1` edges) and the open region between the two planes: Lorentz
    /// space bounds.
    FractionalSurfaceLorentz,
    /// Boundary points where only weak-type bounds hold: `(1,1,2-s/n)` and
    /// the fractional-surface edges with an `L^∞` input.
    WeakEndpoint,
    /// `1/p + 1/q < s/n` with `r = ∞`: bounded into `L^∞`.
    InfinityTriangle,
    /// `1/p + 1/q = s/n` with `r = ∞`: mapping into `L^∞` fails.
    CriticalLineFail,
    /// The necessary strip `1/p+1/q-s/n <= 1/r <= 1/p+1/q` is violated.
    OutsideStripFail,
}

/// Classification with the statements that justify it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub label: RegionLabel,
    pub witnesses: Vec<String>,
}

/// Classify an exponent triple against the boundedness regions of the
/// bilinear potential for the given `(n, s)`.
pub fn classify_exponents(triple: &ExponentTriple, params: &PotentialParams) -> RegionVerdict {
    let u = triple.inv_p;
    let v = triple.inv_q;
    let w = triple.inv_r;
    let sigma = params.critical_index_sum();
    let mut witnesses = Vec::new();

    if w > u + v + TOL || w + TOL < u + v - sigma {
        witnesses.push(format!(
            "necessary index strip violated: need 1/p+1/q-s/n <= 1/r <= 1/p+1/q, got 1/r={w} with 1/p+1/q={}",
            u + v
        ));
        return RegionVerdict {
            label: RegionLabel::OutsideStripFail,
            witnesses,
        };
    }

    if w <= TOL {
        // target L^infinity
        if u + v < sigma - TOL {
            witnesses.push(
                "sup-norm bound below the critical index sum: the kernel lies in the conjugate Lebesgue class, so the pairing is bounded pointwise"
                    .into(),
            );
            return RegionVerdict {
                label: RegionLabel::InfinityTriangle,
                witnesses,
            };
        }
        if (u + v - sigma).abs() <= TOL {
            witnesses.push(
                "on the critical line 1/p+1/q = s/n the power-log input pair makes the potential infinite at a point, so mapping into L^infinity fails"
                    .into(),
            );
            return RegionVerdict {
                label: RegionLabel::CriticalLineFail,
                witnesses,
            };
        }
    }

    if (w - (u + v)).abs() <= TOL {
        witnesses.push(
            "Lebesgue plane 1/r = 1/p+1/q: strong bounds for a bilinear convolution with finite kernel mass, extended to the full plane through the L^1 x L^1 -> L^{1/2} dyadic estimate"
                .into(),
        );
        return RegionVerdict {
            label: RegionLabel::StrongLebesgue,
            witnesses,
        };
    }

    let on_surface = (w - (u + v - sigma)).abs() <= TOL;
    if on_surface {
        let u_at_1 = (u - 1.0).abs() <= TOL;
        let v_at_1 = (v - 1.0).abs() <= TOL;
        let u_at_0 = u <= TOL;
        let v_at_0 = v <= TOL;
        if u_at_1 && v_at_1 {
            witnesses.push(
                "corner (1,1,2-s/n): L^1 x L^1 maps into weak L^{n/(2n-s)} by Riesz-kernel domination; only weak type holds"
                    .into(),
            );
            return RegionVerdict {
                label: RegionLabel::WeakEndpoint,
                witnesses,
            };
        }
        if u_at_0 || v_at_0 {
            witnesses.push(
                "fractional-surface edge with an L^infinity input: L^p x L^inf maps into weak L^{np/(n-sp)} through the linear potential; weak type only"
                    .into(),
            );
            return RegionVerdict {
                label: RegionLabel::WeakEndpoint,
                witnesses,
            };
        }
        if u_at_1 || v_at_1 {
            witnesses.push(
                "fractional-surface edge with an L^1 input: Lorentz bounds L^p x L^1 -> L^{r,alpha} hold for every alpha >= p"
                    .into(),
            );
            return RegionVerdict {
                label: RegionLabel::FractionalSurfaceLorentz,
                witnesses,
            };
        }
        witnesses.push(
            "fractional-surface interior: three-point restricted weak-type interpolation gives L^{p,a1} x L^{q,a2} -> L^{r,a} with 1/a = 1/a1 + 1/a2"
                .into(),
        );
        return RegionVerdict {
            label: RegionLabel::FractionalSurfaceLorentz,
            witnesses,
        };
    }

    witnesses.push(
        "strictly between the Lebesgue plane and the fractional surface: fixed-input interpolation of the strong and weak bounds gives L^{r,alpha} for every alpha"
            .into(),
    );
    RegionVerdict {
        label: RegionLabel::FractionalSurfaceLorentz,
        witnesses,
    }
}

/// Barycentric coordinates `(θ0, θ1, θ2)` of `(1/p, 1/q, 1/r)` in the
/// simplex spanned by the endpoint triples `(1,1,2-s/n)`,
/// `(1/p0, 0, 1/p0 - s/n)`, `(0, 1/p0, 1/p0 - s/n)`.
///
/// `p0` must satisfy `max(1/p, 1/q, s/n) < 1/p0 < min(1, 1/p + 1/q)`.
pub fn compute_barycentric(
    p: f64,
    q: f64,
    p0: f64,
    params: &PotentialParams,
) -> Result<(f64, f64, f64), VerifyError> {
    let u = 1.0 / p;
    let v = 1.0 / q;
    let inv_p0 = 1.0 / p0;
    let sigma = params.critical_index_sum();
    let lo = u.max(v).max(sigma);
    let hi = 1.0_f64.min(u + v);
    if !(inv_p0 > lo && inv_p0 < hi) {
        return Err(VerifyError::Precondition(format!(
            "1/p0 = {inv_p0} outside the admissible window ({lo}, {hi})"
        )));
    }
    let theta0 = (u + v - inv_p0) / (2.0 - inv_p0);
    let theta1 = (u - theta0) / inv_p0;
    let theta2 = (v - theta0) / inv_p0;
    Ok((theta0, theta1, theta2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, s: f64) -> PotentialParams {
        PotentialParams::new(n, s).unwrap()
    }

    fn label(u: f64, v: f64, w: f64, n: usize, s: f64) -> RegionLabel {
        classify_exponents(&ExponentTriple::new(u, v, w).unwrap(), &params(n, s)).label
    }

    #[test]
    fn weak_corner() {
        // (1, 1, 2 - s/n)
        assert_eq!(label(1.0, 1.0, 1.5, 1, 0.5), RegionLabel::WeakEndpoint);
    }

    #[test]
    fn infinity_triangle_origin() {
        assert_eq!(label(0.0, 0.0, 0.0, 1, 0.5), RegionLabel::InfinityTriangle);
    }

    #[test]
    fn critical_line_failure() {
        // (1/p, 1/q) = (s/n, 0), r = infinity
        assert_eq!(label(0.5, 0.0, 0.0, 1, 0.5), RegionLabel::CriticalLineFail);
    }

    #[test]
    fn lebesgue_plane_strong() {
        assert_eq!(label(0.5, 0.5, 1.0, 1, 0.5), RegionLabel::StrongLebesgue);
        assert_eq!(label(1.0, 1.0, 2.0, 2, 1.0), RegionLabel::StrongLebesgue);
    }

    #[test]
    fn outside_strip() {
        assert_eq!(label(0.5, 0.5, 1.2, 1, 0.5), RegionLabel::OutsideStripFail);
        assert_eq!(label(0.5, 0.5, 0.3, 1, 0.5), RegionLabel::OutsideStripFail);
        // w = 0 with 1/p + 1/q > s/n is below the strip
        assert_eq!(label(0.9, 0.9, 0.0, 1, 0.5), RegionLabel::OutsideStripFail);
    }

    #[test]
    fn fractional_surface_interior_and_edges() {
        // interior point on the surface
        assert_eq!(
            label(0.5, 0.5, 0.5, 1, 0.5),
            RegionLabel::FractionalSurfaceLorentz
        );
        // q = 1 edge keeps Lorentz bounds
        assert_eq!(
            label(0.4, 1.0, 0.9, 1, 0.5),
            RegionLabel::FractionalSurfaceLorentz
        );
        // q = infinity edge is weak only
        assert_eq!(label(0.75, 0.0, 0.25, 1, 0.5), RegionLabel::WeakEndpoint);
        // between the planes
        assert_eq!(
            label(0.5, 0.5, 0.75, 1, 0.5),
            RegionLabel::FractionalSurfaceLorentz
        );
    }

    #[test]
    fn partition_invariants_on_lattice() {
        let prm = params(1, 0.5);
        let sigma = 0.5;
        for i in 0..=10 {
            for j in 0..=10 {
                let u = i as f64 / 10.0;
                let v = j as f64 / 10.0;
                for w in [0.0, 0.2, u + v - sigma, u + v, u + v + 0.1] {
                    if w < 0.0 {
                        continue;
                    }
                    let t = ExponentTriple::new(u, v, w).unwrap();
                    let verdict = classify_exponents(&t, &prm);
                    let in_strip = w <= u + v + TOL && w + TOL >= u + v - sigma;
                    assert_eq!(
                        verdict.label == RegionLabel::OutsideStripFail,
                        !in_strip,
                        "strip iff not outside at ({u},{v},{w})"
                    );
                    if w > TOL {
                        assert_eq!(
                            verdict.label == RegionLabel::StrongLebesgue,
                            (w - (u + v)).abs() <= TOL,
                            "lebesgue-plane label exactly on the plane at ({u},{v},{w})"
                        );
                    }
                    assert!(!verdict.witnesses.is_empty());
                }
            }
        }
    }

    #[test]
    fn barycentric_worked_example() {
        // p = q = 2, s/n = 1/2, 1/p0 = 3/4
        let prm = params(2, 1.0);
        let (t0, t1, t2) = compute_barycentric(2.0, 2.0, 4.0 / 3.0, &prm).unwrap();
        assert!((t0 - 0.2).abs() < 1e-14);
        assert!((t1 - 0.4).abs() < 1e-14);
        assert!((t2 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn barycentric_symmetry_and_reconstruction() {
        let prm = params(1, 0.5);
        let (p, q, p0) = (2.5, 2.5, 1.45);
        let (t0, t1, t2) = compute_barycentric(p, q, p0, &prm).unwrap();
        assert!((t1 - t2).abs() < 1e-14, "symmetric inputs give theta1 = theta2");
        let inv_p0 = 1.0 / p0;
        let u = t0 + t1 * inv_p0;
        let v = t0 + t2 * inv_p0;
        let w = t0 * (2.0 - 0.5) + (t1 + t2) * (inv_p0 - 0.5);
        assert!((u - 1.0 / p).abs() < 1e-14);
        assert!((v - 1.0 / q).abs() < 1e-14);
        assert!((w - (1.0 / p + 1.0 / q - 0.5)).abs() < 1e-14);
        assert!((t0 + t1 + t2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn barycentric_rejects_window_violation() {
        let prm = params(1, 0.5);
        // 1/p0 = 0.4 < s/n = 0.5
        assert!(compute_barycentric(2.0, 2.0, 2.5, &prm).is_err());
    }
}
