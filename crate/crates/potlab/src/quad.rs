//! Shared 1-D quadrature node builders (trapezoid weights).

/// Log-spaced nodes on `[r_lo, r_hi]` with trapezoid weights for `∫ f(r) dr`
/// (the weights absorb the Jacobian of the log substitution).
pub fn log_trapezoid_nodes(r_lo: f64, r_hi: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(r_lo > 0.0 && r_hi > r_lo && count >= 2);
    let u_lo = r_lo.ln();
    let du = (r_hi.ln() - u_lo) / (count - 1) as f64;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for i in 0..count {
        let r = (u_lo + du * i as f64).exp();
        let w = if i == 0 || i == count - 1 { du / 2.0 } else { du };
        nodes.push(r);
        weights.push(w * r);
    }
    (nodes, weights)
}

/// Log-spaced midpoint nodes on `[r_lo, r_hi]` with weights for `∫ f(r) dr`.
/// No node falls on an endpoint, so integrands with open-support boundaries
/// at the interval ends are sampled stably.
pub fn log_midpoint_nodes(r_lo: f64, r_hi: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(r_lo > 0.0 && r_hi > r_lo && count >= 1);
    let u_lo = r_lo.ln();
    let du = (r_hi.ln() - u_lo) / count as f64;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for i in 0..count {
        let r = (u_lo + du * (i as f64 + 0.5)).exp();
        nodes.push(r);
        weights.push(du * r);
    }
    (nodes, weights)
}

/// Uniform nodes on `[a, b]` with trapezoid weights.
pub fn uniform_trapezoid_nodes(a: f64, b: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(b > a && count >= 2);
    let h = (b - a) / (count - 1) as f64;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for i in 0..count {
        nodes.push(a + h * i as f64);
        weights.push(if i == 0 || i == count - 1 { h / 2.0 } else { h });
    }
    (nodes, weights)
}
