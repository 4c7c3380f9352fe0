//! Dimension and potential order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("dimension n must be 1, 2, or 3 (got {0})")]
    UnsupportedDimension(usize),
    #[error("order must satisfy 0 < s < n (got s={s}, n={n})")]
    OrderOutOfRange { s: f64, n: usize },
}

/// The pair `(n, s)` with `1 <= n <= 3` and `0 < s < n`. Governs the kernel
/// and all exponent arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    n: usize,
    s: f64,
}

impl PotentialParams {
    pub fn new(n: usize, s: f64) -> Result<Self, ParamsError> {
        if !(1..=3).contains(&n) {
            return Err(ParamsError::UnsupportedDimension(n));
        }
        if !(s > 0.0 && s < n as f64) || !s.is_finite() {
            return Err(ParamsError::OrderOutOfRange { s, n });
        }
        Ok(Self { n, s })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// `s/n`, the index sum on the critical line.
    pub fn critical_index_sum(&self) -> f64 {
        self.s / self.n as f64
    }
}

/// Volume of the unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Surface measure of the unit sphere in dimension `n` (length of S^{n-1}).
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_params() {
        let p = PotentialParams::new(3, 2.0).unwrap();
        assert_eq!(p.dimension(), 3);
        assert_eq!(p.order(), 2.0);
        assert!((p.critical_index_sum() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert_eq!(
            PotentialParams::new(4, 1.0).unwrap_err(),
            ParamsError::UnsupportedDimension(4)
        );
        assert!(PotentialParams::new(0, 0.5).is_err());
    }

    #[test]
    fn rejects_order_out_of_range() {
        assert!(PotentialParams::new(1, 1.0).is_err());
        assert!(PotentialParams::new(1, 0.0).is_err());
        assert!(PotentialParams::new(2, -0.5).is_err());
        assert!(PotentialParams::new(2, f64::NAN).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}
