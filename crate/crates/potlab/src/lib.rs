//! Numerical laboratory for bilinear Bessel potentials.
//!
//! The central object is the bilinear potential
//!
//! ```text
//! J_s(f, g)(x) = ∫ G_s(y) f(x - y) g(x + y) dy
//! ```
//!
//! where `G_s` is the Bessel kernel with Fourier transform
//! `(1 + 4π²|ξ|²)^{-s/2}`, `0 < s < n`, on `ℝⁿ` with `n ≤ 3`.
//!
//! The crate evaluates the kernel by a heat-kernel subordination integral,
//! evaluates `J_s` and its Riesz-kernel counterpart by singular quadrature,
//! computes Lorentz quasi-norms through distribution functions and
//! decreasing rearrangements, and runs a catalog of desk-scale experiments
//! that measure boundedness exponents, scaling rates, and counterexample
//! divergence rates for the operator.
//!
//! Modules:
//! - [`kernel`]: pointwise Bessel/Riesz kernel evaluation and fitted constants
//! - [`funcfam`]: exactly evaluable radial test-function families
//! - [`lorentz`]: distribution functions, rearrangements, Lorentz norms
//! - [`operator`]: quadrature evaluation of the bilinear and linear potentials
//! - [`verify`]: the experiment harness and exponent-region classifier
//! - [`cli`]: config parsing, report emission, command driver

pub mod cli;
pub mod fitting;
pub mod funcfam;
pub mod kernel;
pub mod lorentz;
pub mod operator;
pub mod params;
pub(crate) mod quad;
pub mod verify;

pub use funcfam::AnalyticFunction;
pub use kernel::KernelEvalSpec;
pub use lorentz::{GridFunction, LorentzIndex};
pub use operator::{BilinearEvalResult, QuadratureSpec};
pub use params::PotentialParams;
pub use verify::{ExperimentReport, ExponentTriple, RegionVerdict};

