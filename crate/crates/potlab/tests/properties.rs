//! Property tests for the structural invariants: support containment,
//! dilation norm invariance, monotonicity of distribution functions and
//! rearrangements, and the exponent-region partition.

use potlab::funcfam::AnalyticFunction;
use potlab::lorentz::{
    decreasing_rearrangement, distribution_function, lorentz_norm, GridFunction, LorentzIndex,
    NormMethod,
};
use potlab::params::PotentialParams;
use potlab::verify::{classify_exponents, ExponentTriple, RegionLabel};
use proptest::prelude::*;

fn arb_radial_function() -> impl Strategy<Value = AnalyticFunction> {
    prop_oneof![
        (0.1_f64..3.0).prop_map(|radius| AnalyticFunction::Indicator {
            center: vec![0.0],
            radius,
        }),
        (0.0_f64..0.9, 0.0_f64..1.5, 0.1_f64..1.0).prop_map(|(a, b, rho)| {
            AnalyticFunction::PowerLog {
                power_exp: a,
                log_exp: b,
                support_radius: rho,
            }
        }),
        (0.001_f64..0.124).prop_map(|epsilon| AnalyticFunction::Mollifier { epsilon }),
        (0.1_f64..0.5, 0.6_f64..2.0).prop_map(|(inner, outer)| AnalyticFunction::SmoothBump {
            inner,
            outer,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_vanishes_outside_support(f in arb_radial_function(), scale in 1.0_f64..20.0) {
        let rho = f.support_radius(1);
        prop_assume!(rho.is_finite());
        let x = rho * scale * (1.0 + 1e-9);
        prop_assert_eq!(f.eval(&[x]), 0.0);
        prop_assert_eq!(f.eval(&[-x]), 0.0);
    }

    #[test]
    fn eval_nonnegative(f in arb_radial_function(), x in -5.0_f64..5.0) {
        prop_assert!(f.eval(&[x]) >= 0.0);
    }

    #[test]
    fn dilation_preserves_matched_norm(lambda in 1.0_f64..16.0, p in 1.0_f64..4.0) {
        let base = AnalyticFunction::SmoothBump { inner: 0.5, outer: 1.0 };
        let base_norm = base.lp_norm_analytic(p, 1).unwrap();
        let dilated = AnalyticFunction::Dilate {
            base: Box::new(base),
            lambda,
            norm_exp: 1.0 / p,
        };
        let dilated_norm = dilated.lp_norm_analytic(p, 1).unwrap();
        prop_assert!(((dilated_norm - base_norm) / base_norm).abs() < 1e-6);
    }

    #[test]
    fn distribution_and_rearrangement_monotone(samples in prop::collection::vec(0.0_f64..10.0, 16..256)) {
        let cells = samples.len();
        let g = GridFunction::from_samples_cube(1, 1.0, cells, samples).unwrap();
        let thresholds: Vec<f64> = (1..20).map(|k| 0.5 * k as f64).collect();
        let d = distribution_function(&g, &thresholds).unwrap();
        for w in d.measures.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let t = 0.1 * k as f64;
            let v = decreasing_rearrangement(&g, t);
            prop_assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn rearrangement_is_generalized_inverse(samples in prop::collection::vec(0.0_f64..10.0, 16..256), lam in 0.01_f64..9.0) {
        let cells = samples.len();
        let g = GridFunction::from_samples_cube(1, 1.0, cells, samples).unwrap();
        let d = distribution_function(&g, &[lam]).unwrap().measures[0];
        if d > 0.0 {
            prop_assert!(decreasing_rearrangement(&g, d) <= lam * (1.0 + 1e-12));
        }
    }

    #[test]
    fn norm_methods_agree_on_random_grids(samples in prop::collection::vec(0.0_f64..4.0, 64..512), p in 0.6_f64..3.0, alpha in 0.6_f64..4.0) {
        let cells = samples.len();
        let g = GridFunction::from_samples_cube(1, 1.0, cells, samples).unwrap();
        let idx = LorentzIndex::new(p, alpha).unwrap();
        let re = lorentz_norm(&g, &idx, NormMethod::Rearrangement).unwrap();
        let di = lorentz_norm(&g, &idx, NormMethod::Distribution).unwrap();
        let scale = re.max(di);
        prop_assert!(scale == 0.0 || (re - di).abs() / scale < 0.02);
    }

    #[test]
    fn region_partition_matches_strip(u in 0.0_f64..1.0, v in 0.0_f64..1.0, w in 0.0_f64..2.2) {
        let params = PotentialParams::new(1, 0.5).unwrap();
        let triple = ExponentTriple::new(u, v, w).unwrap();
        let verdict = classify_exponents(&triple, &params);
        let in_strip = w <= u + v + 1e-9 && w + 1e-9 >= u + v - 0.5;
        prop_assert_eq!(verdict.label == RegionLabel::OutsideStripFail, !in_strip);
        if w > 1e-9 && in_strip {
            prop_assert_eq!(
                verdict.label == RegionLabel::StrongLebesgue,
                (w - (u + v)).abs() <= 1e-9
            );
        }
        prop_assert!(!verdict.witnesses.is_empty());
    }
}
