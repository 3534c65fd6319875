use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use ptscatter_core::model::PotentialSpec;
use ptscatter_core::oracle::{oracle_scatter, IntegratorConfig};
use ptscatter_core::scalar::distance_to_integer;
use ptscatter_core::scattering::{build_basis, scatter};
use ptscatter_core::specfun::complex_gamma;
use ptscatter_core::Side;

fn v0_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.01f64..0.49, Just(0.5), 0.51f64..1.5]
}

proptest! {
    #[test]
    fn gamma_reflection(re in -8.0f64..8.0, im in -5.0f64..5.0) {
        let z = C::new(re, im);
        prop_assume!(distance_to_integer(z) > 1e-3);
        let lhs = complex_gamma(z).unwrap() * complex_gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn gamma_recurrence(re in -6.0f64..10.0, im in -6.0f64..6.0) {
        let z = C::new(re, im);
        prop_assume!(distance_to_integer(z) > 1e-3);
        let g = complex_gamma(z).unwrap();
        let g1 = complex_gamma(z + 1.0).unwrap();
        prop_assert!((g1 - z * g).norm() < 1e-12 * g1.norm());
    }

    #[test]
    fn pt_symmetry_of_potential(v0 in v0_strategy(), n in 1u32..8, t in 0.0f64..1.0) {
        let spec = PotentialSpec::new(4.0, v0, n).unwrap();
        let l = spec.length();
        let x = -1.0 + (l + 2.0) * t;
        let a = spec.potential_value(x);
        let b = spec.potential_value(l - x).conj();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn regime_form_matches_lattice(v0 in v0_strategy(), x in 0.0f64..20.0) {
        let spec = PotentialSpec::new(4.0, v0, 7).unwrap();
        prop_assert!((spec.rewritten_value(x) - spec.lattice_value(x)).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian_is_constant(v0 in v0_strategy(), n in 1u32..5, e in 4.2f64..30.0) {
        let spec = PotentialSpec::new(4.0, v0, n).unwrap();
        let basis = build_basis(&spec, e).unwrap();
        let w0 = basis.wronskian(0.0).unwrap();
        for i in 1..=8 {
            let w = basis.wronskian(spec.length() * i as f64 / 8.0).unwrap();
            prop_assert!((w - w0).norm() < 1e-9 * w0.norm());
        }
    }

    #[test]
    fn generalized_unitarity(v0 in v0_strategy(), n in 1u32..6, e in 4.05f64..40.0) {
        let r = scatter(&PotentialSpec::new(4.0, v0, n).unwrap(), e).unwrap();
        prop_assume!(!r.singular);
        prop_assert!(r.unitarity_residual < 1e-8 * (1.0 + r.t2()));
    }

    #[test]
    fn transmission_is_reciprocal(v0 in v0_strategy(), n in 1u32..6, e in 4.05f64..40.0) {
        let r = scatter(&PotentialSpec::new(4.0, v0, n).unwrap(), e).unwrap();
        prop_assume!(!r.singular);
        prop_assert!((r.t - r.t_right).norm() < 1e-9 * (1.0 + r.t.norm()));
    }

    #[test]
    fn hermitian_flux(n in 1u32..10, e in 4.05f64..40.0) {
        let r = scatter(&PotentialSpec::new(4.0, 0.0, n).unwrap(), e).unwrap();
        prop_assert!((r.t2() + r.rl2() - 1.0).abs() < 1e-10);
        prop_assert!((r.r_left - r.r_right).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn analytic_matches_oracle(v0 in v0_strategy(), n in 1u32..4, e in 4.1f64..30.0) {
        let spec = PotentialSpec::new(4.0, v0, n).unwrap();
        let r = scatter(&spec, e).unwrap();
        prop_assume!(!r.singular);
        let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
        let left = oracle_scatter(&spec, e, Side::Left, &cfg).unwrap();
        let right = oracle_scatter(&spec, e, Side::Right, &cfg).unwrap();
        let scale = 1.0 + r.t.norm();
        prop_assert!((r.t - left.t).norm() < 1e-6 * scale);
        prop_assert!((r.r_left - left.r).norm() < 1e-6 * scale);
        prop_assert!((r.r_right - right.r).norm() < 1e-6 * scale);
    }
}

#[test]
fn single_precision_tracks_double() {
    let s32 = PotentialSpec::<f32>::new(4.0, 0.3, 1).unwrap();
    let s64 = PotentialSpec::<f64>::new(4.0, 0.3, 1).unwrap();
    let a = scatter(&s32, 6.5).unwrap();
    let b = scatter(&s64, 6.5).unwrap();
    assert!(((a.t2() as f64) - b.t2()).abs() < 1e-3);
    assert!(((a.rr2() as f64) - b.rr2()).abs() < 1e-3);
}
