//! Property-based invariants over randomized inputs.

use num_complex::Complex;
use poincare_core::linalg::Mat2;
use poincare_core::mackey_finite::exact::RootPhase;
use poincare_core::minkowski::{
    covering_map, from_hermitian, minkowski_dot, to_hermitian, FourVector, SL2C,
};
use poincare_core::orbits::{massless_little_group_compose, massless_little_group_decompose};
use proptest::prelude::*;

fn sl2c_strategy() -> impl Strategy<Value = SL2C<f64>> {
    // exponential of a traceless matrix with bounded entries
    (
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(ar, ai, br, bi, cr, ci)| {
            let a = Complex::new(ar, ai);
            SL2C::from_traceless_exp(&Mat2::new(
                a,
                Complex::new(br, bi),
                Complex::new(cr, ci),
                -a,
            ))
        })
}

fn four_vector_strategy() -> impl Strategy<Value = FourVector<f64>> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
        .prop_map(|(t, x, y, z)| FourVector::new(t, x, y, z))
}

proptest! {
    #[test]
    fn covering_map_is_a_homomorphism(a in sl2c_strategy(), b in sl2c_strategy()) {
        let lhs = covering_map(&(a * b));
        let rhs = covering_map(&a).compose(&covering_map(&b));
        prop_assert!(lhs.relative_diff(&rhs) < 1e-12);
        prop_assert!(lhs.restricted_residual() < 1e-11);
    }

    #[test]
    fn hermitian_encoding_roundtrips(x in four_vector_strategy()) {
        let m = to_hermitian(&x);
        let back = from_hermitian(&m, 1e-10).unwrap();
        prop_assert!(x.max_abs_diff(&back) < 1e-13);
        let d: Complex<f64> = m.det();
        prop_assert!((d.re - minkowski_dot(&x, &x)).abs() < 1e-11);
        prop_assert!(d.im.abs() < 1e-12);
    }

    #[test]
    fn little_group_chart_roundtrips(ar in -2.0..2.0f64, ai in -2.0..2.0f64, phi in -3.0..3.0f64) {
        let a = Complex::new(ar, ai);
        let u = massless_little_group_compose(a, phi);
        let (a2, phi2) = massless_little_group_decompose(&u).unwrap();
        prop_assert!((a - a2).norm() < 1e-12);
        let winding = (phi - phi2) / (4.0 * std::f64::consts::PI);
        prop_assert!((winding - winding.round()).abs() < 1e-12);
    }

    #[test]
    fn root_phases_form_a_group(n1 in 1i64..24, d1 in 1u64..24, n2 in 1i64..24, d2 in 1u64..24) {
        let p = RootPhase::new(n1, d1);
        let q = RootPhase::new(n2, d2);
        // associativity with a third element and inverse law, exactly
        let r = RootPhase::new(5, 12);
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&p.conj()), RootPhase::one());
        // values multiply
        let lhs: Complex<f64> = p.mul(&q).value();
        let rhs = p.value::<f64>() * q.value::<f64>();
        prop_assert!((lhs - rhs).norm() < 1e-14);
    }
}
