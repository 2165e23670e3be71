use std::f64::consts::PI;

use minann::analysis::{conformality_residual, hopf_summary, read_surface, write_surface};
use minann::boundary::{boundary_relations_residual, LocalExpansion};
use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::domain::{circle_contour_integral, AnnulusSpec};
use minann::spectral::{classify, laurent_extract, LaurentPolynomial, Verdict};
use minann::weierstrass::WeierstrassData;
use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn axis_angle() -> impl Strategy<Value = Rotation3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..2.0 * PI)
        .prop_filter("non-zero axis", |(x, y, z, _)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z, angle)| {
            Rotation3::from_scaled_axis(Vector3::new(x, y, z).normalize() * angle)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laurent_extraction_recovers_polynomials(
        coeffs in prop::collection::vec(complex(), 1..9),
        k_min in -4i64..=0,
        outer in 1.2..3.0f64,
    ) {
        let spec = AnnulusSpec::symmetric(outer).unwrap();
        let p = LaurentPolynomial::new(k_min, coeffs);
        let got = laurent_extract(|z| p.eval(z), &spec, k_min - 2..=p.k_max() + 2).unwrap();
        for k in k_min - 2..=p.k_max() + 2 {
            prop_assert!((got.coeff(k) - p.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn trapezoid_rule_integrates_monomials_exactly(k in -6i32..=6, rho in 0.3..3.0f64) {
        let value = circle_contour_integral(rho, 32, |z| z.powi(k)).unwrap();
        let expected = if k == -1 { Complex64::new(0.0, 2.0 * PI) } else { Complex64::new(0.0, 0.0) };
        prop_assert!((value - expected).norm() < 1e-12 * rho.powi(k + 1).max(1.0));
    }

    #[test]
    fn weierstrass_height_identity(
        m in prop_oneof![-3i32..=-1, 1i32..=3],
        modulus in 0.2..3.0f64,
        arg in -PI..PI,
        height in 0.1..3.0f64,
        theta0 in -PI..PI,
        z in (0.3..3.0f64, -PI..PI),
    ) {
        let c = Complex64::from_polar(modulus, arg);
        let d = WeierstrassData::monomial(c, m, height, theta0).unwrap();
        let z = Complex64::from_polar(z.0, z.1);
        let gz = c * f64::from(m) * z.powi(m - 1);
        let value = d.f(z).unwrap() * gz * z * z;
        prop_assert!((value - Complex64::from_polar(height / 2.0, theta0)).norm() < 1e-12 * height);
    }

    #[test]
    fn relations_ignore_the_sign_of_the_expansion(
        a in prop::array::uniform4(complex()),
        r in 1.1..4.0f64,
        height in 0.1..1.0f64,
        theta0 in -PI..PI,
    ) {
        prop_assume!(a[0].norm() > 1e-3 && a[0].re.abs() > 1e-9);
        let e = LocalExpansion::from_coefficients(r, a);
        let flipped = LocalExpansion::from_coefficients(r, a.map(|c| -c));
        let x = boundary_relations_residual(&e, height, theta0);
        let y = boundary_relations_residual(&flipped, height, theta0 + PI);
        for (u, v) in [(x.res5, y.res5), (x.res8, y.res8), (x.res10, y.res10)] {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rigid_motions_preserve_the_catenoid(rot in axis_angle()) {
        let p = solve_catenoid_params(1e-13).unwrap();
        let s = catenoid_grid(&p, 32, 128).unwrap();
        let moved = s.transformed(rot.into_inner(), Vector3::zeros());
        prop_assert!(conformality_residual(&moved).unwrap() < 1e-12);
        let (h0, h1) = (hopf_summary(&s).unwrap(), hopf_summary(&moved).unwrap());
        prop_assert!((h0.mean[0] - h1.mean[0]).abs() < 1e-12);
        let report = classify(&moved, None, None).unwrap();
        prop_assert_eq!(report.verdict, Verdict::CriticalCatenoid);
    }

    #[test]
    fn surface_files_round_trip_exactly(rot in axis_angle(), n_r in 4usize..12, log_n in 3u32..7) {
        let p = solve_catenoid_params(1e-13).unwrap();
        let s = catenoid_grid(&p, n_r, 1 << log_n)
            .unwrap()
            .transformed(rot.into_inner(), Vector3::zeros());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        write_surface(&s, &path).unwrap();
        let back = read_surface(&path).unwrap();
        prop_assert_eq!(back.values(), s.values());
        prop_assert_eq!(back.grid().n_r, n_r);
    }
}
