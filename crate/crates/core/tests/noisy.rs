use std::f64::consts::PI;

use minann::analysis::SurfaceGrid;
use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::spectral::{classify, Verdict, NUMERIC_TOLERANCE};

/// Sampled critical catenoid with a smooth relative perturbation of size `eps`
/// built from a few low Fourier modes in θ and a slow variation in ln r.
fn perturbed_catenoid(eps: f64) -> SurfaceGrid {
    let p = solve_catenoid_params(1e-13).unwrap();
    let exact = catenoid_grid(&p, 129, 128).unwrap();
    let grid = *exact.grid();
    let values = exact
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (j, k) = (i / grid.n_theta, i % grid.n_theta);
            let u = grid.radius(j).ln() / p.t;
            let th = 2.0 * PI * k as f64 / grid.n_theta as f64;
            let bump = 0.5 * (2.0 * th).cos() + 0.3 * (3.0 * th + 0.4).sin() * u + 0.2 * u * u;
            v * (1.0 + eps * bump)
        })
        .collect();
    SurfaceGrid::from_values(grid, values).unwrap()
}

#[test]
fn smoothly_perturbed_catenoid_is_recognized_at_default_tolerance() {
    let report = classify(&perturbed_catenoid(1e-4), None, None).unwrap();
    assert_eq!(report.tolerance, NUMERIC_TOLERANCE);
    assert_eq!(report.verdict, Verdict::CriticalCatenoid, "{report:?}");
}

#[test]
fn larger_perturbation_breaks_harmonicity() {
    // The bump is not harmonic, so the Laplacian sees it amplified by the
    // squared mode numbers: about 50 times its relative size.
    let report = classify(&perturbed_catenoid(1e-3), None, None).unwrap();
    assert_ne!(report.verdict, Verdict::CriticalCatenoid);
    assert_eq!(report.failed_stage.as_deref(), Some("preconditions"));
    let h = report.stages.harmonicity.unwrap();
    assert!(h > NUMERIC_TOLERANCE && h < 0.1, "{h}");
}

#[test]
fn gross_perturbation_is_rejected() {
    let report = classify(&perturbed_catenoid(1e-1), None, None).unwrap();
    assert_ne!(report.verdict, Verdict::CriticalCatenoid, "{report:?}");
}
