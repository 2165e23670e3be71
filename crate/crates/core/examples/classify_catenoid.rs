// Run the classification on the catenoid, a rotated copy, the `g = z²`
// annulus and a flat annulus.

use std::sync::Arc;

use minann::analysis::{PlanarAnnulus, SurfaceGrid};
use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::domain::{make_grid, AnnulusSpec};
use minann::spectral::{classify, ClassificationReport};
use minann::weierstrass::{integrate_immersion, Base, WeierstrassData};
use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;

fn show(name: &str, r: &ClassificationReport) {
    println!(
        "{name:10} {:20} stage {:?}",
        r.verdict.as_str(),
        r.failed_stage
    );
}

pub fn run_example() -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    let s = catenoid_grid(&p, 64, 256)?;
    let r = classify(&s, None, None)?;
    show("catenoid", &r);
    println!(
        "           m = {:?}, |c| = {:.12}, A = {:.12}, reconstruction {:.1e}",
        r.m,
        r.c.map_or(f64::NAN, |c| c.norm()),
        r.height.unwrap_or(f64::NAN),
        r.stages.reconstruction.unwrap_or(f64::NAN)
    );

    let rot = Rotation3::from_euler_angles(0.4, -1.2, 2.5).into_inner();
    show(
        "rotated",
        &classify(&s.transformed(rot, Vector3::zeros()), None, None)?,
    );

    let d = WeierstrassData::monomial(Complex64::new(1.0, 0.0), 2, 4.0 * p.a, 0.0)?;
    let grid = make_grid(AnnulusSpec::symmetric(p.r2.sqrt())?, 32, 128)?;
    show(
        "g = z^2",
        &classify(&integrate_immersion(&d, grid, Base::Centered)?, None, None)?,
    );

    let grid = make_grid(AnnulusSpec::symmetric(2.0)?, 17, 64)?;
    let flat = SurfaceGrid::from_analytic(grid, Arc::new(PlanarAnnulus { scale: 0.5 }))?;
    show("flat", &classify(&flat, None, None)?);
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
