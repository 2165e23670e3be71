// Boundary geometry of the critical catenoid: planar circles meeting the
// sphere orthogonally, and the boundary relations at a rim point.

use minann::boundary::{
    boundary_relations_residual, fit_plane_circle, free_boundary_residual, local_expansion,
    torsion_profile, BoundaryCurve, Rim,
};
use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::weierstrass::WeierstrassData;
use num_complex::Complex64;

pub fn run_example() -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    let s = catenoid_grid(&p, 32, 256)?;
    let fb = free_boundary_residual(&s)?;
    println!(
        "sphere {:.1e}, orthogonality {:.1e}",
        fb.sphere_residual, fb.orthogonality_residual
    );

    for rim in [Rim::Outer, Rim::Inner] {
        let c = BoundaryCurve::from_surface(&s, rim)?;
        let tau = torsion_profile(&c);
        let fit = fit_plane_circle(&c)?;
        let [x, y, z] = fit.center;
        println!(
            "{rim:?}: max|τ| {:.1e}, radius {:.8}, center ({x:.1e}, {y:.1e}, {z:.8}), \
             radius² + |center|² = {:.12}",
            tau.max_abs,
            fit.radius,
            fit.radius * fit.radius + fit.center().norm_squared()
        );
    }

    // The Gauss map of U_r × U_θ on the catenoid is g = −z.
    let d = WeierstrassData::monomial(Complex64::new(-1.0, 0.0), 1, p.a, 0.0)?;
    let e = local_expansion(&d, Complex64::new(p.t, 0.0))?;
    println!("a1 = {:.10}, a2 = {:.10} (R = {:.10})", e.a1, e.a2, p.r2);
    let rel = boundary_relations_residual(&e, p.a, 0.0);
    println!(
        "res5 {:.1e}, res8 {:.1e}, res10 {:.1e}, reality {:.1e}",
        rel.res5, rel.res8, rel.res10, rel.res_reality
    );
    println!(
        "A forced by the relations: {:.12} (a = {:.12})",
        rel.implied_height, p.a
    );
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
