// Residual suite on the critical catenoid, analytic and sampled.
//
// The sampled grid has only positions, so derivatives come from finite
// differences in `ln r` and FFTs in `θ`; the residuals shrink as the radial
// grid is refined.

use minann::analysis::{analyze, gauss_equation_residual, SurfaceGrid};
use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::domain::make_grid;

pub fn run_example() -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    let s = catenoid_grid(&p, 64, 256)?;
    let r = analyze(&s)?;
    println!("analytic 64x256");
    println!("  conformality {:.2e}", r.conformality);
    println!("  harmonicity  {:.2e}", r.harmonicity);
    println!(
        "  Hopf value   {:.9} (4a^2 = {:.9})",
        r.hopf_value[0],
        4.0 * p.a * p.a
    );
    println!("  Gauss eq.    {:.2e}", gauss_equation_residual(&s, p.a)?);

    let surface = p.surface();
    println!("sampled, n_theta = 128");
    for n_r in [17, 33, 65, 129] {
        let grid = make_grid(p.annulus(), n_r, 128)?;
        let s = SurfaceGrid::sample(grid, |r, t| {
            use minann::analysis::AnalyticSurface;
            surface.position(r, t)
        })?;
        let r = analyze(&s)?;
        println!(
            "  n_r = {n_r:3}: conformality {:.2e}, harmonicity {:.2e}, A = {:.9}",
            r.conformality, r.harmonicity, r.height
        );
    }
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
