// Integrate the Weierstrass data `g = z`, `A = a`, `θ₀ = 0` and compare
// with the closed-form catenoid.

use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::weierstrass::{
    integrate_immersion, metric_lambda, path_integral, periods, Base, PathOrder, WeierstrassData,
};
use nalgebra::Matrix3;
use num_complex::Complex64;

pub fn run_example() -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    let d = WeierstrassData::monomial(Complex64::new(1.0, 0.0), 1, p.a, 0.0)?;

    let rep = periods(&d, 256)?;
    for (name, w) in ["X", "Y", "Z"].iter().zip(rep.periods) {
        println!("period of {name}: {:+.3e} {:+.6}i", w.re, w.im);
    }

    let reference = catenoid_grid(&p, 32, 128)?;
    let s = integrate_immersion(&d, *reference.grid(), Base::Centered)?;
    // g = z yields the catenoid turned by π about the vertical axis.
    let half_turn = Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
    let distance = reference
        .values()
        .iter()
        .zip(s.values())
        .map(|(u, w)| (u - half_turn * w).norm())
        .fold(0.0, f64::max);
    println!("max distance to the catenoid: {distance:.2e}");

    let (from, to) = (Complex64::new(0.5, 0.0), Complex64::from_polar(2.5, 2.0));
    let a = path_integral(&d, from, to, PathOrder::RadialFirst)?;
    let b = path_integral(&d, from, to, PathOrder::AngularFirst)?;
    println!("path independence: {:.2e}", (a - b).norm());
    println!(
        "λ(1) = {:.12} (a² = {:.12})",
        metric_lambda(&d, Complex64::new(1.0, 0.0))?,
        p.a * p.a
    );
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
