// Solve for the critical catenoid and print its constants.
//
// ```text
// cargo run --example catenoid_params
// ```

use minann::catenoid::{radius_relation, solve_catenoid_params};

pub fn run_example() -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    println!("t        = {:.12}", p.t);
    println!("r2 = e^t = {:.12}", p.r2);
    println!("a        = {:.12}", p.a);
    println!("a^2 (cosh^2 t + t^2) - 1 = {:e}", p.sphere_defect());
    println!("radius relation at r2    = {:e}", radius_relation(p.r2));

    let rim = p.t.tanh();
    println!("outer rim: radius {rim:.8}, height {:.8}", p.a * p.t);
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
