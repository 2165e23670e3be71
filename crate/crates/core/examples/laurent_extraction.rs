// Recover Laurent coefficients on an annulus by FFT on a circle.

use minann::domain::AnnulusSpec;
use minann::spectral::{laurent_extract, laurent_extract_boundary, LaurentPolynomial};
use num_complex::Complex64;

pub fn run_example() -> minann::Result<()> {
    let spec = AnnulusSpec::symmetric(2.0)?;
    let p = LaurentPolynomial::new(
        -2,
        vec![
            Complex64::new(0.25, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.5),
        ],
    );
    let got = laurent_extract(|z| p.eval(z), &spec, -4..=4)?;
    let err = (-4..=4)
        .map(|k| (got.coeff(k) - p.coeff(k)).norm())
        .fold(0.0, f64::max);
    println!("finite Laurent polynomial: max coefficient error {err:.1e}");

    // An infinite series: 1/(z − 3) is analytic on 1/2 ≤ |z| ≤ 2.
    let series = laurent_extract_boundary(|z| 1.0 / (z - 3.0), &spec, 1e-14)?;
    println!(
        "1/(z − 3): {} coefficients, tail {:.1e}, c0 = {:.15}",
        series.k_max() - series.k_min() + 1,
        series.tail,
        series.coeff(0).re
    );
    Ok(())
}

fn main() -> minann::Result<()> {
    run_example()
}
