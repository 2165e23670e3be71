//! The critical catenoid: the rotationally symmetric free boundary minimal
//! annulus in the unit ball.
//!
//! On `r₂⁻¹ ≤ |z| ≤ r₂` it is `U(re^{iθ}) = (a cosh(ln r) cos θ,
//! a cosh(ln r) sin θ, a ln r)`, where `r₂² + 1 = (r₂² − 1) ln r₂` and
//! `a = 2r₂ / ((r₂² + 1) ln r₂)`. With `t = ln r₂` the first relation reads
//! `t tanh t = 1`, which is what the solver brackets.

use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{AnalyticSurface, FundamentalForms, Partials, SurfaceGrid};
use crate::domain::{make_grid, AnnulusSpec};
use crate::error::{Error, Result};

/// Solved constants of the critical catenoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidParams {
    /// `ln r₂`, half the conformal modulus.
    pub t: f64,
    pub r2: f64,
    /// Scale of the closed form.
    pub a: f64,
    /// The constant `A` of the rigid second form `N = A`; equals `a`.
    #[serde(rename = "A")]
    pub height: f64,
    /// `|r₂² + 1 − (r₂² − 1) ln r₂|` at the returned root.
    pub residual: f64,
}

/// Bracket for `t = ln r₂`, corresponding to `r₂ ∈ [2, 5]`.
const BRACKET: (f64, f64) = (std::f64::consts::LN_2, 1.609_437_912_434_100_3);

fn modulus_equation(t: f64) -> f64 {
    t * t.tanh() - 1.0
}

/// Residual of the defining relation in the `r₂` variable.
pub fn radius_relation(r2: f64) -> f64 {
    r2 * r2 + 1.0 - (r2 * r2 - 1.0) * r2.ln()
}

/// Solve for the critical catenoid by bisection on `t tanh t = 1`.
///
/// `tol` bounds the residual of `r₂² + 1 = (r₂² − 1) ln r₂` and must lie in
/// `(0, 1e-6)`.
pub fn solve_catenoid_params(tol: f64) -> Result<CatenoidParams> {
    if !(tol > 0.0 && tol < 1e-6) {
        return Err(Error::Parameter(format!(
            "tol must lie in (0, 1e-6), got {tol}"
        )));
    }
    let (mut lo, mut hi) = BRACKET;
    debug_assert!(modulus_equation(lo) < 0.0 && modulus_equation(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modulus_equation(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if modulus_equation(lo).abs() <= modulus_equation(hi).abs() {
        lo
    } else {
        hi
    };
    let r2 = t.exp();
    let residual = radius_relation(r2).abs();
    if residual > tol {
        return Err(Error::Resolution(format!(
            "bisection stalled at residual {residual:e} > tol {tol:e}"
        )));
    }
    let a = 2.0 * r2 / ((r2 * r2 + 1.0) * r2.ln());
    Ok(CatenoidParams {
        t,
        r2,
        a,
        height: a,
        residual,
    })
}

impl CatenoidParams {
    /// The domain `r₂⁻¹ ≤ |z| ≤ r₂`.
    pub fn annulus(&self) -> AnnulusSpec {
        AnnulusSpec::symmetric(self.r2).expect("r₂ > 1")
    }

    /// `a²(cosh²t + t²) − 1`; zero when the boundary lies on the unit sphere.
    pub fn sphere_defect(&self) -> f64 {
        self.a * self.a * (self.t.cosh().powi(2) + self.t * self.t) - 1.0
    }

    pub fn surface(&self) -> Catenoid {
        Catenoid { params: *self }
    }
}

/// The closed-form catenoid as an [`AnalyticSurface`].
#[derive(Debug, Clone, Copy)]
pub struct Catenoid {
    pub params: CatenoidParams,
}

impl AnalyticSurface for Catenoid {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64> {
        let a = self.params.a;
        let u = r.ln();
        let (s, c) = theta.sin_cos();
        Vector3::new(a * u.cosh() * c, a * u.cosh() * s, a * u)
    }

    fn partials(&self, r: f64, theta: f64) -> Partials {
        let a = self.params.a;
        let u = r.ln();
        let (sh, ch) = (u.sinh(), u.cosh());
        let (s, c) = theta.sin_cos();
        let u_u = Vector3::new(a * sh * c, a * sh * s, a);
        let u_uu = Vector3::new(a * ch * c, a * ch * s, 0.0);
        Partials {
            u_r: u_u / r,
            u_theta: Vector3::new(-a * ch * s, a * ch * c, 0.0),
            u_rr: (u_uu - u_u) / (r * r),
            u_rtheta: Vector3::new(-a * sh * s, a * sh * c, 0.0) / r,
            u_thetatheta: Vector3::new(-a * ch * c, -a * ch * s, 0.0),
        }
    }
}

/// The closed-form immersion at `z`; errors outside `r₂⁻¹ ≤ |z| ≤ r₂`.
pub fn catenoid_immersion(p: &CatenoidParams, z: Complex64) -> Result<Vector3<f64>> {
    let (r, theta) = z.to_polar();
    p.annulus().check_radius(r)?;
    Ok(p.surface().position(r, theta))
}

/// Closed-form fundamental forms at radius `r`, normal oriented so `N > 0`.
pub fn catenoid_forms(p: &CatenoidParams, r: f64) -> Result<FundamentalForms> {
    p.annulus().check_radius(r)?;
    let a = p.a;
    let u = r.ln();
    let ch2 = u.cosh().powi(2);
    let lambda = a * a * ch2 / (r * r);
    Ok(FundamentalForms {
        lambda,
        e: lambda,
        f: 0.0,
        g: a * a * ch2,
        l: -a / (r * r),
        m: 0.0,
        n: a,
        // at θ = 0
        normal: Vector3::new(-1.0, 0.0, u.sinh()) / u.cosh(),
    })
}

/// Analytic-mode grid of the critical catenoid.
pub fn catenoid_grid(p: &CatenoidParams, n_r: usize, n_theta: usize) -> Result<SurfaceGrid> {
    let grid = make_grid(p.annulus(), n_r, n_theta)?;
    SurfaceGrid::from_analytic(grid, Arc::new(p.surface()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CatenoidParams {
        solve_catenoid_params(1e-12).unwrap()
    }

    #[test]
    fn tolerance_is_validated() {
        assert!(solve_catenoid_params(0.0).is_err());
        assert!(solve_catenoid_params(1e-3).is_err());
    }

    #[test]
    fn immersion_at_unit_point() {
        let p = params();
        let x = catenoid_immersion(&p, Complex64::new(1.0, 0.0)).unwrap();
        assert!((x - Vector3::new(p.a, 0.0, 0.0)).norm() < 1e-15);
        let y = catenoid_immersion(&p, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2))
            .unwrap();
        assert!((y - Vector3::new(0.0, p.a, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn outer_point_is_on_the_sphere() {
        let p = params();
        let x = catenoid_immersion(&p, Complex64::new(p.r2, 0.0)).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn immersion_rejects_points_outside() {
        let p = params();
        let err = catenoid_immersion(&p, Complex64::new(2.0 * p.r2, 0.0));
        assert!(matches!(err, Err(Error::Domain(_))));
        assert!(matches!(catenoid_forms(&p, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn forms_at_waist() {
        let p = params();
        let f = catenoid_forms(&p, 1.0).unwrap();
        assert!((f.e - p.a * p.a).abs() < 1e-15);
        assert!((f.g - p.a * p.a).abs() < 1e-15);
        assert!((f.l + p.a).abs() < 1e-15);
        assert!((f.n - p.a).abs() < 1e-15);
    }

    #[test]
    fn forms_are_minimal_with_constant_hopf_combination() {
        let p = params();
        for i in 0..=20 {
            let r = (-p.t + 2.0 * p.t * i as f64 / 20.0).exp();
            let f = catenoid_forms(&p, r).unwrap();
            assert!(f.minimality().abs() < 1e-14);
            assert!((r * r * f.l - f.n + 2.0 * p.a).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_partials_match_central_differences() {
        let c = params().surface();
        let (r, t) = (1.7, 0.6);
        let h = 1e-5;
        let p = c.partials(r, t);
        let fd_r = (c.position(r + h, t) - c.position(r - h, t)) / (2.0 * h);
        let fd_t = (c.position(r, t + h) - c.position(r, t - h)) / (2.0 * h);
        let fd_rr =
            (c.position(r + h, t) - 2.0 * c.position(r, t) + c.position(r - h, t)) / (h * h);
        let fd_rt = (c.partials(r, t + h).u_r - c.partials(r, t - h).u_r) / (2.0 * h);
        assert!((p.u_r - fd_r).norm() < 1e-9);
        assert!((p.u_theta - fd_t).norm() < 1e-9);
        assert!((p.u_rr - fd_rr).norm() < 1e-4);
        assert!((p.u_rtheta - fd_rt).norm() < 1e-9);
    }
}
