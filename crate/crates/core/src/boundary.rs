//! Boundary behaviour of a free boundary annulus: the orthogonality
//! condition, torsion and planarity of the boundary curves, and the local
//! power-series relations satisfied by the Gauss map at a boundary point.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{forms_field, spectral_rows, SurfaceGrid};
use crate::domain::circle_samples;
use crate::error::{Error, Result};
use crate::numerics::{fourier_modes, PeriodicDifferentiator};
use crate::weierstrass::WeierstrassData;

/// Cross products of the curve derivatives below this mark a locally
/// straight sample.
pub const STRAIGHTNESS_THRESHOLD: f64 = 1e-12;

/// Which boundary circle of the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rim {
    Outer,
    Inner,
}

impl Rim {
    pub fn row(&self, s: &SurfaceGrid) -> usize {
        match self {
            Rim::Outer => s.grid().outer_row(),
            Rim::Inner => 0,
        }
    }
}

/// Sphere and orthogonality residuals of one boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RimResidual {
    pub sphere: f64,
    pub orthogonality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryResidual {
    /// `max ||U| − 1|` over both boundary rows.
    pub sphere_residual: f64,
    /// `max |U_r × U| / (|U_r||U|)` over both boundary rows.
    pub orthogonality_residual: f64,
    pub outer: RimResidual,
    pub inner: RimResidual,
}

fn rim_residual(s: &SurfaceGrid, rim: Rim) -> Result<RimResidual> {
    let j = rim.row(s);
    let partials = s.row_partials(j)?;
    let mut out = RimResidual {
        sphere: 0.0,
        orthogonality: 0.0,
    };
    for (u, p) in s.row(j).iter().zip(&partials) {
        let (nu, nr) = (u.norm(), p.u_r.norm());
        if nu < 1e-14 || nr < 1e-14 {
            return Err(Error::Degenerate(format!(
                "boundary sample with |U| = {nu:e}, |U_r| = {nr:e}"
            )));
        }
        out.sphere = out.sphere.max((nu - 1.0).abs());
        out.orthogonality = out.orthogonality.max(p.u_r.cross(u).norm() / (nr * nu));
    }
    Ok(out)
}

/// Check that both boundary circles lie on the unit sphere and meet it
/// orthogonally (`U_r ∥ U`).
pub fn free_boundary_residual(s: &SurfaceGrid) -> Result<FreeBoundaryResidual> {
    let outer = rim_residual(s, Rim::Outer)?;
    let inner = rim_residual(s, Rim::Inner)?;
    Ok(FreeBoundaryResidual {
        sphere_residual: outer.sphere.max(inner.sphere),
        orthogonality_residual: outer.orthogonality.max(inner.orthogonality),
        outer,
        inner,
    })
}

/// A closed boundary curve sampled at `θ_k = 2πk/n` with its θ-derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub which: Rim,
    pub theta: Vec<f64>,
    pub position: Vec<Vector3<f64>>,
    pub d1: Vec<Vector3<f64>>,
    pub d2: Vec<Vector3<f64>>,
    pub d3: Vec<Vector3<f64>>,
    /// `U_r` along the curve, when taken from a surface.
    pub radial: Option<Vec<Vector3<f64>>>,
}

fn uniform_thetas(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

impl BoundaryCurve {
    /// Curve from periodic samples; derivatives are spectral.
    pub fn from_samples(which: Rim, position: Vec<Vector3<f64>>) -> Result<Self> {
        let n = position.len();
        if n < 8 {
            return Err(Error::Parameter(format!(
                "curve needs ≥ 8 samples, got {n}"
            )));
        }
        let diff = PeriodicDifferentiator::new(n);
        let mut derivs = spectral_rows(&position, &diff, 3).into_iter();
        Ok(Self {
            which,
            theta: uniform_thetas(n),
            d1: derivs.next().unwrap_or_default(),
            d2: derivs.next().unwrap_or_default(),
            d3: derivs.next().unwrap_or_default(),
            position,
            radial: None,
        })
    }

    /// Curve with explicitly supplied derivatives.
    pub fn from_derivatives(
        which: Rim,
        theta: Vec<f64>,
        position: Vec<Vector3<f64>>,
        d1: Vec<Vector3<f64>>,
        d2: Vec<Vector3<f64>>,
        d3: Vec<Vector3<f64>>,
    ) -> Result<Self> {
        let n = theta.len();
        if [position.len(), d1.len(), d2.len(), d3.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::Parameter("curve sample counts differ".to_string()));
        }
        Ok(Self {
            which,
            theta,
            position,
            d1,
            d2,
            d3,
            radial: None,
        })
    }

    /// The boundary row of a surface.
    pub fn from_surface(s: &SurfaceGrid, which: Rim) -> Result<Self> {
        let j = which.row(s);
        let mut curve = Self::from_samples(which, s.row(j).to_vec())?;
        let partials = s.row_partials(j)?;
        if s.analytic().is_some() {
            curve.d1 = partials.iter().map(|p| p.u_theta).collect();
            curve.d2 = partials.iter().map(|p| p.u_thetatheta).collect();
        }
        curve.radial = Some(partials.iter().map(|p| p.u_r).collect());
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Apply `x ↦ linear·x + offset`.
    pub fn transformed(&self, linear: &Matrix3<f64>, offset: &Vector3<f64>) -> Self {
        let map = |v: &Vec<Vector3<f64>>| v.iter().map(|x| linear * x).collect::<Vec<_>>();
        Self {
            which: self.which,
            theta: self.theta.clone(),
            position: self.position.iter().map(|x| linear * x + offset).collect(),
            d1: map(&self.d1),
            d2: map(&self.d2),
            d3: map(&self.d3),
            radial: self.radial.as_ref().map(map),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionSample {
    pub theta: f64,
    /// `None` where the curve is locally straight.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionProfile {
    pub samples: Vec<TorsionSample>,
    /// Largest `|τ|` over the samples that are not flagged.
    pub max_abs: f64,
    /// Number of locally straight samples.
    pub flagged: usize,
}

/// `τ = det(U_θ, U_θθ, U_θθθ) / |U_θ × U_θθ|²` along the curve.
pub fn torsion_profile(c: &BoundaryCurve) -> TorsionProfile {
    let mut max_abs: f64 = 0.0;
    let mut flagged = 0;
    let samples = (0..c.len())
        .map(|i| {
            let cross = c.d1[i].cross(&c.d2[i]);
            let len2 = cross.norm_squared();
            let tau = if cross.norm() < STRAIGHTNESS_THRESHOLD {
                flagged += 1;
                None
            } else {
                let t = cross.dot(&c.d3[i]) / len2;
                max_abs = max_abs.max(t.abs());
                Some(t)
            };
            TorsionSample {
                theta: c.theta[i],
                tau,
            }
        })
        .collect();
    TorsionProfile {
        samples,
        max_abs,
        flagged,
    }
}

/// Least-squares plane and circle through a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: [f64; 3],
    pub radius: f64,
    /// Unit normal, oriented so the curve runs counterclockwise around it.
    pub normal: [f64; 3],
    /// Largest distance from a sample to the plane.
    pub planarity: f64,
    /// Largest `||proj − center| − radius|` over the samples.
    pub circularity: f64,
}

impl CircleFit {
    pub fn center(&self) -> Vector3<f64> {
        Vector3::from(self.center)
    }

    pub fn normal(&self) -> Vector3<f64> {
        Vector3::from(self.normal)
    }
}

/// Fit a plane (total least squares) and then a circle within it.
pub fn fit_plane_circle(c: &BoundaryCurve) -> Result<CircleFit> {
    fit_points(&c.position)
}

pub(crate) fn fit_points(points: &[Vector3<f64>]) -> Result<CircleFit> {
    let n = points.len();
    if n < 8 {
        return Err(Error::Fit(format!("circle fit needs ≥ 8 samples, got {n}")));
    }
    let centroid = points.iter().sum::<Vector3<f64>>() / n as f64;
    let cov = points
        .iter()
        .map(|p| (p - centroid) * (p - centroid).transpose())
        .sum::<Matrix3<f64>>()
        / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let largest = eig.eigenvalues[order[2]];
    if !(eig.eigenvalues[order[1]] > 1e-14 * largest.max(f64::MIN_POSITIVE)) {
        return Err(Error::Fit(
            "samples are collinear (rank-deficient covariance)".to_string(),
        ));
    }
    let mut normal: Vector3<f64> = eig.eigenvectors.column(order[0]).into_owned();
    let winding: f64 = (0..n)
        .map(|i| {
            (points[i] - centroid)
                .cross(&(points[(i + 1) % n] - centroid))
                .dot(&normal)
        })
        .sum();
    if winding < 0.0 {
        normal = -normal;
    }
    let e1: Vector3<f64> = eig.eigenvectors.column(order[2]).into_owned();
    let e2 = normal.cross(&e1);

    // Kåsa fit: x² + y² = 2αx + 2βy + γ
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    let planar: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = p - centroid;
            (d.dot(&e1), d.dot(&e2))
        })
        .collect();
    for &(x, y) in &planar {
        let row = Vector3::new(2.0 * x, 2.0 * y, 1.0);
        ata += row * row.transpose();
        atb += row * (x * x + y * y);
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Fit("singular circle normal equations".to_string()))?;
    let (alpha, beta) = (sol[0], sol[1]);
    let radius = (sol[2] + alpha * alpha + beta * beta).max(0.0).sqrt();
    let center = centroid + e1 * alpha + e2 * beta;
    let mut planarity: f64 = 0.0;
    let mut circularity: f64 = 0.0;
    for p in points {
        let off = (p - centroid).dot(&normal);
        planarity = planarity.max(off.abs());
        let proj = p - normal * off;
        circularity = circularity.max(((proj - center).norm() - radius).abs());
    }
    Ok(CircleFit {
        center: center.into(),
        radius,
        normal: normal.into(),
        planarity,
        circularity,
    })
}

/// `|∮_{outer} U ds + ∮_{inner} U ds|` with `ds = |U_θ| dθ`.
pub fn antipodality_check(s: &SurfaceGrid) -> Result<f64> {
    let n = s.grid().n_theta;
    let weight = 2.0 * PI / n as f64;
    let mut total = Vector3::zeros();
    for rim in [Rim::Outer, Rim::Inner] {
        let j = rim.row(s);
        let partials = s.row_partials(j)?;
        for (u, p) in s.row(j).iter().zip(&partials) {
            total += u * p.u_theta.norm() * weight;
        }
    }
    Ok(total.norm())
}

/// Largest `|M|` on the two boundary rows.
pub fn boundary_m_max(s: &SurfaceGrid) -> Result<f64> {
    let forms = forms_field(s)?;
    let grid = s.grid();
    Ok([0, grid.outer_row()]
        .iter()
        .flat_map(|&j| (0..grid.n_theta).map(move |k| grid.index(j, k)))
        .map(|i| forms[i].m.abs())
        .fold(0.0, f64::max))
}

/// Taylor coefficients of the normalized Gauss map `g̃(e^w)` about a
/// boundary point `w₀`, together with the normalizing rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub w0: Complex64,
    #[serde(rename = "R")]
    pub r: f64,
    /// `g̃(z₀)`; equals `R` after normalization.
    pub a0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
    /// `4a₂²/a₁² − 3a₃/a₁`.
    pub psi: Complex64,
    /// Ambient rotation realizing the normalization, row-major.
    pub rotation: [[f64; 3]; 3],
}

impl LocalExpansion {
    /// Expansion from given coefficients (no rotation).
    pub fn from_coefficients(r: f64, a: [Complex64; 4]) -> Self {
        Self {
            w0: Complex64::new(r.ln(), 0.0),
            r,
            a0: Complex64::new(r, 0.0),
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            psi: psi(a[0], a[1], a[2]),
            rotation: Matrix3::identity().into(),
        }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        Matrix3::from(self.rotation)
    }
}

fn psi(a1: Complex64, a2: Complex64, a3: Complex64) -> Complex64 {
    4.0 * a2 * a2 / (a1 * a1) - 3.0 * a3 / a1
}

/// Radius of the Cauchy circle in the `w = ln z` chart.
pub const CAUCHY_RADIUS: f64 = 0.1;
/// Relative tolerance for `|g̃(z₀)| = R`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn rotation_z(alpha: f64) -> Matrix3<f64> {
    let (s, c) = alpha.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Expand the Gauss map of `d` about `w₀ = ln R + iθ₁`.
///
/// The ambient frame is first rotated so that `g̃(z₀) = R` is real:
/// either `g̃ = e^{iα} g` (rotation about `Z` by `α`) or `g̃ = e^{iα}/g`
/// (the half turn about `X` followed by that rotation), whichever matches
/// `|g̃(z₀)| = R`; `R = e^{|Re w₀|}`.
pub fn local_expansion(d: &WeierstrassData, w0: Complex64) -> Result<LocalExpansion> {
    let r = w0.re.abs().exp();
    let z0 = w0.exp();
    let (g0, _) = d.g.eval(z0);
    if g0.norm() == 0.0 || !g0.norm().is_finite() {
        return Err(Error::Normalization(format!(
            "g(z₀) = {g0} cannot be normalized"
        )));
    }
    let half_turn_x = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0);
    let (invert, alpha) = if ((g0.norm() - r) / r).abs() < NORMALIZATION_TOLERANCE {
        (false, -g0.arg())
    } else if ((1.0 / g0.norm() - r) / r).abs() < NORMALIZATION_TOLERANCE {
        (true, g0.arg())
    } else {
        return Err(Error::Normalization(format!(
            "|g(z₀)| = {} matches neither R = {r} nor 1/R",
            g0.norm()
        )));
    };
    let phase = Complex64::from_polar(1.0, alpha);
    let normalized = |w: Complex64| {
        let g = d.g.eval(w.exp()).0;
        if invert {
            phase / g
        } else {
            phase * g
        }
    };
    let n = 64;
    let nodes = circle_samples(CAUCHY_RADIUS, n)?;
    let values: Vec<Complex64> = nodes.iter().map(|&dw| normalized(w0 + dw)).collect();
    let modes = fourier_modes(&values);
    let a: Vec<Complex64> = (0..5)
        .map(|k| modes[k] / CAUCHY_RADIUS.powi(k as i32))
        .collect();
    if a[1].norm() == 0.0 {
        return Err(Error::Normalization("a₁ vanishes".to_string()));
    }
    let rotation = if invert {
        rotation_z(alpha) * half_turn_x
    } else {
        rotation_z(alpha)
    };
    Ok(LocalExpansion {
        w0,
        r,
        a0: a[0],
        a1: a[1],
        a2: a[2],
        a3: a[3],
        a4: a[4],
        psi: psi(a[1], a[2], a[3]),
        rotation: rotation.into(),
    })
}

/// Residuals of the boundary relations at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationResiduals {
    pub res5: f64,
    pub res8: f64,
    pub res10: f64,
    pub res_reality: f64,
    /// `2R(R² − 1)/(1 + R²)²`, the value of `A` the relations force.
    pub implied_height: f64,
}

/// Evaluate the three boundary relations and the reality conclusions.
///
/// With `κ = A e^{iθ₀}/a₁`, `S = a₂/a₁ + ā₂/ā₁` and `T = a₁ + ā₁`:
/// `res5 = |κ + 2(S(1+R²) − RT)/(1+R²)²|`,
/// `res8 = |κ + 2(S(1+R⁴) − R³T)/(1+R²)³|`,
/// `res10 = max(|κ − (R²−1)T/(R(1+R²)²)|, |S − T/(2R)|)`,
/// `res_reality = |Im a₁| + |Im a₂| + |Im Ψ|`.
///
/// The sign ambiguity `a₁ = ±|a₁|e^{iθ₀}` is resolved first: when
/// `Re a₁ < 0` all coefficients are negated and `θ₀` advances by `π`.
pub fn boundary_relations_residual(
    e: &LocalExpansion,
    height: f64,
    theta0: f64,
) -> RelationResiduals {
    let (sign, theta0) = if e.a1.re < 0.0 {
        (-1.0, theta0 + PI)
    } else {
        (1.0, theta0)
    };
    let (a1, a2, a3) = (e.a1 * sign, e.a2 * sign, e.a3 * sign);
    let r = e.r;
    let r2 = r * r;
    let kappa = Complex64::from_polar(height, theta0) / a1;
    let s = 2.0 * (a2 / a1).re;
    let t = 2.0 * a1.re;
    let res5 = (kappa + 2.0 * (s * (1.0 + r2) - r * t) / (1.0 + r2).powi(2)).norm();
    let res8 = (kappa + 2.0 * (s * (1.0 + r2 * r2) - r * r2 * t) / (1.0 + r2).powi(3)).norm();
    let res10 = (kappa - (r2 - 1.0) * t / (r * (1.0 + r2).powi(2)))
        .norm()
        .max((s - t / (2.0 * r)).abs());
    let res_reality = a1.im.abs() + a2.im.abs() + psi(a1, a2, a3).im.abs();
    RelationResiduals {
        res5,
        res8,
        res10,
        res_reality,
        implied_height: 2.0 * r * (r2 - 1.0) / (1.0 + r2).powi(2),
    }
}

/// Components of `U_θθθ` normal to the boundary tangent, in the frame of the
/// normalized boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThirdDerivativeCheck {
    pub max_x: f64,
    pub max_z: f64,
}

/// At each boundary sample, build the frame `e_y = U_θ/|U_θ|`,
/// `e_x = cos φ ν − sin φ μ`, `e_z = sin φ ν + cos φ μ` with `ν = U/|U|`,
/// `μ = ν × e_y`, `cos φ = 2R/(R²+1)`, and report `max |U_θθθ·e_x|` and
/// `max |U_θθθ·e_z|`.
pub fn third_derivative_check(c: &BoundaryCurve, r: f64) -> ThirdDerivativeCheck {
    let cos_phi = 2.0 * r / (r * r + 1.0);
    let sin_phi = (r * r - 1.0) / (r * r + 1.0);
    let mut out = ThirdDerivativeCheck {
        max_x: 0.0,
        max_z: 0.0,
    };
    for i in 0..c.len() {
        let ey = c.d1[i].normalize();
        let nu = c.position[i].normalize();
        let mu = nu.cross(&ey);
        let ex = nu * cos_phi - mu * sin_phi;
        let ez = nu * sin_phi + mu * cos_phi;
        out.max_x = out.max_x.max(c.d3[i].dot(&ex).abs());
        out.max_z = out.max_z.max(c.d3[i].dot(&ez).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PlanarAnnulus;
    use crate::catenoid::{catenoid_grid, solve_catenoid_params};
    use crate::domain::{make_grid, AnnulusSpec};
    use std::sync::Arc;

    fn circle_curve(n: usize, f: impl Fn(f64) -> Vector3<f64>) -> BoundaryCurve {
        let pts = uniform_thetas(n).into_iter().map(f).collect();
        BoundaryCurve::from_samples(Rim::Outer, pts).unwrap()
    }

    #[test]
    fn catenoid_is_free_boundary() {
        let p = solve_catenoid_params(1e-12).unwrap();
        let s = catenoid_grid(&p, 16, 64).unwrap();
        let fb = free_boundary_residual(&s).unwrap();
        assert!(fb.sphere_residual < 1e-10 && fb.orthogonality_residual < 1e-10);
        let scaled = s.transformed(Matrix3::identity() * 0.9, Vector3::zeros());
        let fb = free_boundary_residual(&scaled).unwrap();
        assert!((fb.sphere_residual - 0.1).abs() < 1e-10);
        assert!(boundary_m_max(&s).unwrap() < 1e-12);
    }

    #[test]
    fn flat_annulus_meets_sphere_only_on_outer_rim() {
        let r = 2.0;
        let grid = make_grid(AnnulusSpec::symmetric(r).unwrap(), 5, 32).unwrap();
        let s =
            SurfaceGrid::from_analytic(grid, Arc::new(PlanarAnnulus { scale: 1.0 / r })).unwrap();
        let fb = free_boundary_residual(&s).unwrap();
        assert!(fb.outer.sphere < 1e-15 && fb.outer.orthogonality < 1e-12);
        assert!((fb.inner.sphere - 0.75).abs() < 1e-12);
        assert!(antipodality_check(&s).unwrap() < 1e-12);
    }

    #[test]
    fn torsion_of_planar_and_twisted_curves() {
        let planar = circle_curve(64, |t| Vector3::new(t.cos(), t.sin(), 0.5));
        assert!(torsion_profile(&planar).max_abs < 1e-12);
        let twisted = circle_curve(64, |t| {
            Vector3::new(t.cos(), t.sin(), 0.3 * (2.0 * t).sin())
        });
        assert!(torsion_profile(&twisted).max_abs > 0.1);
        // helix with explicit derivatives: τ = c/(a² + c²)
        let (a, c) = (1.5, 0.4);
        let th: Vec<f64> = (0..16).map(|i| i as f64 * 0.3).collect();
        let helix = BoundaryCurve::from_derivatives(
            Rim::Outer,
            th.clone(),
            th.iter()
                .map(|t| Vector3::new(a * t.cos(), a * t.sin(), c * t))
                .collect(),
            th.iter()
                .map(|t| Vector3::new(-a * t.sin(), a * t.cos(), c))
                .collect(),
            th.iter()
                .map(|t| Vector3::new(-a * t.cos(), -a * t.sin(), 0.0))
                .collect(),
            th.iter()
                .map(|t| Vector3::new(a * t.sin(), -a * t.cos(), 0.0))
                .collect(),
        )
        .unwrap();
        let profile = torsion_profile(&helix);
        for s in &profile.samples {
            assert!((s.tau.unwrap() - c / (a * a + c * c)).abs() < 1e-14);
        }
    }

    #[test]
    fn straight_samples_are_flagged() {
        let th: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let line = |_: &f64| Vector3::new(1.0, 0.0, 0.0);
        let c = BoundaryCurve::from_derivatives(
            Rim::Inner,
            th.clone(),
            th.iter().map(|t| Vector3::new(*t, 0.0, 0.0)).collect(),
            th.iter().map(line).collect(),
            th.iter().map(|_| Vector3::zeros()).collect(),
            th.iter().map(|_| Vector3::zeros()).collect(),
        )
        .unwrap();
        let p = torsion_profile(&c);
        assert_eq!(p.flagged, 8);
        assert_eq!(p.max_abs, 0.0);
    }

    #[test]
    fn fits_of_circle_and_ellipse() {
        let circle = circle_curve(32, |t| {
            Vector3::new(1.0 + 2.0 * t.cos(), 2.0 * t.sin(), 0.3)
        });
        let fit = fit_plane_circle(&circle).unwrap();
        assert!((fit.radius - 2.0).abs() < 1e-12);
        assert!((fit.center() - Vector3::new(1.0, 0.0, 0.3)).norm() < 1e-12);
        assert!((fit.normal() - Vector3::z()).norm() < 1e-12);
        let ellipse = circle_curve(32, |t| Vector3::new(2.0 * t.cos(), t.sin(), 0.0));
        let fit = fit_plane_circle(&ellipse).unwrap();
        assert!(fit.planarity < 1e-12 && fit.circularity >= 0.4);
        let pts: Vec<Vector3<f64>> = (0..8).map(|i| Vector3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(fit_points(&pts), Err(Error::Fit(_))));
    }

    #[test]
    fn catenoid_relations_vanish() {
        let p = solve_catenoid_params(1e-12).unwrap();
        let r = p.r2;
        let c = |x: f64| Complex64::new(x, 0.0);
        let e = LocalExpansion::from_coefficients(r, [c(r), c(r / 2.0), c(r / 6.0), c(r / 24.0)]);
        assert!((e.psi - 0.5).norm() < 1e-15);
        let res = boundary_relations_residual(&e, p.a, 0.0);
        assert!(res.res5 < 1e-10 && res.res8 < 1e-10 && res.res10 < 1e-10);
        assert!(res.res_reality < 1e-15);
        assert!((res.implied_height - p.a).abs() < 1e-9);
    }

    #[test]
    fn relations_respond_linearly_to_a2() {
        let p = solve_catenoid_params(1e-12).unwrap();
        let r = p.r2;
        let c = |x: f64| Complex64::new(x, 0.0);
        let base = [c(r), c(r / 2.0), c(r / 6.0), c(r / 24.0)];

        let mut shifted = base;
        shifted[1] += 0.01;
        let res =
            boundary_relations_residual(&LocalExpansion::from_coefficients(r, shifted), p.a, 0.0);
        // S = 2 Re(a₂/a₁) moves by 0.02/R.
        let ds = 0.02 / r;
        assert!((res.res10 - ds).abs() < 1e-12);
        assert!((res.res5 - 2.0 * ds / (1.0 + r * r)).abs() < 1e-12);
        assert!(res.res_reality < 1e-15);

        let mut twisted = base;
        twisted[1] += Complex64::new(0.0, 0.01);
        let res =
            boundary_relations_residual(&LocalExpansion::from_coefficients(r, twisted), p.a, 0.0);
        // |Im a₂| = 0.01 and Im(4a₂²/a₁²) = 4·2·(R/2)·0.01/R².
        assert!((res.res_reality - (0.01 + 0.04 / r)).abs() < 1e-12);
    }

    #[test]
    fn expansion_of_identity_gauss_map() {
        let p = solve_catenoid_params(1e-12).unwrap();
        let d = WeierstrassData::monomial(Complex64::new(1.0, 0.0), 1, p.a, 0.0).unwrap();
        let e = local_expansion(&d, Complex64::new(p.t, 0.0)).unwrap();
        let r = p.r2;
        assert!((e.a1 - r).norm() < 1e-12);
        assert!((e.a2 - r / 2.0).norm() < 1e-12);
        assert!((e.a3 - r / 6.0).norm() < 1e-12);
        assert!((e.psi - 0.5).norm() < 1e-12);
    }

    #[test]
    fn identity_map_expansion() {
        let d = WeierstrassData::monomial(Complex64::new(1.0, 0.0), 1, 0.5, 0.0).unwrap();
        let r = 2.5f64;
        let e = local_expansion(&d, Complex64::new(r.ln(), 0.0)).unwrap();
        assert!((e.a1 - r).norm() < 1e-12);
        assert!((e.a2 - r / 2.0).norm() < 1e-12);
        assert!((e.a3 - r / 6.0).norm() < 1e-12);
        assert!((e.a4 - r / 24.0).norm() < 1e-12);
        // at another angle the map is rotated back to the real axis
        let e = local_expansion(&d, Complex64::new(r.ln(), 1.0)).unwrap();
        assert!((e.a0 - r).norm() < 1e-12);
        assert!(
            (e.rotation() * Vector3::x() - Vector3::new(1.0f64.cos(), -1.0f64.sin(), 0.0)).norm()
                < 1e-12
        );
        let far = WeierstrassData::monomial(Complex64::new(3.0, 0.0), 1, 0.5, 0.0).unwrap();
        assert!(matches!(
            local_expansion(&far, Complex64::new(r.ln(), 0.0)),
            Err(Error::Normalization(_))
        ));
    }
}
