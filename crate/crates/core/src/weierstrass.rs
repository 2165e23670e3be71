//! Weierstrass data `(g, f dz)` on the annulus and the minimal immersion
//! `U(z) = Re ∫ ((1 − g²) f, i(1 + g²) f, 2g f) dz`.
//!
//! The form is tied to the Gauss map by `f = (A/2) e^{iθ₀} / (g_z z²)`, the
//! data that produce a rigid second fundamental form `L = −A/r²`, `M = 0`,
//! `N = A`. Immersions are integrated term by term from Laurent expansions
//! of the three forms; the `z⁻¹` mode becomes a logarithm.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{AnalyticSurface, Partials, SurfaceGrid};
use crate::domain::{circle_samples, AnnulusSpec, PolarGrid};
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::spectral::{laurent_extract_boundary, LaurentPolynomial};

/// Real periods below this are treated as zero.
pub const PERIOD_TOLERANCE: f64 = 1e-9;
/// Relative truncation tail for the quotient series.
pub const SERIES_TAIL: f64 = 1e-12;

type GaussFn = dyn Fn(Complex64) -> (Complex64, Complex64) + Send + Sync;

/// A holomorphic Gauss map on the annulus.
#[derive(Clone)]
pub enum GaussMap {
    /// `g(z) = c z^m`.
    Monomial {
        c: Complex64,
        m: i32,
    },
    Laurent(LaurentPolynomial),
    /// Closed form returning `(g(z), g_z(z))`.
    Analytic(Arc<GaussFn>),
}

impl std::fmt::Debug for GaussMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Monomial { c, m } => write!(f, "Monomial({c} z^{m})"),
            Self::Laurent(p) => write!(f, "Laurent({p:?})"),
            Self::Analytic(_) => write!(f, "Analytic(..)"),
        }
    }
}

impl GaussMap {
    pub fn analytic<F>(g: F) -> Self
    where
        F: Fn(Complex64) -> (Complex64, Complex64) + Send + Sync + 'static,
    {
        Self::Analytic(Arc::new(g))
    }

    /// `(g(z), g_z(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        match self {
            Self::Monomial { c, m } => {
                let zm = z.powi(*m - 1);
                (c * zm * z, c * zm * *m as f64)
            }
            Self::Laurent(p) => (p.eval(z), p.eval_derivative(z)),
            Self::Analytic(g) => g(z),
        }
    }
}

/// Weierstrass data `(g, A, θ₀)`.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub g: GaussMap,
    pub height: f64,
    pub theta0: f64,
}

impl WeierstrassData {
    pub fn new(g: GaussMap, height: f64, theta0: f64) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::Parameter(format!(
                "A must be positive, got {height}"
            )));
        }
        if !theta0.is_finite() {
            return Err(Error::Parameter("theta0 must be finite".to_string()));
        }
        match &g {
            GaussMap::Monomial { c, m } if c.norm() == 0.0 || *m == 0 => {
                return Err(Error::Data(format!(
                    "g = ({c}) z^{m} is constant, so g_z vanishes"
                )));
            }
            GaussMap::Laurent(p) if p.terms().all(|(k, c)| k == 0 || c.norm() == 0.0) => {
                return Err(Error::Data(
                    "Laurent g is constant, so g_z vanishes".to_string(),
                ));
            }
            _ => {}
        }
        Ok(Self { g, height, theta0 })
    }

    pub fn monomial(c: Complex64, m: i32, height: f64, theta0: f64) -> Result<Self> {
        Self::new(GaussMap::Monomial { c, m }, height, theta0)
    }

    /// `(A/2) e^{iθ₀}`.
    pub fn form_constant(&self) -> Complex64 {
        Complex64::from_polar(self.height / 2.0, self.theta0)
    }

    /// `f(z) = (A/2) e^{iθ₀} / (g_z z²)`.
    pub fn f(&self, z: Complex64) -> Result<Complex64> {
        let (_, gz) = self.g.eval(z);
        self.f_from(z, gz)
    }

    fn f_from(&self, z: Complex64, gz: Complex64) -> Result<Complex64> {
        let f = self.form_constant() / (gz * z * z);
        if gz.norm() == 0.0 || !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::Data(format!("g_z vanishes at z = {z}")));
        }
        Ok(f)
    }

    /// The three integrands `((1 − g²) f, i(1 + g²) f, 2 g f)`.
    pub fn forms(&self, z: Complex64) -> Result<[Complex64; 3]> {
        let (g, gz) = self.g.eval(z);
        let f = self.f_from(z, gz)?;
        let g2 = g * g;
        Ok([(1.0 - g2) * f, Complex64::i() * (1.0 + g2) * f, 2.0 * g * f])
    }

    /// Counts zeros of `g_z` in the annulus by the argument principle on the
    /// two boundary circles, and also rejects boundary zeros.
    pub fn check_derivative_nonvanishing(&self, spec: &AnnulusSpec) -> Result<()> {
        let n = 1024;
        let mut winding = [0i64; 2];
        let mut largest: f64 = 0.0;
        let mut smallest = f64::INFINITY;
        for (slot, rho) in [spec.inner_radius, spec.outer_radius]
            .into_iter()
            .enumerate()
        {
            let values: Vec<Complex64> = circle_samples(rho, n)?
                .into_iter()
                .map(|z| self.g.eval(z).1)
                .collect();
            let mut turn = 0.0;
            for i in 0..n {
                let a = values[i];
                let b = values[(i + 1) % n];
                largest = largest.max(a.norm());
                smallest = smallest.min(a.norm());
                turn += (b / a).arg();
            }
            winding[slot] = (turn / (2.0 * PI)).round() as i64;
        }
        if !(smallest > 1e-12 * largest) || !smallest.is_finite() {
            return Err(Error::Data(format!(
                "g_z is numerically zero on a boundary circle (min |g_z| = {smallest:e})"
            )));
        }
        let zeros = winding[1] - winding[0];
        if zeros != 0 {
            return Err(Error::Data(format!(
                "g_z has {zeros} zero(s) inside the annulus"
            )));
        }
        Ok(())
    }

    /// Laurent series of `1/g_z`, `g²/g_z`, `g/g_z` valid on the closed annulus.
    pub fn quotient_series(&self, spec: &AnnulusSpec) -> Result<QuotientSeries> {
        if let GaussMap::Monomial { c, m } = self.g {
            let mf = m as f64;
            return Ok(QuotientSeries {
                p: LaurentPolynomial::monomial(1.0 / (c * mf), 1 - m as i64),
                q: LaurentPolynomial::monomial(c / mf, 1 + m as i64),
                s: LaurentPolynomial::monomial(Complex64::new(1.0 / mf, 0.0), 1),
            });
        }
        self.check_derivative_nonvanishing(spec)?;
        let g = &self.g;
        let p = laurent_extract_boundary(|z| 1.0 / g.eval(z).1, spec, SERIES_TAIL)?;
        let q = laurent_extract_boundary(
            |z| {
                let (g, gz) = g.eval(z);
                g * g / gz
            },
            spec,
            SERIES_TAIL,
        )?;
        let s = laurent_extract_boundary(
            |z| {
                let (g, gz) = g.eval(z);
                g / gz
            },
            spec,
            SERIES_TAIL,
        )?;
        Ok(QuotientSeries {
            p: p.series,
            q: q.series,
            s: s.series,
        })
    }

    /// Laurent series of the three forms `Φ = (Φ₁, Φ₂, Φ₃)`.
    pub fn form_series(&self, spec: &AnnulusSpec) -> Result<[LaurentPolynomial; 3]> {
        Ok(self.quotient_series(spec)?.forms(self.form_constant()))
    }
}

/// Laurent series of the quotients `p = 1/g_z`, `q = g²/g_z`, `s = g/g_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSeries {
    pub p: LaurentPolynomial,
    pub q: LaurentPolynomial,
    pub s: LaurentPolynomial,
}

impl QuotientSeries {
    /// Form coefficients for `f = K / (g_z z²)`: `Φ₁ = K(p − q)/z²`,
    /// `Φ₂ = iK(p + q)/z²`, `Φ₃ = 2K s/z²`.
    pub fn forms(&self, k: Complex64) -> [LaurentPolynomial; 3] {
        [
            self.p.sub(&self.q).scaled(k).shifted(-2),
            self.p.add(&self.q).scaled(Complex64::i() * k).shifted(-2),
            self.s.scaled(2.0 * k).shifted(-2),
        ]
    }
}

/// Contour integrals of the three forms over a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub radius: f64,
    pub periods: [Complex64; 3],
    /// `max |I_n − I_{2n}|` over the three integrals.
    pub error_estimate: f64,
    pub representable: bool,
}

impl PeriodReport {
    pub fn max_real_part(&self) -> f64 {
        self.periods.iter().map(|p| p.re.abs()).fold(0.0, f64::max)
    }
}

fn contour_forms(d: &WeierstrassData, rho: f64, n: usize) -> Result<[Complex64; 3]> {
    let weight = 2.0 * PI / n as f64;
    let mut total = [Complex64::new(0.0, 0.0); 3];
    for z in circle_samples(rho, n)? {
        let phi = d.forms(z)?;
        for c in 0..3 {
            total[c] += phi[c] * Complex64::i() * z * weight;
        }
    }
    Ok(total)
}

/// Periods of the three forms on `|z| = ρ` with `n` trapezoid nodes.
pub fn periods_on(d: &WeierstrassData, rho: f64, n: usize) -> Result<PeriodReport> {
    if n < 32 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "period quadrature needs a power of two ≥ 32, got {n}"
        )));
    }
    let coarse = contour_forms(d, rho, n)?;
    let fine = contour_forms(d, rho, 2 * n)?;
    let error_estimate = (0..3)
        .map(|c| (coarse[c] - fine[c]).norm())
        .fold(0.0, f64::max);
    let report = PeriodReport {
        radius: rho,
        periods: fine,
        error_estimate,
        representable: false,
    };
    Ok(PeriodReport {
        representable: report.max_real_part() < PERIOD_TOLERANCE,
        ..report
    })
}

/// Periods on the unit circle.
pub fn periods(d: &WeierstrassData, n: usize) -> Result<PeriodReport> {
    periods_on(d, 1.0, n)
}

/// `λ = |f|²(1 + |g|²)²`.
pub fn metric_lambda(d: &WeierstrassData, z: Complex64) -> Result<f64> {
    let (g, gz) = d.g.eval(z);
    let f = d.f_from(z, gz)?;
    Ok(f.norm_sqr() * (1.0 + g.norm_sqr()).powi(2))
}

/// `Δφ = −4|g_z|²/(1 + |g|²)²` for `φ = ln(1/√λ)`.
pub fn laplacian_phi(d: &WeierstrassData, z: Complex64) -> Result<f64> {
    let (g, gz) = d.g.eval(z);
    d.f_from(z, gz)?;
    Ok(-4.0 * gz.norm_sqr() / (1.0 + g.norm_sqr()).powi(2))
}

/// `| |f g_z z²| − A/2 |`, zero by construction.
pub fn height_identity_residual(d: &WeierstrassData, z: Complex64) -> Result<f64> {
    let (_, gz) = d.g.eval(z);
    let f = d.f_from(z, gz)?;
    Ok(((f * gz * z * z).norm() - d.height / 2.0).abs())
}

/// The immersion `U = Re F + offset` with `F' = Φ` given as Laurent series.
#[derive(Debug, Clone)]
pub struct WeierstrassSurface {
    forms: [LaurentPolynomial; 3],
    offset: Vector3<f64>,
}

fn primitive(p: &LaurentPolynomial, z: Complex64) -> f64 {
    let (r, _) = z.to_polar();
    p.terms()
        .map(|(k, c)| {
            if k == -1 {
                c.re * r.ln()
            } else {
                (c * z.powi(k as i32 + 1) / (k + 1) as f64).re
            }
        })
        .sum()
}

impl WeierstrassSurface {
    pub fn new(forms: [LaurentPolynomial; 3], offset: Vector3<f64>) -> Self {
        Self { forms, offset }
    }

    pub fn forms(&self) -> &[LaurentPolynomial; 3] {
        &self.forms
    }

    pub fn offset(&self) -> Vector3<f64> {
        self.offset
    }

    /// `Re F(z)` with zero integration constants, before the offset.
    pub fn centered_position(&self, z: Complex64) -> Vector3<f64> {
        Vector3::from_fn(|c, _| primitive(&self.forms[c], z))
    }
}

impl AnalyticSurface for WeierstrassSurface {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64> {
        self.centered_position(Complex64::from_polar(r, theta)) + self.offset
    }

    fn partials(&self, r: f64, theta: f64) -> Partials {
        let z = Complex64::from_polar(r, theta);
        let e = Complex64::from_polar(1.0, theta);
        let i = Complex64::i();
        let mut p = Partials::default();
        for c in 0..3 {
            let phi = self.forms[c].eval(z);
            let dphi = self.forms[c].eval_derivative(z);
            p.u_r[c] = (phi * e).re;
            p.u_theta[c] = (phi * i * z).re;
            p.u_rr[c] = (dphi * e * e).re;
            p.u_rtheta[c] = (dphi * i * z * e + phi * i * e).re;
            p.u_thetatheta[c] = (-dphi * z * z - phi * z).re;
        }
        p
    }
}

/// Integration constant of the immersion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Base {
    /// Zero constants in every term-wise primitive.
    #[default]
    Centered,
    /// `U(z₀) = U₀`.
    Point { z0: Complex64, u0: Vector3<f64> },
}

/// Build the surface of `d` on `spec`, checking the data conditions.
pub fn weierstrass_surface(
    d: &WeierstrassData,
    spec: &AnnulusSpec,
    base: Base,
) -> Result<WeierstrassSurface> {
    d.check_derivative_nonvanishing(spec)?;
    let report = periods_on(d, spec.core_radius(), 256)?;
    if !report.representable {
        return Err(Error::Representability(format!(
            "real periods {:?} exceed {PERIOD_TOLERANCE:e}",
            report.periods.map(|p| p.re)
        )));
    }
    let forms = d.form_series(spec)?;
    let mut surface = WeierstrassSurface::new(forms, Vector3::zeros());
    if let Base::Point { z0, u0 } = base {
        spec.check_radius(z0.norm())?;
        surface.offset = u0 - surface.centered_position(z0);
    }
    Ok(surface)
}

/// Sample the immersion of `d` on `grid` (analytic derivative mode).
pub fn integrate_immersion(
    d: &WeierstrassData,
    grid: PolarGrid,
    base: Base,
) -> Result<SurfaceGrid> {
    let surface = weierstrass_surface(d, &grid.spec, base)?;
    SurfaceGrid::from_analytic(grid, Arc::new(surface))
}

/// Order of the two legs of a polar path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    RadialFirst,
    AngularFirst,
}

/// `Re ∫ Φ dz` along a two-leg polar path, by composite Gauss-Legendre
/// quadrature. Independent of the series used by [`integrate_immersion`].
pub fn path_integral(
    d: &WeierstrassData,
    from: Complex64,
    to: Complex64,
    order: PathOrder,
) -> Result<Vector3<f64>> {
    let (r0, t0) = from.to_polar();
    let (r1, t1) = to.to_polar();
    let (x, w) = gauss_legendre(16);
    let panels = 32;
    let mut total = [Complex64::new(0.0, 0.0); 3];
    let mut leg = |point: &dyn Fn(f64) -> (Complex64, Complex64)| -> Result<()> {
        for p in 0..panels {
            let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            for (xi, wi) in x.iter().zip(&w) {
                let s = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                let (z, dz) = point(s);
                let phi = d.forms(z)?;
                for c in 0..3 {
                    total[c] += phi[c] * dz * (0.5 * (b - a) * wi);
                }
            }
        }
        Ok(())
    };
    let radial = |t: f64| {
        move |s: f64| {
            let r = r0 + (r1 - r0) * s;
            let e = Complex64::from_polar(1.0, t);
            (e * r, e * (r1 - r0))
        }
    };
    let angular = |r: f64| {
        move |s: f64| {
            let t = t0 + (t1 - t0) * s;
            let z = Complex64::from_polar(r, t);
            (z, Complex64::i() * z * (t1 - t0))
        }
    };
    match order {
        PathOrder::RadialFirst => {
            leg(&radial(t0))?;
            leg(&angular(r1))?;
        }
        PathOrder::AngularFirst => {
            leg(&angular(r0))?;
            leg(&radial(t1))?;
        }
    }
    Ok(Vector3::new(total[0].re, total[1].re, total[2].re))
}

/// On-disk Weierstrass data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeierstrassFile {
    #[serde(rename = "A")]
    pub height: f64,
    pub theta0: f64,
    pub g: GaussMapFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaussMapFile {
    Laurent { k_min: i64, coeffs: Vec<[f64; 2]> },
    Monomial { c: [f64; 2], m: i32 },
}

impl TryFrom<WeierstrassFile> for WeierstrassData {
    type Error = Error;

    fn try_from(file: WeierstrassFile) -> Result<Self> {
        let g = match file.g {
            GaussMapFile::Laurent { k_min, coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::Format(
                        "g.coeffs: empty coefficient list".to_string(),
                    ));
                }
                GaussMap::Laurent(LaurentPolynomial::new(
                    k_min,
                    coeffs
                        .iter()
                        .map(|[re, im]| Complex64::new(*re, *im))
                        .collect(),
                ))
            }
            GaussMapFile::Monomial { c, m } => GaussMap::Monomial {
                c: Complex64::new(c[0], c[1]),
                m,
            },
        };
        WeierstrassData::new(g, file.height, file.theta0)
    }
}

impl TryFrom<&WeierstrassData> for WeierstrassFile {
    type Error = Error;

    fn try_from(d: &WeierstrassData) -> Result<Self> {
        let g = match &d.g {
            GaussMap::Monomial { c, m } => GaussMapFile::Monomial {
                c: [c.re, c.im],
                m: *m,
            },
            GaussMap::Laurent(p) => GaussMapFile::Laurent {
                k_min: p.k_min,
                coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            },
            GaussMap::Analytic(_) => {
                return Err(Error::Format(
                    "closed-form Gauss maps cannot be written to a data file".to_string(),
                ))
            }
        };
        Ok(Self {
            height: d.height,
            theta0: d.theta0,
            g,
        })
    }
}

pub fn read_data(path: &Path) -> Result<WeierstrassData> {
    let text = std::fs::read_to_string(path)?;
    let file: WeierstrassFile = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    file.try_into()
}

pub fn write_data(d: &WeierstrassData, path: &Path) -> Result<()> {
    let file = WeierstrassFile::try_from(d)?;
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catenoid::solve_catenoid_params;
    use crate::domain::make_grid;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn identity_data(height: f64) -> WeierstrassData {
        WeierstrassData::monomial(one(), 1, height, 0.0).unwrap()
    }

    #[test]
    fn constant_gauss_maps_are_rejected() {
        assert!(matches!(
            WeierstrassData::monomial(Complex64::new(0.0, 0.0), 1, 1.0, 0.0),
            Err(Error::Data(_))
        ));
        let flat = GaussMap::Laurent(LaurentPolynomial::monomial(one(), 0));
        assert!(matches!(
            WeierstrassData::new(flat, 1.0, 0.0),
            Err(Error::Data(_))
        ));
        assert!(WeierstrassData::monomial(one(), 1, -1.0, 0.0).is_err());
    }

    #[test]
    fn identity_data_periods() {
        let a = 0.46;
        let report = periods(&identity_data(a), 64).unwrap();
        assert!(report.representable);
        assert!(report.periods[0].norm() < 1e-14);
        assert!(report.periods[1].norm() < 1e-14);
        assert!((report.periods[2] - Complex64::new(0.0, 2.0 * PI * a)).norm() < 1e-13);
        assert!(periods(&identity_data(a), 48).is_err());
    }

    #[test]
    fn lambda_at_unit_point_and_symmetry() {
        let a = solve_catenoid_params(1e-12).unwrap().a;
        let d = identity_data(a);
        assert!((metric_lambda(&d, one()).unwrap() - a * a).abs() < 1e-15);
        let z = Complex64::from_polar(1.7, 0.4);
        let mirror = 1.0 / z.conj();
        let (l1, l2) = (
            metric_lambda(&d, z).unwrap(),
            metric_lambda(&d, mirror).unwrap(),
        );
        // λ itself is not symmetric under z → 1/z̄ (λ(1/z̄) = |z|⁴λ(z));
        // λ|z|² is.
        assert!((l2 - l1 * z.norm_sqr().powi(2)).abs() < 1e-13);
        assert!((l1 * z.norm_sqr() - l2 * mirror.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn zero_of_derivative_inside_is_detected() {
        // g = z² − 2z has g_z = 2(z − 1), vanishing on the unit circle, and
        // g = z² + z/10 has g_z vanishing at −1/20 (outside R = 2 annulus)
        let spec = AnnulusSpec::symmetric(2.0).unwrap();
        let inside = GaussMap::analytic(|z| (z * z - z * 1.2, z * 2.0 - 1.2));
        let d = WeierstrassData::new(inside, 1.0, 0.0).unwrap();
        assert!(matches!(
            d.check_derivative_nonvanishing(&spec),
            Err(Error::Data(_))
        ));
        let outside = GaussMap::analytic(|z| (z * z + z * 0.1, z * 2.0 + 0.1));
        let d = WeierstrassData::new(outside, 1.0, 0.0).unwrap();
        assert!(d.check_derivative_nonvanishing(&spec).is_ok());
    }

    #[test]
    fn identity_data_integrates_to_rotated_catenoid() {
        let p = solve_catenoid_params(1e-12).unwrap();
        let grid = make_grid(p.annulus(), 9, 32).unwrap();
        let s = integrate_immersion(&identity_data(p.a), grid, Base::Centered).unwrap();
        for j in 0..9 {
            for k in 0..32 {
                let (r, t) = (grid.radius(j), grid.theta(k));
                let u = r.ln();
                let expected = Vector3::new(
                    -p.a * u.cosh() * t.cos(),
                    -p.a * u.cosh() * t.sin(),
                    p.a * u,
                );
                assert!((s.value(j, k) - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn laurent_and_closed_form_data_agree() {
        let spec = AnnulusSpec::symmetric(2.0).unwrap();
        let shift = Complex64::new(0.3, 0.0);
        let closed =
            WeierstrassData::new(GaussMap::analytic(move |z| (z + shift, one())), 1.0, 0.0)
                .unwrap();
        let laurent = WeierstrassData::new(
            GaussMap::Laurent(LaurentPolynomial::new(0, vec![shift, one()])),
            1.0,
            0.0,
        )
        .unwrap();
        let a = closed.form_series(&spec).unwrap();
        let b = laurent.form_series(&spec).unwrap();
        let z = Complex64::from_polar(1.5, 1.0);
        for c in 0..3 {
            assert!((a[c].eval(z) - b[c].eval(z)).norm() < 1e-12);
            assert!((a[c].eval(z) - closed.forms(z).unwrap()[c]).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_partials_match_differences() {
        let d = WeierstrassData::monomial(Complex64::new(0.5, 0.2), 1, 0.7, 0.0).unwrap();
        let spec = AnnulusSpec::symmetric(2.0).unwrap();
        let s = weierstrass_surface(&d, &spec, Base::Centered).unwrap();
        let (r, t, h) = (1.3, 0.8, 1e-5);
        let p = s.partials(r, t);
        let fd_r = (s.position(r + h, t) - s.position(r - h, t)) / (2.0 * h);
        let fd_t = (s.position(r, t + h) - s.position(r, t - h)) / (2.0 * h);
        let fd_rt = (s.partials(r, t + h).u_r - s.partials(r, t - h).u_r) / (2.0 * h);
        let fd_rr = (s.partials(r + h, t).u_r - s.partials(r - h, t).u_r) / (2.0 * h);
        let fd_tt = (s.partials(r, t + h).u_theta - s.partials(r, t - h).u_theta) / (2.0 * h);
        assert!((p.u_r - fd_r).norm() < 1e-9);
        assert!((p.u_theta - fd_t).norm() < 1e-9);
        assert!((p.u_rtheta - fd_rt).norm() < 1e-9);
        assert!((p.u_rr - fd_rr).norm() < 1e-9);
        assert!((p.u_thetatheta - fd_tt).norm() < 1e-9);
    }

    #[test]
    fn data_file_round_trip() {
        let d = WeierstrassData::monomial(Complex64::new(0.0, 2.0), -1, 0.5, 0.1).unwrap();
        let file = WeierstrassFile::try_from(&d).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"kind\":\"monomial\""));
        let back: WeierstrassData = serde_json::from_str::<WeierstrassFile>(&text)
            .unwrap()
            .try_into()
            .unwrap();
        let z = Complex64::from_polar(1.1, 2.0);
        assert_eq!(back.g.eval(z), d.g.eval(z));
        let bad =
            r#"{"A": 1.0, "theta0": 0.0, "g": {"kind": "laurent", "k_min": 0, "coeffs": []}}"#;
        let parsed: WeierstrassFile = serde_json::from_str(bad).unwrap();
        assert!(matches!(
            WeierstrassData::try_from(parsed),
            Err(Error::Format(_))
        ));
    }
}
