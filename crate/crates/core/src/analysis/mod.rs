//! Differential-geometric checks on sampled conformal immersions of the
//! annulus: conformality, harmonicity, fundamental forms, the quartic Hopf
//! expression and the Gauss equation for the conformal factor.

mod surface;

pub(crate) use surface::spectral_rows;
pub use surface::{
    read_surface, write_surface, AnalyticSurface, DerivativeMode, InvertedChart, Partials,
    PlanarAnnulus, SurfaceFile, SurfaceGrid, Transformed, DEFAULT_FD_ORDER,
};

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{uniform_stencils, PeriodicDifferentiator};

/// Tangent cross products shorter than this have no usable normal.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Pointwise first and second fundamental forms in polar coordinates,
/// `I = E dr² + 2F dr dθ + G dθ²`, `II = L dr² + 2M dr dθ + N dθ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    /// Conformal factor of `I = λ(dr² + r² dθ²)`, taken as `|U_r|²`.
    pub lambda: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub normal: Vector3<f64>,
}

impl FundamentalForms {
    /// Gauss curvature `(LN − M²)/(EG − F²)`.
    pub fn gauss_curvature(&self) -> f64 {
        (self.l * self.n - self.m * self.m) / (self.e * self.g - self.f * self.f)
    }

    /// `EN + GL`, zero on minimal surfaces in conformal coordinates.
    pub fn minimality(&self) -> f64 {
        self.e * self.n + self.g * self.l
    }
}

/// Gauss curvature implied by the rigid second form `L = −A/r², M = 0, N = A`:
/// `K = −A²/(λ² r⁴)`.
pub fn rigid_form_curvature(height: f64, lambda: f64, r: f64) -> f64 {
    -height * height / (lambda * lambda * r.powi(4))
}

/// Standard Wirtinger derivative `U_z = e^{−iθ}(U_r − (i/r)U_θ)/2`.
fn wirtinger(p: &Partials, r: f64, theta: f64) -> [Complex64; 3] {
    let phase = Complex64::from_polar(0.5, -theta);
    std::array::from_fn(|c| phase * Complex64::new(p.u_r[c], -p.u_theta[c] / r))
}

fn cdot(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cdot_conj(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

/// `max |U_z · U_z|` over all nodes.
pub fn conformality_residual(s: &SurfaceGrid) -> Result<f64> {
    let field = s.partials_field()?;
    let grid = s.grid();
    Ok(field
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (j, k) = (i / grid.n_theta, i % grid.n_theta);
            let uz = wirtinger(p, grid.radius(j), grid.theta(k));
            cdot(&uz, &uz).norm()
        })
        .fold(0.0, f64::max))
}

/// `max |ΔU|` over interior nodes, `Δ = ∂_rr + (1/r)∂_r + (1/r²)∂_θθ`.
pub fn harmonicity_residual(s: &SurfaceGrid) -> Result<f64> {
    let field = s.partials_field()?;
    let grid = s.grid();
    let mut worst: f64 = 0.0;
    for j in 1..grid.n_r - 1 {
        let r = grid.radius(j);
        for k in 0..grid.n_theta {
            let p = &field[grid.index(j, k)];
            let lap = p.u_rr + p.u_r / r + p.u_thetatheta / (r * r);
            worst = worst.max(lap.norm());
        }
    }
    Ok(worst)
}

fn raw_forms(p: &Partials, r: f64) -> Result<FundamentalForms> {
    let cross = p.u_r.cross(&p.u_theta);
    let len = cross.norm();
    if !(len >= DEGENERACY_THRESHOLD) {
        return Err(Error::Degenerate(format!(
            "|U_r × U_θ| = {len:e} at r = {r}"
        )));
    }
    let normal = cross / len;
    Ok(FundamentalForms {
        lambda: p.u_r.norm_squared(),
        e: p.u_r.norm_squared(),
        f: p.u_r.dot(&p.u_theta),
        g: p.u_theta.norm_squared(),
        l: p.u_rr.dot(&normal),
        m: p.u_rtheta.dot(&normal),
        n: p.u_thetatheta.dot(&normal),
        normal,
    })
}

fn flip(mut forms: FundamentalForms, sign: f64) -> FundamentalForms {
    if sign < 0.0 {
        forms.normal = -forms.normal;
        forms.l = -forms.l;
        forms.m = -forms.m;
        forms.n = -forms.n;
    }
    forms
}

/// Sign applied to `U_r × U_θ` so that `N ≥ 0` on the outer boundary row
/// (summed over the row).
pub fn normal_orientation(s: &SurfaceGrid) -> Result<f64> {
    let j = s.grid().outer_row();
    let r = s.grid().radius(j);
    let total: f64 = s
        .row_partials(j)?
        .iter()
        .map(|p| raw_forms(p, r).map(|f| f.n))
        .sum::<Result<f64>>()?;
    Ok(if total < 0.0 { -1.0 } else { 1.0 })
}

/// Fundamental forms at node `(j, k)`, with the normal oriented by
/// [`normal_orientation`].
pub fn forms_at(s: &SurfaceGrid, j: usize, k: usize) -> Result<FundamentalForms> {
    let sign = normal_orientation(s)?;
    let p = s.partials(j, k)?;
    Ok(flip(raw_forms(&p, s.grid().radius(j))?, sign))
}

/// Fundamental forms at every node, row-major.
pub fn forms_field(s: &SurfaceGrid) -> Result<Vec<FundamentalForms>> {
    let field = s.partials_field()?;
    forms_from_partials(s, &field)
}

pub(crate) fn forms_from_partials(
    s: &SurfaceGrid,
    field: &[Partials],
) -> Result<Vec<FundamentalForms>> {
    let grid = s.grid();
    let raw: Vec<FundamentalForms> = field
        .par_iter()
        .enumerate()
        .map(|(i, p)| raw_forms(p, grid.radius(i / grid.n_theta)))
        .collect::<Result<_>>()?;
    let outer = grid.outer_row();
    let total: f64 = (0..grid.n_theta).map(|k| raw[grid.index(outer, k)].n).sum();
    let sign = if total < 0.0 { -1.0 } else { 1.0 };
    Ok(raw.into_iter().map(|f| flip(f, sign)).collect())
}

/// The quartic Hopf expression at one node, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfSample {
    pub z: Complex64,
    /// `(r²L − N)² − 4r²M² − 4rM(r²L − N)i`.
    pub value: Complex64,
    /// `z⁴ (U_zz − x U_z)·(U_zz − x U_z)` from raw second derivatives.
    pub cross_check: Complex64,
    pub discrepancy: f64,
}

fn hopf_from(p: &Partials, forms: &FundamentalForms, r: f64, theta: f64) -> HopfSample {
    let z = Complex64::from_polar(r, theta);
    let b = Complex64::new(r * r * forms.l - forms.n, -2.0 * r * forms.m);
    let value = b * b;

    // U_zz with the normalization e^{-2iθ}(U_rr − U_θθ/r² − (2i/r)U_rθ
    // + (2i/r²)U_θ − U_r/r), i.e. four times the Wirtinger second derivative,
    // so that z⁴ U_zz⊥·U_zz⊥ equals the form-based value.
    let phase = Complex64::from_polar(1.0, -2.0 * theta);
    let uzz: [Complex64; 3] = std::array::from_fn(|c| {
        phase
            * Complex64::new(
                p.u_rr[c] - p.u_thetatheta[c] / (r * r) - p.u_r[c] / r,
                -2.0 * p.u_rtheta[c] / r + 2.0 * p.u_theta[c] / (r * r),
            )
    });
    let uz = wirtinger(p, r, theta);
    let x = cdot_conj(&uzz, &uz) / cdot_conj(&uz, &uz);
    let perp: [Complex64; 3] = std::array::from_fn(|c| uzz[c] - x * uz[c]);
    let cross_check = z.powu(4) * cdot(&perp, &perp);
    HopfSample {
        z,
        value,
        cross_check,
        discrepancy: (value - cross_check).norm(),
    }
}

/// The quartic Hopf expression at node `(j, k)`.
pub fn hopf_quartic(s: &SurfaceGrid, j: usize, k: usize) -> Result<HopfSample> {
    let forms = forms_at(s, j, k)?;
    let p = s.partials(j, k)?;
    Ok(hopf_from(&p, &forms, s.grid().radius(j), s.grid().theta(k)))
}

/// Grid-wide summary of the Hopf expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfSummary {
    pub mean: [f64; 2],
    /// `|(max Re − min Re, max Im − min Im)|` over the grid.
    pub spread: f64,
    pub max_imag: f64,
    /// Largest disagreement between the form-based and raw computations.
    pub max_discrepancy: f64,
}

impl HopfSummary {
    /// `A = √|mean|/2`, the constant of the rigid second fundamental form.
    pub fn height(&self) -> f64 {
        Complex64::new(self.mean[0], self.mean[1]).norm().sqrt() / 2.0
    }
}

pub fn hopf_field(s: &SurfaceGrid) -> Result<Vec<HopfSample>> {
    let field = s.partials_field()?;
    let forms = forms_from_partials(s, &field)?;
    let grid = s.grid();
    Ok(field
        .iter()
        .zip(&forms)
        .enumerate()
        .map(|(i, (p, f))| {
            let (j, k) = (i / grid.n_theta, i % grid.n_theta);
            hopf_from(p, f, grid.radius(j), grid.theta(k))
        })
        .collect())
}

pub fn hopf_summary(s: &SurfaceGrid) -> Result<HopfSummary> {
    let samples = hopf_field(s)?;
    Ok(summarize_hopf(&samples))
}

fn summarize_hopf(samples: &[HopfSample]) -> HopfSummary {
    let n = samples.len() as f64;
    let mean: Complex64 = samples.iter().map(|h| h.value).sum::<Complex64>() / n;
    let (mut re_lo, mut re_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut max_discrepancy: f64 = 0.0;
    for h in samples {
        re_lo = re_lo.min(h.value.re);
        re_hi = re_hi.max(h.value.re);
        im_lo = im_lo.min(h.value.im);
        im_hi = im_hi.max(h.value.im);
        max_discrepancy = max_discrepancy.max(h.discrepancy);
    }
    HopfSummary {
        mean: [mean.re, mean.im],
        spread: (re_hi - re_lo).hypot(im_hi - im_lo),
        max_imag: im_lo.abs().max(im_hi.abs()),
        max_discrepancy,
    }
}

/// `max |EN + GL|` over all nodes.
pub fn minimality_residual(s: &SurfaceGrid) -> Result<f64> {
    Ok(forms_field(s)?
        .iter()
        .map(|f| f.minimality().abs())
        .fold(0.0, f64::max))
}

/// Largest deviation from `L = −A/r², M = 0, N = A` over all nodes.
pub fn rigid_form_residual(s: &SurfaceGrid, height: f64) -> Result<f64> {
    let forms = forms_field(s)?;
    let grid = s.grid();
    Ok(forms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let r = grid.radius(i / grid.n_theta);
            (f.l + height / (r * r))
                .abs()
                .max(f.m.abs())
                .max((f.n - height).abs())
        })
        .fold(0.0, f64::max))
}

/// Step in `ln r` and `θ` for the analytic-mode Laplacian of `φ`.
const ANALYTIC_LAPLACIAN_STEP: f64 = 5e-3;
/// Sixth-order central weights for the first derivative (unit step).
const CENTRAL_D1_6: [f64; 7] = [
    -1.0 / 60.0,
    3.0 / 20.0,
    -0.75,
    0.0,
    0.75,
    -3.0 / 20.0,
    1.0 / 60.0,
];

/// `φ = ln(1/√λ)` and `Δφ` at interior nodes (rows `1..n_r-1`), row-major
/// over those rows.
///
/// Both modes start from the gradient `φ_u = −r U_r·U_rr/λ`,
/// `φ_θ = −U_r·U_rθ/λ` (with `u = ln r`), so only one further derivative is
/// taken: numeric grids use finite differences in `ln r` and spectral
/// differentiation in `θ`, analytic grids a sixth-order central stencil with
/// a small step off the grid.
pub fn phi_laplacian(s: &SurfaceGrid) -> Result<Vec<(f64, f64)>> {
    let grid = *s.grid();
    if let Some(surface) = s.analytic() {
        let h = ANALYTIC_LAPLACIAN_STEP;
        let lambda_at = |u: f64, t: f64| -> Result<(f64, Partials)> {
            let p = surface.partials(u.exp(), t);
            let lambda = p.u_r.norm_squared();
            if !(lambda > 0.0) {
                return Err(Error::Domain(format!("λ = {lambda} ≤ 0 at ln r = {u}")));
            }
            Ok((lambda, p))
        };
        let phi_u = |u: f64, t: f64| -> Result<f64> {
            let (lambda, p) = lambda_at(u, t)?;
            Ok(-u.exp() * p.u_r.dot(&p.u_rr) / lambda)
        };
        let phi_t = |u: f64, t: f64| -> Result<f64> {
            let (lambda, p) = lambda_at(u, t)?;
            Ok(-p.u_r.dot(&p.u_rtheta) / lambda)
        };
        return (1..grid.n_r - 1)
            .into_par_iter()
            .map(|j| {
                let u = grid.log_radius(j);
                let r = grid.radius(j);
                (0..grid.n_theta)
                    .map(|k| {
                        let t = grid.theta(k);
                        let mut d_uu = 0.0;
                        let mut d_tt = 0.0;
                        for (i, w) in CENTRAL_D1_6.iter().enumerate() {
                            if *w == 0.0 {
                                continue;
                            }
                            let off = (i as f64 - 3.0) * h;
                            d_uu += w * phi_u(u + off, t)?;
                            d_tt += w * phi_t(u, t + off)?;
                        }
                        let phi = -0.5 * lambda_at(u, t)?.0.ln();
                        Ok((phi, (d_uu + d_tt) / (h * r * r)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map(|rows| rows.into_iter().flatten().collect());
    }

    let field = s.partials_field()?;
    let mut phi = Vec::with_capacity(grid.len());
    let mut phi_u = Vec::with_capacity(grid.len());
    let mut phi_t = Vec::with_capacity(grid.len());
    for (i, p) in field.iter().enumerate() {
        let lambda = p.u_r.norm_squared();
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("λ = {lambda} ≤ 0")));
        }
        let r = grid.radius(i / grid.n_theta);
        phi.push(-0.5 * lambda.ln());
        phi_u.push(-r * p.u_r.dot(&p.u_rr) / lambda);
        phi_t.push(-p.u_r.dot(&p.u_rtheta) / lambda);
    }
    let order = s.fd_order().unwrap_or(DEFAULT_FD_ORDER);
    let stencils = uniform_stencils(grid.n_r, grid.log_step(), order);
    let diff = PeriodicDifferentiator::new(grid.n_theta);
    let mut out = Vec::with_capacity((grid.n_r - 2) * grid.n_theta);
    for j in 1..grid.n_r - 1 {
        let r = grid.radius(j);
        let row: Vec<f64> = (0..grid.n_theta).map(|k| phi_t[grid.index(j, k)]).collect();
        let d_tt = &diff.derivatives(&row, 1)[0];
        for k in 0..grid.n_theta {
            let d_uu = stencils[j].0.apply(|i| phi_u[grid.index(i, k)]);
            out.push((phi[grid.index(j, k)], (d_uu + d_tt[k]) / (r * r)));
        }
    }
    Ok(out)
}

/// `max |Δφ + (A²/r⁴) e^{2φ}|` over interior nodes, `φ = ln(1/√λ)`.
pub fn gauss_equation_residual(s: &SurfaceGrid, height: f64) -> Result<f64> {
    let grid = *s.grid();
    let values = phi_laplacian(s)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, (phi, lap))| {
            let r = grid.radius(1 + i / grid.n_theta);
            (lap + height * height / r.powi(4) * (2.0 * phi).exp()).abs()
        })
        .fold(0.0, f64::max))
}

/// Residual report emitted by the `analyze` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub conformality: f64,
    pub harmonicity: f64,
    pub hopf_constancy: f64,
    pub hopf_value: [f64; 2],
    pub gauss_residual: f64,
    pub minimality: f64,
    /// The constant `A` estimated from the Hopf value.
    pub height: f64,
}

/// Run the full residual suite, using `A` estimated from the Hopf constant.
pub fn analyze(s: &SurfaceGrid) -> Result<AnalysisReport> {
    let hopf = hopf_summary(s)?;
    let height = hopf.height();
    Ok(AnalysisReport {
        conformality: conformality_residual(s)?,
        harmonicity: harmonicity_residual(s)?,
        hopf_constancy: hopf.spread,
        hopf_value: hopf.mean,
        gauss_residual: gauss_equation_residual(s, height)?,
        minimality: minimality_residual(s)?,
        height,
    })
}
