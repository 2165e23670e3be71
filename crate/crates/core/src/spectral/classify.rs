use nalgebra::{Matrix3, Rotation3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fourier_vanishing_check, recover_gauss_map, LaurentPolynomial};
use crate::analysis::{
    conformality_residual, harmonicity_residual, hopf_summary, AnalyticSurface, DerivativeMode,
    Partials, SurfaceGrid, DEGENERACY_THRESHOLD,
};
use crate::boundary::{fit_plane_circle, free_boundary_residual, BoundaryCurve, Rim};
use crate::catenoid::solve_catenoid_params;
use crate::error::{Error, Result};
use crate::numerics::{fft_index, fourier_modes};
use crate::weierstrass::{weierstrass_surface, Base, GaussMap, WeierstrassData};

/// Default stage tolerance for grids with analytic derivatives.
pub const ANALYTIC_TOLERANCE: f64 = 1e-6;
/// Default stage tolerance for sampled grids.
pub const NUMERIC_TOLERANCE: f64 = 1e-2;
/// Above this `|g|` the Gauss map is taken from the other pole.
const CHART_SWAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CriticalCatenoid,
    NotFreeBoundary,
    NotEmbeddable,
    Inconsistent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CriticalCatenoid => "critical_catenoid",
            Verdict::NotFreeBoundary => "not_free_boundary",
            Verdict::NotEmbeddable => "not_embeddable",
            Verdict::Inconsistent => "inconsistent",
        }
    }
}

/// Largest residual of each pipeline stage that was reached.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageResiduals {
    pub conformality: Option<f64>,
    pub harmonicity: Option<f64>,
    pub sphere: Option<f64>,
    pub orthogonality: Option<f64>,
    /// Spread of the Hopf expression relative to `max(1, |mean|)`.
    pub hopf_spread: Option<f64>,
    /// Distance of the rotated boundary-circle centers from the `Z` axis.
    pub center_alignment: Option<f64>,
    /// Relative misfit of the Laurent model of the Gauss map at the nodes.
    pub gauss_fit: Option<f64>,
    /// Misfit between supplied data normals and surface normals.
    pub data_alignment: Option<f64>,
    /// Variation of `2 f g_z z² / A` over the nodes.
    pub phase_spread: Option<f64>,
    /// `|e^{iθ₀} a₁ + conj(e^{iθ₀} b₁)|` for the first quotient coefficients.
    pub reality_xy: Option<f64>,
    /// `|Im(e^{iθ₀} c₁)|`.
    pub reality_z: Option<f64>,
    pub fourier_outer: Option<f64>,
    pub fourier_inner: Option<f64>,
    pub z_gap: Option<f64>,
    pub integrality: Option<f64>,
    /// `√(Σ_{k≠1}|s_k|²) / |s₁|`.
    pub off_mode: Option<f64>,
    /// θ-variation of `X² + Y²` along the boundary circles.
    pub centering: Option<f64>,
    pub reconstruction: Option<f64>,
    /// `|A − a|` against the critical catenoid.
    pub critical_height: Option<f64>,
    /// `|R − r₂|` against the critical catenoid.
    pub critical_radius: Option<f64>,
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub failed_stage: Option<String>,
    pub message: Option<String>,
    pub tolerance: f64,
    pub mode: DerivativeMode,
    /// Conformal radius `R` of the domain.
    #[serde(rename = "R")]
    pub outer_radius: f64,
    #[serde(rename = "A")]
    pub height: Option<f64>,
    pub theta0: Option<f64>,
    pub m: Option<i32>,
    pub c: Option<Complex64>,
    /// `|c|`.
    pub l: Option<f64>,
    /// `arg c`.
    pub beta: Option<f64>,
    pub c1: Option<f64>,
    #[serde(rename = "Z0")]
    pub z0: Option<f64>,
    pub stages: StageResiduals,
}

impl ClassificationReport {
    fn fail(&mut self, verdict: Verdict, stage: &str, message: impl Into<String>) {
        self.verdict = verdict;
        self.failed_stage = Some(stage.to_string());
        self.message = Some(message.into());
    }
}

/// Weierstrass data estimated from a surface, in a frame where the
/// boundary-circle centers lie on the `Z` axis.
#[derive(Debug, Clone)]
pub struct EstimatedData {
    pub data: WeierstrassData,
    /// Rotation taking the input surface to the aligned frame.
    pub rotation: Matrix3<f64>,
    pub aligned: SurfaceGrid,
    pub center_alignment: f64,
    pub gauss_fit: Option<f64>,
    pub data_alignment: Option<f64>,
    pub phase_spread: f64,
}

fn stereographic(n: &Vector3<f64>) -> Complex64 {
    Complex64::new(n.x, n.y) / (1.0 - n.z)
}

fn inverse_stereographic(g: Complex64) -> Vector3<f64> {
    let q = g.norm_sqr();
    Vector3::new(2.0 * g.re, 2.0 * g.im, q - 1.0) / (q + 1.0)
}

/// SU(2) matrix `(a, b; c, d)` whose Möbius map realizes the rotation `t` on
/// stereographic coordinates: `σ(t n) = (a σ(n) + b)/(c σ(n) + d)`.
pub(crate) fn rotation_mobius(t: &Matrix3<f64>) -> [Complex64; 4] {
    let rot = Rotation3::from_matrix(t);
    let (axis, angle) = match rot.axis_angle() {
        Some((axis, angle)) => (axis.into_inner(), angle),
        None => (Vector3::z(), 0.0),
    };
    let (s, c) = (angle / 2.0).sin_cos();
    let i = Complex64::i();
    // cos(φ/2) I + i sin(φ/2) (n_x σ_x − n_y σ_y + n_z σ_z), σ the Pauli matrices
    [
        c + i * s * axis.z,
        i * s * Complex64::new(axis.x, axis.y),
        i * s * Complex64::new(axis.x, -axis.y),
        c - i * s * axis.z,
    ]
}

fn raw_normal(p: &Partials) -> Result<Vector3<f64>> {
    let cross = p.u_r.cross(&p.u_theta);
    let len = cross.norm();
    if !(len >= DEGENERACY_THRESHOLD) {
        return Err(Error::Degenerate(format!("|U_r × U_θ| = {len:e}")));
    }
    Ok(cross / len)
}

fn half_turn_x() -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0)
}

/// Rotation bringing the boundary-circle centers onto the `Z` axis with the
/// outer center on the positive side.
fn axis_alignment(s: &SurfaceGrid) -> Result<(Matrix3<f64>, f64)> {
    let outer = fit_plane_circle(&BoundaryCurve::from_surface(s, Rim::Outer)?)?;
    let inner = fit_plane_circle(&BoundaryCurve::from_surface(s, Rim::Inner)?)?;
    let axis = outer.center() - inner.center();
    let axis = if axis.norm() > 1e-9 {
        axis
    } else {
        outer.normal()
    };
    let q = Rotation3::rotation_between(&axis, &Vector3::z())
        .map(|r| r.into_inner())
        .unwrap_or_else(half_turn_x);
    let off = |c: Vector3<f64>| {
        let v = q * c;
        v.x.hypot(v.y)
    };
    Ok((q, off(outer.center()).max(off(inner.center()))))
}

/// Least-squares Laurent model of node values `g(r_j e^{iθ_k})`.
fn fit_laurent(s: &SurfaceGrid, values: &[Complex64], threshold: f64) -> (LaurentPolynomial, f64) {
    let grid = s.grid();
    let (nr, nt) = (grid.n_r, grid.n_theta);
    let rows: Vec<Vec<Complex64>> = (0..nr)
        .map(|j| fourier_modes(&values[j * nt..(j + 1) * nt]))
        .collect();
    let half = (nt / 2) as i64;
    let (inner, outer) = (grid.spec.inner_radius, grid.spec.outer_radius);
    let mut scaled = Vec::new();
    for k in -half + 1..half {
        let reference = if k >= 0 { outer } else { inner };
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, modes) in rows.iter().enumerate() {
            let w = (grid.radius(j) / reference).powi(k as i32);
            num += modes[fft_index(k, nt)] * w;
            den += w * w;
        }
        scaled.push((k, num / den, reference));
    }
    let scale = scaled.iter().map(|t| t.1.norm()).fold(0.0, f64::max);
    let kept: Vec<&(i64, Complex64, f64)> = scaled
        .iter()
        .filter(|t| t.1.norm() > threshold * scale)
        .collect();
    let poly = match (kept.first(), kept.last()) {
        (Some(lo), Some(hi)) => LaurentPolynomial::new(
            lo.0,
            (lo.0..=hi.0)
                .map(|k| {
                    let (_, b, reference) = scaled[(k + half - 1) as usize];
                    if b.norm() > threshold * scale {
                        b / reference.powi(k as i32)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        ),
        _ => LaurentPolynomial::zero(),
    };
    let size = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let misfit = (0..nr)
        .flat_map(|j| (0..nt).map(move |k| (j, k)))
        .map(|(j, k)| (poly.eval(grid.node(j, k)) - values[grid.index(j, k)]).norm())
        .fold(0.0, f64::max)
        / size.max(f64::MIN_POSITIVE);
    (poly, misfit)
}

/// Estimate `(g, A, θ₀)` of a surface.
///
/// The surface is rotated so its boundary-circle centers sit on the `Z`
/// axis. With `data`, the supplied Gauss map is carried into that frame
/// after matching its normals to the surface normals; otherwise the Gauss
/// map is the stereographic projection of the surface normal `U_r × U_θ`,
/// fitted by a Laurent series. `θ₀` is read from `2 f g_z z² = A e^{iθ₀}`,
/// or taken from `data` when supplied.
pub fn estimate_weierstrass_data(
    s: &SurfaceGrid,
    data: Option<&WeierstrassData>,
    height: f64,
    tol: f64,
) -> Result<EstimatedData> {
    let (mut rotation, center_alignment) = axis_alignment(s)?;
    let mut aligned = s.transformed(rotation, Vector3::zeros());
    let grid = *s.grid();
    let mut field = aligned.partials_field()?;
    let mut normals: Vec<Vector3<f64>> = field.iter().map(raw_normal).collect::<Result<_>>()?;

    let (gauss, gauss_fit, data_alignment) = match data {
        Some(d) => {
            let data_normals: Vec<Vector3<f64>> = (0..grid.len())
                .map(|i| {
                    inverse_stereographic(d.g.eval(grid.node(i / grid.n_theta, i % grid.n_theta)).0)
                })
                .collect();
            let h: Matrix3<f64> = data_normals
                .iter()
                .zip(&normals)
                .map(|(a, b)| a * b.transpose())
                .sum();
            let svd = h.svd(true, true);
            let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
            let mut fix = Matrix3::identity();
            fix[(2, 2)] = (vt.transpose() * u.transpose()).determinant().signum();
            let p = vt.transpose() * fix * u.transpose();
            let misfit = data_normals
                .iter()
                .zip(&normals)
                .map(|(a, b)| (p * a - b).norm())
                .fold(0.0, f64::max);
            let [a, b, c, dd] = rotation_mobius(&p);
            let g = d.g.clone();
            let map = GaussMap::analytic(move |z| {
                let (g0, gz) = g.eval(z);
                let den = c * g0 + dd;
                ((a * g0 + b) / den, gz / (den * den))
            });
            (map, None, Some(misfit))
        }
        None => {
            let mut values: Vec<Complex64> = normals.iter().map(stereographic).collect();
            let largest = values.iter().map(|g| g.norm()).fold(0.0, f64::max);
            if !(largest <= CHART_SWAP) {
                let flip = half_turn_x();
                rotation = flip * rotation;
                aligned = s.transformed(rotation, Vector3::zeros());
                field = aligned.partials_field()?;
                normals = normals.iter().map(|n| flip * n).collect();
                values = normals.iter().map(stereographic).collect();
            }
            let threshold = if s.mode() == DerivativeMode::Analytic {
                1e-13
            } else {
                (1e-4 * tol).max(1e-13)
            };
            let (poly, misfit) = fit_laurent(s, &values, threshold);
            (GaussMap::Laurent(poly), Some(misfit), None)
        }
    };

    let mut phases = Vec::with_capacity(grid.len());
    for (i, p) in field.iter().enumerate() {
        let (j, k) = (i / grid.n_theta, i % grid.n_theta);
        let (r, theta) = (grid.radius(j), grid.theta(k));
        let z = Complex64::from_polar(r, theta);
        let e = Complex64::from_polar(1.0, -theta);
        let phi: [Complex64; 3] =
            std::array::from_fn(|c| e * Complex64::new(p.u_r[c], -p.u_theta[c] / r));
        let f = (phi[0] - Complex64::i() * phi[1]) / 2.0;
        let gz = gauss.eval(z).1;
        phases.push(2.0 * f * gz * z * z / height);
    }
    let mean = phases.iter().sum::<Complex64>() / phases.len() as f64;
    let theta0 = match data {
        Some(d) => d.theta0,
        None => mean.arg(),
    };
    let reference = Complex64::from_polar(1.0, theta0);
    let phase_spread = phases
        .iter()
        .map(|p| (p - reference).norm())
        .fold(0.0, f64::max);
    Ok(EstimatedData {
        data: WeierstrassData::new(gauss, height, theta0)?,
        rotation,
        aligned,
        center_alignment,
        gauss_fit,
        data_alignment,
        phase_spread,
    })
}

/// Run the classification pipeline on a surface.
///
/// `tol` defaults to [`ANALYTIC_TOLERANCE`] or [`NUMERIC_TOLERANCE`]
/// according to the derivative mode of `s`.
pub fn classify(
    s: &SurfaceGrid,
    data: Option<&WeierstrassData>,
    tol: Option<f64>,
) -> Result<ClassificationReport> {
    let tol = tol.unwrap_or(match s.mode() {
        DerivativeMode::Analytic => ANALYTIC_TOLERANCE,
        DerivativeMode::Numeric => NUMERIC_TOLERANCE,
    });
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let grid = *s.grid();
    let ln_r = grid.spec.log_width() / 2.0;
    let mut report = ClassificationReport {
        verdict: Verdict::Inconsistent,
        failed_stage: None,
        message: None,
        tolerance: tol,
        mode: s.mode(),
        outer_radius: ln_r.exp(),
        height: None,
        theta0: None,
        m: None,
        c: None,
        l: None,
        beta: None,
        c1: None,
        z0: None,
        stages: StageResiduals::default(),
    };
    run_pipeline(s, data, tol, &mut report)?;
    Ok(report)
}

fn check(report: &mut ClassificationReport, stage: &str, value: f64, tol: f64) -> bool {
    if value <= tol {
        true
    } else {
        report.fail(
            Verdict::Inconsistent,
            stage,
            format!("{stage} residual {value:e} exceeds {tol:e}"),
        );
        false
    }
}

fn run_pipeline(
    s: &SurfaceGrid,
    data: Option<&WeierstrassData>,
    tol: f64,
    report: &mut ClassificationReport,
) -> Result<()> {
    let grid = *s.grid();
    let ln_r = grid.spec.log_width() / 2.0;
    let st = &mut report.stages;

    st.conformality = Some(conformality_residual(s)?);
    st.harmonicity = Some(harmonicity_residual(s)?);
    let pre = st.conformality.unwrap().max(st.harmonicity.unwrap());
    if !check(report, "preconditions", pre, tol) {
        return Ok(());
    }

    let fb = free_boundary_residual(s)?;
    report.stages.sphere = Some(fb.sphere_residual);
    report.stages.orthogonality = Some(fb.orthogonality_residual);
    if fb.sphere_residual > tol || fb.orthogonality_residual > tol {
        report.fail(
            Verdict::NotFreeBoundary,
            "free_boundary",
            format!(
                "sphere residual {:e}, orthogonality residual {:e}",
                fb.sphere_residual, fb.orthogonality_residual
            ),
        );
        return Ok(());
    }

    let hopf = hopf_summary(s)?;
    let mean = Complex64::new(hopf.mean[0], hopf.mean[1]).norm();
    let spread = hopf.spread / mean.max(1.0);
    report.stages.hopf_spread = Some(spread);
    if !check(report, "hopf", spread, tol) {
        return Ok(());
    }
    let height = hopf.height();
    report.height = Some(height);
    if height < tol {
        report.fail(
            Verdict::Inconsistent,
            "hopf",
            "vanishing Hopf constant: the annulus is flat",
        );
        return Ok(());
    }

    let est = match estimate_weierstrass_data(s, data, height, tol) {
        Ok(est) => est,
        Err(e) => {
            report.fail(Verdict::Inconsistent, "gauss_map", e.to_string());
            return Ok(());
        }
    };
    report.stages.center_alignment = Some(est.center_alignment);
    report.stages.gauss_fit = est.gauss_fit;
    report.stages.data_alignment = est.data_alignment;
    report.stages.phase_spread = Some(est.phase_spread);
    report.theta0 = Some(est.data.theta0);
    if !check(report, "alignment", est.center_alignment, tol)
        || !check(report, "gauss_map", est.gauss_fit.unwrap_or(0.0), tol)
        || !check(report, "data", est.data_alignment.unwrap_or(0.0), tol)
        || !check(report, "phase", est.phase_spread, tol)
    {
        return Ok(());
    }

    let d = &est.data;
    let quotients = match d.quotient_series(&grid.spec) {
        Ok(q) => q,
        Err(e) => {
            report.fail(Verdict::Inconsistent, "quotients", e.to_string());
            return Ok(());
        }
    };
    let phase = Complex64::from_polar(1.0, d.theta0);
    let (p1, q1, s1) = (
        phase * quotients.p.coeff(1),
        phase * quotients.q.coeff(1),
        phase * quotients.s.coeff(1),
    );
    report.stages.reality_xy = Some((p1 + q1.conj()).norm());
    report.stages.reality_z = Some(s1.im.abs());
    if !check(
        report,
        "reality",
        (p1 + q1.conj()).norm().max(s1.im.abs()),
        tol,
    ) {
        return Ok(());
    }

    let aligned = &est.aligned;
    let outer_z: Vec<f64> = aligned.row(grid.outer_row()).iter().map(|v| v.z).collect();
    let inner_z: Vec<f64> = aligned.row(0).iter().map(|v| v.z).collect();
    let vanishing = fourier_vanishing_check(&outer_z, &inner_z, ln_r.exp(), height, s1.re)?;
    report.stages.fourier_outer = Some(vanishing.max_outer);
    report.stages.fourier_inner = Some(vanishing.max_inner);
    report.stages.z_gap = Some(vanishing.gap_residual);
    report.z0 = Some(vanishing.z0);
    if !check(
        report,
        "fourier",
        vanishing
            .max_outer
            .max(vanishing.max_inner)
            .max(vanishing.gap_residual),
        tol,
    ) {
        return Ok(());
    }

    let recovery = match recover_gauss_map(&quotients.s, |z| d.g.eval(z).0, tol) {
        Ok(r) => r,
        Err(e) => {
            report.fail(Verdict::Inconsistent, "recovery", e.to_string());
            return Ok(());
        }
    };
    report.m = Some(recovery.m);
    report.c = Some(recovery.c);
    report.l = Some(recovery.c.norm());
    report.beta = Some(recovery.c.arg());
    report.c1 = Some(recovery.c1.re);
    let off_mode = recovery.off_mode_energy.sqrt() / recovery.c1.norm();
    report.stages.integrality = Some(recovery.integrality);
    report.stages.off_mode = Some(off_mode);
    if !check(report, "recovery", off_mode, tol) {
        return Ok(());
    }
    if recovery.m.abs() >= 2 {
        report.fail(
            Verdict::NotEmbeddable,
            "recovery",
            format!("g = c z^{} with |m| ≥ 2 is not embedded", recovery.m),
        );
        return Ok(());
    }

    let centering = [0, grid.outer_row()]
        .iter()
        .map(|&j| {
            let rho2: Vec<f64> = aligned
                .row(j)
                .iter()
                .map(|v| v.x * v.x + v.y * v.y)
                .collect();
            let mean = rho2.iter().sum::<f64>() / rho2.len() as f64;
            rho2.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report.stages.centering = Some(centering);
    if !check(report, "centering", centering, tol) {
        return Ok(());
    }

    let model_data = WeierstrassData::monomial(recovery.c, recovery.m, height, d.theta0)?;
    let model = weierstrass_surface(&model_data, &grid.spec, Base::Centered)?;
    let distance = reconstruction_distance(aligned, &model);
    report.stages.reconstruction = Some(distance);
    if !check(report, "reconstruction", distance, tol) {
        return Ok(());
    }

    let critical = solve_catenoid_params(1e-12)?;
    let dh = (height - critical.a).abs();
    let dr = (ln_r.exp() - critical.r2).abs();
    report.stages.critical_height = Some(dh);
    report.stages.critical_radius = Some(dr);
    let phase_off = d.theta0.sin().abs();
    if !check(report, "critical_match", dh.max(dr).max(phase_off), tol) {
        return Ok(());
    }
    report.verdict = Verdict::CriticalCatenoid;
    Ok(())
}

/// Max node distance after the best rotation about `Z` and shift along `Z`.
fn reconstruction_distance(s: &SurfaceGrid, model: &dyn AnalyticSurface) -> f64 {
    let grid = s.grid();
    let pairs: Vec<(Vector3<f64>, Vector3<f64>)> = (0..grid.n_r)
        .flat_map(|j| (0..grid.n_theta).map(move |k| (j, k)))
        .map(|(j, k)| (s.value(j, k), model.position(grid.radius(j), grid.theta(k))))
        .collect();
    let cross: Complex64 = pairs
        .iter()
        .map(|(u, v)| Complex64::new(v.x, v.y).conj() * Complex64::new(u.x, u.y))
        .sum();
    let beta = if cross.norm() > 0.0 { cross.arg() } else { 0.0 };
    let shift = pairs.iter().map(|(u, v)| u.z - v.z).sum::<f64>() / pairs.len() as f64;
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), beta);
    pairs
        .iter()
        .map(|(u, v)| (u - (rot * v + Vector3::new(0.0, 0.0, shift))).norm())
        .fold(0.0, f64::max)
}
