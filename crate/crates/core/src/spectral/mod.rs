//! Laurent and Fourier machinery for the classification of free boundary
//! minimal annuli: coefficient extraction, the vanishing of the non-constant
//! Fourier modes of the height on the boundary circles, recovery of a
//! monomial Gauss map and the end-to-end [`classify`] pipeline.

mod classify;
mod laurent;

pub use classify::{
    classify, estimate_weierstrass_data, ClassificationReport, EstimatedData, StageResiduals,
    Verdict, ANALYTIC_TOLERANCE, NUMERIC_TOLERANCE,
};
pub use laurent::{laurent_extract, laurent_extract_boundary, LaurentPolynomial, LaurentSeries};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::fourier_modes;

/// Fourier content of the height `Z` on the two boundary circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    /// `|Ẑ_k|` on the outer circle for `k = 1..n/2`.
    pub outer_modes: Vec<f64>,
    pub inner_modes: Vec<f64>,
    pub max_outer: f64,
    pub max_inner: f64,
    /// Mean of `Z` on the outer circle minus the mean on the inner circle.
    pub gap: f64,
    /// `2 A c₁ ln R`.
    pub expected_gap: f64,
    pub gap_residual: f64,
    /// Mid-level `(Z̄_outer + Z̄_inner)/2`.
    pub z0: f64,
}

fn real_modes(samples: &[f64]) -> (f64, Vec<f64>) {
    let values: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let modes = fourier_modes(&values);
    let n = samples.len();
    (modes[0].re, (1..=n / 2).map(|k| modes[k].norm()).collect())
}

/// Check that `Z` has no `k ≠ 0` Fourier modes on either boundary circle and
/// that the jump between the circles is `2 A c₁ ln R`.
pub fn fourier_vanishing_check(
    z_outer: &[f64],
    z_inner: &[f64],
    outer_radius: f64,
    height: f64,
    c1: f64,
) -> Result<VanishingReport> {
    if z_outer.len() != z_inner.len() || z_outer.len() < 2 {
        return Err(Error::Parameter(
            "boundary samples must be non-trivial and of equal length".to_string(),
        ));
    }
    let (mean_o, outer_modes) = real_modes(z_outer);
    let (mean_i, inner_modes) = real_modes(z_inner);
    let gap = mean_o - mean_i;
    let expected_gap = 2.0 * height * c1 * outer_radius.ln();
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(VanishingReport {
        max_outer: max(&outer_modes),
        max_inner: max(&inner_modes),
        outer_modes,
        inner_modes,
        gap,
        expected_gap,
        gap_residual: (gap - expected_gap).abs(),
        z0: 0.5 * (mean_o + mean_i),
    })
}

/// A monomial Gauss map `g = c z^m` read off the series of `g/g_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussMapRecovery {
    pub m: i32,
    pub c: Complex64,
    /// `s₁`, which equals `1/m`.
    pub c1: Complex64,
    /// `|1/s₁ − m|`.
    pub integrality: f64,
    /// `Σ_{k≠1} |s_k|²`.
    pub off_mode_energy: f64,
}

/// Recover `(m, c)` from the Laurent series of `g/g_z` and an evaluator of
/// `g` (used at `z = 1` for `c`).
pub fn recover_gauss_map(
    s: &LaurentPolynomial,
    g: impl Fn(Complex64) -> Complex64,
    tol: f64,
) -> Result<GaussMapRecovery> {
    let c1 = s.coeff(1);
    if c1.norm() < 1e-12 {
        return Err(Error::Flat(
            "g/g_z has no linear term, so g is constant and the annulus is flat".to_string(),
        ));
    }
    let inv = 1.0 / c1.re;
    let m = inv.round();
    let integrality = (inv - m).abs();
    if integrality > tol || m == 0.0 || !m.is_finite() {
        return Err(Error::Inconsistent(format!(
            "1/s₁ = {inv} is not an integer within {tol:e}"
        )));
    }
    let off_mode_energy = s
        .terms()
        .filter(|(k, _)| *k != 1)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    Ok(GaussMapRecovery {
        m: m as i32,
        c: g(Complex64::new(1.0, 0.0)),
        c1,
        integrality,
        off_mode_energy,
    })
}
