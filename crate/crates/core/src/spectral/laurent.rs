use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{circle_samples, AnnulusSpec};
use crate::error::{Error, Result};
use crate::numerics::{fft_index, fourier_modes};

/// A finite Laurent polynomial `Σ_{k=k_min}^{k_max} c_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    pub k_min: i64,
    pub coeffs: Vec<Complex64>,
}

impl LaurentPolynomial {
    pub fn new(k_min: i64, coeffs: Vec<Complex64>) -> Self {
        Self { k_min, coeffs }
    }

    pub fn monomial(c: Complex64, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    pub fn zero() -> Self {
        Self::new(0, Vec::new())
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let i = k - self.k_min;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_min + i as i64, c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| c * z.powi(k as i32)).sum()
    }

    /// Value of the derivative `Σ k c_k z^{k−1}`.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.terms()
            .filter(|(k, _)| *k != 0)
            .map(|(k, c)| c * k as f64 * z.powi(k as i32 - 1))
            .sum()
    }

    /// Value of the second derivative.
    pub fn eval_second_derivative(&self, z: Complex64) -> Complex64 {
        self.terms()
            .filter(|(k, _)| *k != 0 && *k != 1)
            .map(|(k, c)| c * (k * (k - 1)) as f64 * z.powi(k as i32 - 2))
            .sum()
    }

    /// Shift every exponent by `by` (multiplication by `z^by`).
    pub fn shifted(&self, by: i64) -> Self {
        Self::new(self.k_min + by, self.coeffs.clone())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(self.k_min, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Difference `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.coeffs.is_empty() {
            return other.scaled(Complex64::new(sign, 0.0));
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        Self::new(
            lo,
            (lo..=hi)
                .map(|k| self.coeff(k) + other.coeff(k) * sign)
                .collect(),
        )
    }

    /// Drop leading and trailing coefficients with `|c_k| ρ_k^k` at most
    /// `threshold`, where `ρ_k` is `outer` for `k ≥ 0` and `inner` otherwise.
    pub fn trimmed(&self, inner: f64, outer: f64, threshold: f64) -> Self {
        let weight = |k: i64, c: Complex64| {
            let rho = if k >= 0 { outer } else { inner };
            c.norm() * rho.powi(k as i32)
        };
        let keep: Vec<i64> = self
            .terms()
            .filter(|&(k, c)| weight(k, c) > threshold)
            .map(|(k, _)| k)
            .collect();
        match (keep.first(), keep.last()) {
            (Some(&lo), Some(&hi)) => Self::new(lo, (lo..=hi).map(|k| self.coeff(k)).collect()),
            _ => Self::zero(),
        }
    }
}

/// Laurent coefficients extracted from samples, with the evidence that the
/// extraction is trustworthy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub series: LaurentPolynomial,
    /// The two circles the coefficients were computed or checked on.
    pub radii: (f64, f64),
    /// Disagreement between the two circles, scaled as described by the
    /// producing function.
    pub discrepancy: f64,
    /// Largest relative coefficient outside the returned index range.
    pub tail: f64,
}

impl LaurentSeries {
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.series.coeff(k)
    }

    pub fn k_min(&self) -> i64 {
        self.series.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.series.k_max()
    }
}

/// Coefficients `c_k`, `k ∈ (−n/2, n/2)`, from `n` samples of `h` on the
/// circle of radius `rho`.
fn circle_coefficients<F>(h: &F, rho: f64, n: usize) -> Result<Vec<(i64, Complex64)>>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let points = circle_samples(rho, n)?;
    let values: Vec<Complex64> = points.iter().map(|&z| h(z)).collect();
    if let Some(i) = values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::Analyticity(format!(
            "non-finite value at z = {}",
            points[i]
        )));
    }
    let modes = fourier_modes(&values);
    let half = (n / 2) as i64;
    Ok((-half + 1..half)
        .map(|k| (k, modes[fft_index(k, n)] * rho.powi(-(k as i32))))
        .collect())
}

fn sample_count(k_range: &std::ops::RangeInclusive<i64>) -> usize {
    let reach = k_range.start().abs().max(k_range.end().abs()) as usize;
    (4 * (reach + 1)).next_power_of_two().max(256)
}

/// Laurent coefficients of `h` on `spec` for `k ∈ k_range`.
///
/// Coefficients are Fourier modes of `h(ρe^{iθ})` scaled by `ρ^{−k}` on the
/// core circle `ρ₁`, then recomputed on `ρ₂ = √(ρ₁·outer)`. The recorded
/// discrepancy is `max_k |c_k(ρ₁) − c_k(ρ₂)| · min(1, ρ₂^k)`, which keeps
/// aliasing noise in strongly negative modes from dominating.
pub fn laurent_extract<F>(
    h: F,
    spec: &AnnulusSpec,
    k_range: std::ops::RangeInclusive<i64>,
) -> Result<LaurentSeries>
where
    F: Fn(Complex64) -> Complex64,
{
    if k_range.is_empty() {
        return Err(Error::Parameter("empty coefficient range".to_string()));
    }
    let n = sample_count(&k_range);
    let rho1 = spec.core_radius();
    let rho2 = (rho1 * spec.outer_radius).sqrt();
    let first = circle_coefficients(&h, rho1, n)?;
    let second = circle_coefficients(&h, rho2, n)?;

    let scale = first.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let mut discrepancy: f64 = 0.0;
    let mut outside: f64 = 0.0;
    let mut coeffs = Vec::new();
    for ((k, c1), (_, c2)) in first.iter().zip(&second) {
        let weight = rho2.powi(*k as i32).min(1.0);
        discrepancy = discrepancy.max((c1 - c2).norm() * weight);
        if k_range.contains(k) {
            coeffs.push(*c1);
        } else {
            outside = outside.max(c1.norm());
        }
    }
    let series = LaurentPolynomial::new(*k_range.start(), coeffs);
    let tail = if scale > 0.0 { outside / scale } else { 0.0 };
    if discrepancy > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Analyticity(format!(
            "coefficients disagree between radii {rho1} and {rho2}: {discrepancy:e} \
             (scale {scale:e})"
        )));
    }
    Ok(LaurentSeries {
        series,
        radii: (rho1, rho2),
        discrepancy,
        tail,
    })
}

/// Laurent coefficients of `h` accurate up to both boundary circles.
///
/// Non-negative modes are read on the outer circle and negative modes on the
/// inner circle, so the truncated series reproduces `h` on the whole closed
/// annulus. The sample count doubles from 64 up to 4096 until the modes in
/// the top eighth of the band weigh less than `tol` relative to the largest
/// term. Coefficients whose weight on the boundary is below `1e-15` of the
/// largest are dropped. The discrepancy is the largest relative mismatch
/// between the series and `h` on the core circle.
pub fn laurent_extract_boundary<F>(h: F, spec: &AnnulusSpec, tol: f64) -> Result<LaurentSeries>
where
    F: Fn(Complex64) -> Complex64,
{
    let (inner, outer) = (spec.inner_radius, spec.outer_radius);
    let mut n = 64;
    loop {
        let on_outer = circle_coefficients(&h, outer, n)?;
        let on_inner = circle_coefficients(&h, inner, n)?;
        let half = (n / 2) as i64;
        let terms: Vec<(i64, Complex64)> = on_outer
            .iter()
            .zip(&on_inner)
            .map(|(&(k, co), &(_, ci))| (k, if k >= 0 { co } else { ci }))
            .collect();
        let weight = |k: i64, c: Complex64| {
            let rho = if k >= 0 { outer } else { inner };
            c.norm() * rho.powi(k as i32)
        };
        let scale = terms.iter().map(|&(k, c)| weight(k, c)).fold(0.0, f64::max);
        let band = (half * 3) / 4;
        let tail = terms
            .iter()
            .filter(|(k, _)| k.abs() >= band)
            .map(|&(k, c)| weight(k, c))
            .fold(0.0, f64::max)
            / scale.max(f64::MIN_POSITIVE);
        if tail < tol || n >= 4096 {
            if tail >= tol {
                return Err(Error::Resolution(format!(
                    "Laurent tail {tail:e} above {tol:e} with {n} samples"
                )));
            }
            let full = LaurentPolynomial::new(-half + 1, terms.iter().map(|t| t.1).collect());
            let series = full.trimmed(inner, outer, 1e-15 * scale);
            let rho = spec.core_radius();
            let check = circle_samples(rho, 64)?;
            let mut discrepancy: f64 = 0.0;
            let mut size: f64 = 0.0;
            for z in check {
                let v = h(z);
                size = size.max(v.norm());
                discrepancy = discrepancy.max((series.eval(z) - v).norm());
            }
            let discrepancy = discrepancy / size.max(f64::MIN_POSITIVE);
            if discrepancy > 1e-8 {
                return Err(Error::Analyticity(format!(
                    "boundary-circle series misses the core circle by {discrepancy:e}"
                )));
            }
            return Ok(LaurentSeries {
                series,
                radii: (inner, outer),
                discrepancy,
                tail,
            });
        }
        n *= 2;
    }
}
