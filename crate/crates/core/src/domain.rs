//! Annulus domains, polar grids and circle samplers.
//!
//! Points of the annulus are written `z = r e^{iθ}`. Grids are uniform in the
//! logarithmic chart `w = ln z = ln r + iθ`, so radial finite differences use
//! a constant step and the angular direction is exactly periodic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A round annulus `inner_radius ≤ |z| ≤ outer_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl AnnulusSpec {
    /// The conformal normal form `R⁻¹ ≤ |z| ≤ R`.
    pub fn symmetric(outer_radius: f64) -> Result<Self> {
        if !(outer_radius.is_finite() && outer_radius > 1.0) {
            return Err(Error::Parameter(format!(
                "outer radius must be finite and > 1, got {outer_radius}"
            )));
        }
        Ok(Self {
            inner_radius: 1.0 / outer_radius,
            outer_radius,
        })
    }

    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && outer_radius.is_finite())
            || inner_radius <= 0.0
            || outer_radius <= inner_radius
        {
            return Err(Error::Parameter(format!(
                "annulus radii must satisfy 0 < inner < outer, got ({inner_radius}, {outer_radius})"
            )));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (self.inner_radius * self.outer_radius - 1.0).abs() < 1e-12
    }

    /// Geometric mean of the two radii; `1` for the symmetric annulus.
    pub fn core_radius(&self) -> f64 {
        (self.inner_radius * self.outer_radius).sqrt()
    }

    pub fn log_width(&self) -> f64 {
        (self.outer_radius / self.inner_radius).ln()
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        let slack = 1e-12 * self.outer_radius;
        r >= self.inner_radius - slack && r <= self.outer_radius + slack
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        if self.contains_radius(r) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "radius {r} not in [{}, {}]",
                self.inner_radius, self.outer_radius
            )))
        }
    }
}

/// A tensor grid on the annulus: `n_r` radial nodes, uniform in `ln r` and
/// including both boundary circles, times `n_theta` angular nodes
/// `θ_k = 2πk/n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub spec: AnnulusSpec,
    pub n_r: usize,
    pub n_theta: usize,
}

/// Build a polar grid. `n_r ≥ 3`; `n_theta ≥ 8` and a power of two.
pub fn make_grid(spec: AnnulusSpec, n_r: usize, n_theta: usize) -> Result<PolarGrid> {
    if n_r < 3 {
        return Err(Error::Parameter(format!(
            "n_r must be at least 3, got {n_r}"
        )));
    }
    if n_theta < 8 || !n_theta.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "n_theta must be a power of two and at least 8, got {n_theta}"
        )));
    }
    Ok(PolarGrid { spec, n_r, n_theta })
}

impl PolarGrid {
    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacing of the radial nodes in `ln r`.
    pub fn log_step(&self) -> f64 {
        self.spec.log_width() / (self.n_r - 1) as f64
    }

    pub fn log_radius(&self, j: usize) -> f64 {
        if j == self.n_r - 1 {
            return self.spec.outer_radius.ln();
        }
        self.spec.inner_radius.ln() + j as f64 * self.log_step()
    }

    pub fn radius(&self, j: usize) -> f64 {
        match j {
            0 => self.spec.inner_radius,
            _ if j == self.n_r - 1 => self.spec.outer_radius,
            _ => self.log_radius(j).exp(),
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n_r).map(|j| self.radius(j)).collect()
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_theta as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta).map(|k| self.theta(k)).collect()
    }

    pub fn node(&self, j: usize, k: usize) -> Complex64 {
        Complex64::from_polar(self.radius(j), self.theta(k))
    }

    /// Row-major (radial, then angular) storage index.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_theta + k
    }

    pub fn outer_row(&self) -> usize {
        self.n_r - 1
    }
}

/// `n` equally spaced points `ρ e^{2πik/n}` in counterclockwise order.
///
/// `n` must be a power of two and at least 4.
pub fn circle_samples(rho: f64, n: usize) -> Result<Vec<Complex64>> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Parameter(format!(
            "circle radius must be positive, got {rho}"
        )));
    }
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "sample count must be a power of two and at least 4, got {n}"
        )));
    }
    Ok((0..n)
        .map(|k| Complex64::from_polar(rho, 2.0 * PI * k as f64 / n as f64))
        .collect())
}

/// Periodic trapezoid rule for `∮_{|z|=ρ} h(z) dz` with `n` nodes.
pub fn circle_contour_integral<F>(rho: f64, n: usize, h: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let points = circle_samples(rho, n)?;
    let weight = 2.0 * PI / n as f64;
    Ok(points
        .iter()
        .map(|&z| h(z) * Complex64::i() * z)
        .sum::<Complex64>()
        * weight)
}
