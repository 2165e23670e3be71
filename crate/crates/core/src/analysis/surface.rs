use std::path::Path;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{make_grid, AnnulusSpec, PolarGrid};
use crate::error::{Error, Result};
use crate::numerics::{uniform_stencils, PeriodicDifferentiator};

/// Default accuracy order of the radial finite-difference stencils.
pub const DEFAULT_FD_ORDER: usize = 4;

/// First and second partial derivatives of an immersion in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Partials {
    pub u_r: Vector3<f64>,
    pub u_theta: Vector3<f64>,
    pub u_rr: Vector3<f64>,
    pub u_rtheta: Vector3<f64>,
    pub u_thetatheta: Vector3<f64>,
}

impl Partials {
    fn transformed(&self, linear: &Matrix3<f64>) -> Self {
        Self {
            u_r: linear * self.u_r,
            u_theta: linear * self.u_theta,
            u_rr: linear * self.u_rr,
            u_rtheta: linear * self.u_rtheta,
            u_thetatheta: linear * self.u_thetatheta,
        }
    }
}

/// An immersion of the annulus with closed-form derivatives.
///
/// Implementations must be callable from several threads at once.
pub trait AnalyticSurface: Send + Sync {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64>;
    fn partials(&self, r: f64, theta: f64) -> Partials;
}

/// How a [`SurfaceGrid`] obtains derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    Numeric,
}

#[derive(Clone)]
enum DerivativeSource {
    Numeric { order: usize },
    Analytic(Arc<dyn AnalyticSurface>),
}

/// Samples `U(r_j, θ_k)` of an immersion on a polar grid.
///
/// In numeric mode, θ-derivatives are spectral and r-derivatives are finite
/// differences in `ln r`; in analytic mode derivatives come from the
/// underlying [`AnalyticSurface`].
#[derive(Clone)]
pub struct SurfaceGrid {
    grid: PolarGrid,
    values: Vec<Vector3<f64>>,
    source: DerivativeSource,
}

impl std::fmt::Debug for SurfaceGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceGrid")
            .field("grid", &self.grid)
            .field("mode", &self.mode())
            .finish()
    }
}

impl SurfaceGrid {
    /// Numeric-mode grid from row-major values (`n_r` rows of `n_theta`).
    pub fn from_values(grid: PolarGrid, values: Vec<Vector3<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "values: expected {} samples (n_r × n_theta), got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::Format(format!(
                "values: non-finite sample at row {}, column {}",
                i / grid.n_theta,
                i % grid.n_theta
            )));
        }
        Ok(Self {
            grid,
            values,
            source: DerivativeSource::Numeric {
                order: DEFAULT_FD_ORDER,
            },
        })
    }

    /// Numeric-mode grid sampled from a position function.
    pub fn sample<F>(grid: PolarGrid, position: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vector3<f64> + Sync,
    {
        let values = sample_rows(&grid, &position);
        Self::from_values(grid, values)
    }

    /// Analytic-mode grid backed by `surface`.
    pub fn from_analytic(grid: PolarGrid, surface: Arc<dyn AnalyticSurface>) -> Result<Self> {
        let values = sample_rows(&grid, &|r, t| surface.position(r, t));
        let mut s = Self::from_values(grid, values)?;
        s.source = DerivativeSource::Analytic(surface);
        Ok(s)
    }

    /// Switch a numeric grid to radial stencils of another (even) order.
    pub fn with_fd_order(mut self, order: usize) -> Result<Self> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "finite-difference order must be even and ≥ 2, got {order}"
            )));
        }
        if let DerivativeSource::Numeric { order: o } = &mut self.source {
            *o = order;
        }
        Ok(self)
    }

    /// Drop analytic derivatives; the result differentiates its samples.
    pub fn to_numeric(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.clone(),
            source: DerivativeSource::Numeric {
                order: DEFAULT_FD_ORDER,
            },
        }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Vector3<f64>] {
        &self.values
    }

    pub fn value(&self, j: usize, k: usize) -> Vector3<f64> {
        self.values[self.grid.index(j, k)]
    }

    pub fn row(&self, j: usize) -> &[Vector3<f64>] {
        let n = self.grid.n_theta;
        &self.values[j * n..(j + 1) * n]
    }

    pub fn mode(&self) -> DerivativeMode {
        match self.source {
            DerivativeSource::Numeric { .. } => DerivativeMode::Numeric,
            DerivativeSource::Analytic(_) => DerivativeMode::Analytic,
        }
    }

    pub fn analytic(&self) -> Option<&Arc<dyn AnalyticSurface>> {
        match &self.source {
            DerivativeSource::Analytic(s) => Some(s),
            DerivativeSource::Numeric { .. } => None,
        }
    }

    pub fn fd_order(&self) -> Option<usize> {
        match self.source {
            DerivativeSource::Numeric { order } => Some(order),
            DerivativeSource::Analytic(_) => None,
        }
    }

    /// Apply `U ↦ linear·U + offset` to the surface.
    pub fn transformed(&self, linear: Matrix3<f64>, offset: Vector3<f64>) -> Self {
        match &self.source {
            DerivativeSource::Analytic(inner) => {
                let t = Transformed {
                    inner: inner.clone(),
                    linear,
                    offset,
                };
                Self::from_analytic(self.grid, Arc::new(t))
                    .expect("transform of a valid surface is valid")
            }
            DerivativeSource::Numeric { order } => Self {
                grid: self.grid,
                values: self.values.iter().map(|v| linear * v + offset).collect(),
                source: DerivativeSource::Numeric { order: *order },
            },
        }
    }

    fn check_resolution(&self) -> Result<()> {
        if let DerivativeSource::Numeric { order } = self.source {
            let needed = (order + 2).max(5);
            if self.grid.n_r < needed {
                return Err(Error::Resolution(format!(
                    "numeric derivatives of order {order} need n_r ≥ {needed}, got {}",
                    self.grid.n_r
                )));
            }
        }
        Ok(())
    }

    /// Partial derivatives at node `(j, k)`.
    pub fn partials(&self, j: usize, k: usize) -> Result<Partials> {
        if j >= self.grid.n_r || k >= self.grid.n_theta {
            return Err(Error::Parameter(format!(
                "node ({j}, {k}) outside {}×{} grid",
                self.grid.n_r, self.grid.n_theta
            )));
        }
        match &self.source {
            DerivativeSource::Analytic(s) => {
                Ok(s.partials(self.grid.radius(j), self.grid.theta(k)))
            }
            DerivativeSource::Numeric { .. } => Ok(self.row_partials(j)?[k]),
        }
    }

    /// Partial derivatives along radial row `j`.
    pub fn row_partials(&self, j: usize) -> Result<Vec<Partials>> {
        self.check_resolution()?;
        let r = self.grid.radius(j);
        match &self.source {
            DerivativeSource::Analytic(s) => Ok(self
                .grid
                .thetas()
                .into_iter()
                .map(|t| s.partials(r, t))
                .collect()),
            DerivativeSource::Numeric { order } => {
                let stencils = uniform_stencils(self.grid.n_r, self.grid.log_step(), *order);
                let diff = PeriodicDifferentiator::new(self.grid.n_theta);
                Ok(self.numeric_row(j, r, &stencils[j], &diff))
            }
        }
    }

    /// Partial derivatives at every node, row-major.
    pub fn partials_field(&self) -> Result<Vec<Partials>> {
        self.check_resolution()?;
        let rows: Vec<Vec<Partials>> = match &self.source {
            DerivativeSource::Analytic(_) => (0..self.grid.n_r)
                .into_par_iter()
                .map(|j| self.row_partials(j))
                .collect::<Result<_>>()?,
            DerivativeSource::Numeric { order } => {
                let stencils = uniform_stencils(self.grid.n_r, self.grid.log_step(), *order);
                let diff = PeriodicDifferentiator::new(self.grid.n_theta);
                (0..self.grid.n_r)
                    .into_par_iter()
                    .map(|j| self.numeric_row(j, self.grid.radius(j), &stencils[j], &diff))
                    .collect()
            }
        };
        Ok(rows.into_iter().flatten().collect())
    }

    fn numeric_row(
        &self,
        j: usize,
        r: f64,
        stencils: &(crate::numerics::Stencil, crate::numerics::Stencil),
        diff: &PeriodicDifferentiator,
    ) -> Vec<Partials> {
        let n = self.grid.n_theta;
        let (d1, d2) = stencils;
        let u_u: Vec<Vector3<f64>> = (0..n).map(|k| d1.apply(|i| self.value(i, k))).collect();
        let u_uu: Vec<Vector3<f64>> = (0..n).map(|k| d2.apply(|i| self.value(i, k))).collect();
        let own = spectral_rows(self.row(j), diff, 2);
        let mixed = spectral_rows(&u_u, diff, 1);
        (0..n)
            .map(|k| Partials {
                u_r: u_u[k] / r,
                u_theta: own[0][k],
                u_rr: (u_uu[k] - u_u[k]) / (r * r),
                u_rtheta: mixed[0][k] / r,
                u_thetatheta: own[1][k],
            })
            .collect()
    }
}

/// Spectral θ-derivatives of a periodic row of 3-vectors, orders `1..=max`.
pub(crate) fn spectral_rows(
    row: &[Vector3<f64>],
    diff: &PeriodicDifferentiator,
    max_order: u32,
) -> Vec<Vec<Vector3<f64>>> {
    let n = row.len();
    let per_component: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|c| {
            let comp: Vec<f64> = row.iter().map(|v| v[c]).collect();
            diff.derivatives(&comp, max_order)
        })
        .collect();
    (0..max_order as usize)
        .map(|o| {
            (0..n)
                .map(|k| {
                    Vector3::new(
                        per_component[0][o][k],
                        per_component[1][o][k],
                        per_component[2][o][k],
                    )
                })
                .collect()
        })
        .collect()
}

fn sample_rows<F>(grid: &PolarGrid, position: &F) -> Vec<Vector3<f64>>
where
    F: Fn(f64, f64) -> Vector3<f64> + Sync + ?Sized,
{
    let thetas = grid.thetas();
    (0..grid.n_r)
        .into_par_iter()
        .map(|j| {
            let r = grid.radius(j);
            thetas.iter().map(|&t| position(r, t)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// `U ↦ linear·U + offset` applied to an analytic surface.
pub struct Transformed {
    pub inner: Arc<dyn AnalyticSurface>,
    pub linear: Matrix3<f64>,
    pub offset: Vector3<f64>,
}

impl AnalyticSurface for Transformed {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64> {
        self.linear * self.inner.position(r, theta) + self.offset
    }

    fn partials(&self, r: f64, theta: f64) -> Partials {
        self.inner.partials(r, theta).transformed(&self.linear)
    }
}

/// The reparametrization `z ↦ 1/z̄`, which swaps the two boundary circles of
/// a symmetric annulus.
pub struct InvertedChart {
    pub inner: Arc<dyn AnalyticSurface>,
}

impl AnalyticSurface for InvertedChart {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64> {
        self.inner.position(1.0 / r, theta)
    }

    fn partials(&self, r: f64, theta: f64) -> Partials {
        let p = self.inner.partials(1.0 / r, theta);
        let r2 = r * r;
        Partials {
            u_r: -p.u_r / r2,
            u_theta: p.u_theta,
            u_rr: p.u_rr / (r2 * r2) + p.u_r * (2.0 / (r2 * r)),
            u_rtheta: -p.u_rtheta / r2,
            u_thetatheta: p.u_thetatheta,
        }
    }
}

/// The flat annulus `U(z) = scale·(Re z, Im z, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct PlanarAnnulus {
    pub scale: f64,
}

impl AnalyticSurface for PlanarAnnulus {
    fn position(&self, r: f64, theta: f64) -> Vector3<f64> {
        let (s, c) = theta.sin_cos();
        Vector3::new(self.scale * r * c, self.scale * r * s, 0.0)
    }

    fn partials(&self, r: f64, theta: f64) -> Partials {
        let (s, c) = theta.sin_cos();
        let a = self.scale;
        Partials {
            u_r: Vector3::new(a * c, a * s, 0.0),
            u_theta: Vector3::new(-a * r * s, a * r * c, 0.0),
            u_rr: Vector3::zeros(),
            u_rtheta: Vector3::new(-a * s, a * c, 0.0),
            u_thetatheta: Vector3::new(-a * r * c, -a * r * s, 0.0),
        }
    }
}

/// On-disk surface format: symmetric annulus `R⁻¹ ≤ r ≤ R`, values stored
/// radial row first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFile {
    #[serde(rename = "R")]
    pub outer_radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub values: Vec<Vec<[f64; 3]>>,
}

impl SurfaceFile {
    pub fn from_surface(s: &SurfaceGrid) -> Result<Self> {
        let grid = s.grid();
        if !grid.spec.is_symmetric() {
            return Err(Error::Format(
                "surface files store symmetric annuli only".to_string(),
            ));
        }
        Ok(Self {
            outer_radius: grid.spec.outer_radius,
            n_r: grid.n_r,
            n_theta: grid.n_theta,
            values: (0..grid.n_r)
                .map(|j| s.row(j).iter().map(|v| [v.x, v.y, v.z]).collect())
                .collect(),
        })
    }

    pub fn into_surface(self) -> Result<SurfaceGrid> {
        let spec = AnnulusSpec::symmetric(self.outer_radius)
            .map_err(|e| Error::Format(format!("R: {e}")))?;
        let grid = make_grid(spec, self.n_r, self.n_theta)
            .map_err(|e| Error::Format(format!("n_r/n_theta: {e}")))?;
        if self.values.len() != self.n_r {
            return Err(Error::Format(format!(
                "values: {} rows but n_r = {}",
                self.values.len(),
                self.n_r
            )));
        }
        if let Some((j, row)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != self.n_theta)
        {
            return Err(Error::Format(format!(
                "values[{j}]: {} entries but n_theta = {}",
                row.len(),
                self.n_theta
            )));
        }
        let values = self
            .values
            .into_iter()
            .flatten()
            .map(|[x, y, z]| Vector3::new(x, y, z))
            .collect();
        SurfaceGrid::from_values(grid, values)
    }
}

pub fn read_surface(path: &Path) -> Result<SurfaceGrid> {
    let text = std::fs::read_to_string(path)?;
    let file: SurfaceFile = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    file.into_surface()
}

pub fn write_surface(s: &SurfaceGrid, path: &Path) -> Result<()> {
    let file = SurfaceFile::from_surface(s)?;
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}
