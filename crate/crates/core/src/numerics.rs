//! Small numerical kernels shared across modules: periodic spectral
//! differentiation, discrete Fourier modes, finite-difference weights and
//! Gauss-Legendre rules.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Spectral differentiation of real periodic samples on a uniform grid of
/// `[0, 2π)`.
#[derive(Clone)]
pub struct PeriodicDifferentiator {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PeriodicDifferentiator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicDifferentiator")
            .field("n", &self.n)
            .finish()
    }
}

impl PeriodicDifferentiator {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Derivatives of orders `1..=max_order`; element `p - 1` holds the
    /// `p`-th derivative. The Nyquist mode is dropped for odd orders.
    pub fn derivatives(&self, samples: &[f64], max_order: u32) -> Vec<Vec<f64>> {
        assert_eq!(samples.len(), self.n, "sample count must match plan");
        let mut spectrum: Vec<Complex64> =
            samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        (1..=max_order)
            .map(|order| {
                let mut buf: Vec<Complex64> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c * self.multiplier(i, order) * scale)
                    .collect();
                self.inverse.process(&mut buf);
                buf.into_iter().map(|c| c.re).collect()
            })
            .collect()
    }

    fn multiplier(&self, index: usize, order: u32) -> Complex64 {
        let half = self.n / 2;
        if self.n.is_multiple_of(2) && index == half && !order.is_multiple_of(2) {
            return Complex64::new(0.0, 0.0);
        }
        let k = if index <= half {
            index as f64
        } else {
            index as f64 - self.n as f64
        };
        Complex64::new(0.0, k).powu(order)
    }
}

/// Normalized discrete Fourier modes `(1/n) Σ_j x_j e^{-2πi jk/n}` of
/// `samples`, returned in FFT order (index `i` is mode `i` for `i < n/2`
/// and mode `i - n` above).
pub fn fourier_modes(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Signed wavenumber of FFT index `i` for length `n`.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of signed wavenumber `k` for length `n`.
pub fn fft_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Fornberg's recursion for finite-difference weights.
///
/// Returns `w[d][i]`, the weight of `nodes[i]` in the approximation of the
/// `d`-th derivative at `at`, for `d = 0..=max_deriv`.
pub fn fornberg_weights(at: f64, nodes: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - at;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - at;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A finite-difference stencil on a uniform grid: `start` is the first
/// node index, `weights` are already divided by the step power.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub start: usize,
    pub weights: Vec<f64>,
}

impl Stencil {
    pub fn apply<T>(&self, values: impl Fn(usize) -> T) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        self.weights
            .iter()
            .enumerate()
            .fold(T::default(), |acc, (i, &w)| {
                acc + values(self.start + i) * w
            })
    }
}

/// First- and second-derivative stencils of accuracy `order` at every node of
/// a uniform grid with `n` nodes and spacing `h`.
///
/// Central stencils are used where they fit; near the ends the window is
/// shifted inward. Second derivatives on a shifted window use one extra node
/// so that the accuracy order is preserved.
pub fn uniform_stencils(n: usize, h: f64, order: usize) -> Vec<(Stencil, Stencil)> {
    assert!(
        order >= 2 && order.is_multiple_of(2),
        "stencil order must be even"
    );
    (0..n)
        .map(|j| {
            let d1 = stencil_at(j, n, h, 1, order + 1, order + 1);
            let d2 = stencil_at(j, n, h, 2, order + 1, order + 2);
            (d1, d2)
        })
        .collect()
}

fn stencil_at(
    j: usize,
    n: usize,
    h: f64,
    deriv: usize,
    centered_width: usize,
    shifted_width: usize,
) -> Stencil {
    let half = (centered_width - 1) / 2;
    let (start, width) = if j >= half && j + half < n {
        (j - half, centered_width)
    } else {
        let width = shifted_width.min(n);
        let start = (j as isize - (width / 2) as isize).clamp(0, (n - width) as isize) as usize;
        (start, width)
    };
    let nodes: Vec<f64> = (start..start + width)
        .map(|i| i as f64 - j as f64)
        .collect();
    let w = fornberg_weights(0.0, &nodes, deriv);
    let scale = h.powi(deriv as i32);
    Stencil {
        start,
        weights: w[deriv].iter().map(|x| x / scale).collect(),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
