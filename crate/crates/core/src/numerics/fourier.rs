//! Fourier collocation on periodic grids.
//!
//! Odd derivatives drop the Nyquist mode so the first-derivative matrix is
//! real and skew-symmetric; the second derivative keeps it (`-k_N^2`) so the
//! second-derivative matrix is real symmetric and negative semidefinite.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::grid::{fft_wavenumbers, Grid1D, Grid2D};
use crate::error::{check_finite, check_len, Error, Result};

/// Forward/inverse transform pair of fixed length.
pub struct FourierTransform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl FourierTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Row-column transform on a flat `nx * ny` row-major array.
pub struct FourierTransform2D {
    x: FourierTransform,
    y: FourierTransform,
}

impl FourierTransform2D {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self {
            x: FourierTransform::new(nx),
            y: FourierTransform::new(ny),
        }
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        let (nx, ny) = (self.x.len(), self.y.len());
        let (fx, fy) = if inverse {
            (&self.x.inverse, &self.y.inverse)
        } else {
            (&self.x.forward, &self.y.forward)
        };
        for row in data.chunks_mut(ny) {
            fy.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); nx];
        for j in 0..ny {
            for i in 0..nx {
                col[i] = data[i * ny + j];
            }
            fx.process(&mut col);
            for i in 0..nx {
                data[i * ny + j] = col[i];
            }
        }
        if inverse {
            let s = 1.0 / (nx * ny) as f64;
            data.iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    /// Inverse transform including the `1/(nx ny)` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }
}

/// `-(kx^2 + ky^2)` in the flat order of [`FourierTransform2D`].
pub fn laplacian_symbol(grid: &Grid2D) -> Vec<f64> {
    let kx = grid.x_axis().wavenumbers();
    let ky = grid.y_axis().wavenumbers();
    kx.iter()
        .flat_map(|a| ky.iter().map(move |b| -(a * a + b * b)))
        .collect()
}

/// Fourier multiplier of `d^order/dx^order` on the given wavenumbers, with the
/// optional Bloch shift `k -> k + bloch`.
pub(crate) fn derivative_symbols(
    n: usize,
    half_width: f64,
    order: u32,
    bloch: f64,
) -> Vec<Complex64> {
    let k = fft_wavenumbers(n, half_width);
    let nyquist = n / 2;
    k.iter()
        .enumerate()
        .map(|(j, &kj)| {
            let kk = kj + bloch;
            if j == nyquist && order % 2 == 1 && bloch == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, kk).powu(order)
            }
        })
        .collect()
}

fn apply_symbols(
    values: &[Complex64],
    symbols: &[Complex64],
    fft: &FourierTransform,
) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft.forward(&mut buf);
    buf.iter_mut().zip(symbols).for_each(|(v, s)| *v *= s);
    fft.inverse(&mut buf);
    buf
}

/// Fourier-collocation derivative of order 1 or 2.
pub fn spectral_derivative(
    values: &[Complex64],
    grid: &Grid1D,
    order: u32,
) -> Result<Vec<Complex64>> {
    check_len(values.len(), grid.n())?;
    check_finite(values, "spectral_derivative input")?;
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "derivative order must be 1 or 2, got {order}"
        )));
    }
    let fft = FourierTransform::new(grid.n());
    let symbols = derivative_symbols(grid.n(), grid.half_width(), order, 0.0);
    Ok(apply_symbols(values, &symbols, &fft))
}

/// Derivative of a Bloch function `psi(x + 2L) = exp(2iLk) psi(x)` with
/// quasi-momentum `k = bloch`.
pub fn spectral_derivative_bloch(
    values: &[Complex64],
    grid: &Grid1D,
    order: u32,
    bloch: f64,
) -> Result<Vec<Complex64>> {
    check_len(values.len(), grid.n())?;
    check_finite(values, "spectral_derivative input")?;
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "derivative order must be 1 or 2, got {order}"
        )));
    }
    let phase: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, bloch * x))
        .collect();
    let periodic: Vec<Complex64> = values.iter().zip(&phase).map(|(v, p)| v / p).collect();
    let fft = FourierTransform::new(grid.n());
    let symbols = derivative_symbols(grid.n(), grid.half_width(), order, bloch);
    let d = apply_symbols(&periodic, &symbols, &fft);
    Ok(d.iter().zip(&phase).map(|(v, p)| v * p).collect())
}

/// Real-valued convenience wrapper.
pub fn spectral_derivative_real(values: &[f64], grid: &Grid1D, order: u32) -> Result<Vec<f64>> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(spectral_derivative(&c, grid, order)?
        .into_iter()
        .map(|v| v.re)
        .collect())
}

/// First column of the circulant differentiation matrix.
pub(crate) fn circulant_column(grid: &Grid1D, order: u32, bloch: f64) -> Vec<Complex64> {
    let n = grid.n();
    let fft = FourierTransform::new(n);
    let symbols = derivative_symbols(n, grid.half_width(), order, bloch);
    let mut e0 = vec![Complex64::new(0.0, 0.0); n];
    e0[0] = Complex64::new(1.0, 0.0);
    apply_symbols(&e0, &symbols, &fft)
}

/// Dense differentiation matrix (row-major, `n * n`) of the given order.
pub fn differentiation_matrix(grid: &Grid1D, order: u32) -> Vec<f64> {
    let n = grid.n();
    let col = circulant_column(grid, order, 0.0);
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = col[(i + n - j) % n].re;
        }
    }
    m
}

/// Fraction of spectral energy in the upper quarter of the resolved
/// wavenumbers. Small values mean the samples are a smooth periodic function.
pub fn spectral_tail_fraction(values: &[Complex64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let fft = FourierTransform::new(n);
    let mut buf = values.to_vec();
    fft.forward(&mut buf);
    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let cutoff = 3 * n / 8;
    let tail: f64 = buf
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let m = if *j <= n / 2 { *j } else { n - *j };
            m > cutoff
        })
        .map(|(_, v)| v.norm_sqr())
        .sum();
    tail / total
}
