use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

/// Uniform periodic grid `x_j = -L + j * 2L / n`, `j = 0..n`.
///
/// The right end point `L` is identified with `-L` and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    half_width: f64,
}

impl Grid1D {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {n}"
            )));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even so that x = 0 is a grid point, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        Ok(Self { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Index of `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the point `-x_j` (the grid is symmetric under reflection
    /// once `-L` is identified with `L`).
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        fft_wavenumbers(self.n, self.half_width)
    }

    /// Same half width with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n: self.n * factor.max(1),
            half_width: self.half_width,
        }
    }

    /// Whether a point lies in the inner half `|x| < L/2`.
    pub fn is_inner(&self, j: usize) -> bool {
        self.point(j).abs() < 0.5 * self.half_width
    }

    pub fn sample<F: Fn(f64) -> T, T>(&self, f: F) -> Vec<T> {
        (0..self.n).map(|j| f(self.point(j))).collect()
    }
}

/// Tensor-product periodic grid; flat index `i * ny + j` for `(x_i, y_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    x: Grid1D,
    y: Grid1D,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, half_width_x: f64, half_width_y: f64) -> Result<Self> {
        Ok(Self {
            x: Grid1D::new(nx, half_width_x)?,
            y: Grid1D::new(ny, half_width_y)?,
        })
    }

    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, n, half_width, half_width)
    }

    pub fn x_axis(&self) -> &Grid1D {
        &self.x
    }

    pub fn y_axis(&self) -> &Grid1D {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.n() * self.y.n()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.y.n() + j
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        let ny = self.y.n();
        (self.x.point(idx / ny), self.y.point(idx % ny))
    }

    pub fn is_inner(&self, idx: usize) -> bool {
        let ny = self.y.n();
        self.x.is_inner(idx / ny) && self.y.is_inner(idx % ny)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let ny = self.y.n();
        let (i, j) = (idx / ny, idx % ny);
        i == 0 || j == 0 || i == self.x.n() - 1 || j == ny - 1
    }

    pub fn sample<F: Fn(f64, f64) -> T, T>(&self, f: F) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.x.n() {
            let x = self.x.point(i);
            for j in 0..self.y.n() {
                out.push(f(x, self.y.point(j)));
            }
        }
        out
    }
}

pub(crate) fn fft_wavenumbers(n: usize, half_width: f64) -> Vec<f64> {
    let scale = PI / half_width;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            // Nyquist mode carried with positive sign; callers decide how to
            // treat it for odd derivatives.
            m * scale
        })
        .collect()
}
