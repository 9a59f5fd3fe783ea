//! Dense complex eigensolver.
//!
//! Backed by faer's Hessenberg/Schur QR implementation; this module owns the
//! contract (order limit, residual reporting, vector normalization) and the
//! inverse-iteration helper used to recover individual eigenvectors.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 4096;

/// Residuals `||Av - lv|| / ||v||` above this multiple of `||A||_F` are
/// reported as unconverged.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Square complex matrix with row-major dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![Complex64::new(0.0, 0.0); order * order],
        }
    }

    pub fn from_row_major(order: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::LengthMismatch {
                expected: order * order,
                actual: data.len(),
            });
        }
        crate::error::check_finite(&data, "matrix entries")?;
        Ok(Self { order, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(order: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.order + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.order + j] += v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks(self.order)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }
}

/// Eigenvalues, optional unit-norm eigenvectors and their residuals.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    /// Empty when vectors were not requested.
    pub residual_norms: Vec<f64>,
    pub matrix_norm: f64,
}

impl EigenDecomposition {
    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn residuals_converged(&self) -> bool {
        self.max_residual() <= RESIDUAL_TOLERANCE * self.matrix_norm.max(1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigConfig {
    pub max_order: usize,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

pub fn eig_dense(matrix: &ComplexMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    eig_dense_with(matrix, want_vectors, &EigConfig::default())
}

pub fn eig_dense_with(
    matrix: &ComplexMatrix,
    want_vectors: bool,
    config: &EigConfig,
) -> Result<EigenDecomposition> {
    let n = matrix.order();
    if n > config.max_order {
        return Err(Error::SizeOverflow {
            order: n,
            limit: config.max_order,
        });
    }
    crate::error::check_finite(&matrix.data, "matrix entries")?;
    let matrix_norm = matrix.frobenius_norm();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: want_vectors.then(Vec::new),
            residual_norms: vec![],
            matrix_norm,
        });
    }
    let a = matrix.to_faer();
    if !want_vectors {
        let eigenvalues = a
            .eigenvalues()
            .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
        return Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: None,
            residual_norms: vec![],
            matrix_norm,
        });
    }
    let evd = a
        .eigen()
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let av = &a * u;
    let mut vectors = Vec::with_capacity(n);
    let mut residual_norms = Vec::with_capacity(n);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let norm = (0..n).map(|i| u[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let res = (0..n)
            .map(|i| (av[(i, k)] - lambda * u[(i, k)]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual_norms.push(if norm > 0.0 {
            res / norm
        } else {
            f64::INFINITY
        });
        let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        vectors.push((0..n).map(|i| u[(i, k)] * scale).collect());
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: Some(vectors),
        residual_norms,
        matrix_norm,
    })
}

/// Eigenvector for an already computed eigenvalue by shifted inverse
/// iteration. Returns the Rayleigh-quotient eigenvalue, the unit vector and
/// its residual norm.
pub fn inverse_iteration(
    matrix: &ComplexMatrix,
    lambda: Complex64,
) -> Result<(Complex64, Vec<Complex64>, f64)> {
    let n = matrix.order();
    let scale = matrix.frobenius_norm().max(1.0);
    // Offset keeps the LU nonsingular; it costs nothing in the converged vector.
    let shift = lambda + Complex64::new(1.0, 1.0) * (scale * 1e-13);
    let mut shifted = matrix.to_faer();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.partial_piv_lu();
    let mut v = Mat::<Complex64>::from_fn(n, 1, |i, _| {
        Complex64::new(1.0 + 0.1 * (i as f64).sin(), 0.05 * (i as f64 * 0.7).cos())
    });
    for _ in 0..4 {
        v = lu.solve(&v);
        let norm = (0..n).map(|i| v[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NoConvergence("inverse iteration broke down".into()));
        }
        for i in 0..n {
            v[(i, 0)] /= norm;
        }
    }
    let vec: Vec<Complex64> = (0..n).map(|i| v[(i, 0)]).collect();
    let av = matrix.matvec(&vec);
    let rq: Complex64 = vec.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    let res = av
        .iter()
        .zip(&vec)
        .map(|(y, x)| (y - rq * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((rq, vec, res))
}
