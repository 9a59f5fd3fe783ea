//! Eigenvalues of largest real part of `d_xx + d_yy + V` on grids too large
//! for the dense solver.
//!
//! Shift-invert subspace iteration with Rayleigh-Ritz extraction. The shifted
//! solves use restarted GMRES, right-preconditioned by the exact inverse of
//! the shifted Laplacian (diagonal in Fourier space).

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::fourier::{laplacian_symbol, FourierTransform2D};
use crate::numerics::Grid2D;
use crate::potential::SampledPotential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    pub k: usize,
    /// Extra Ritz vectors carried beyond `k`.
    pub guard: usize,
    /// Initial real shift; defaults to `max Re V + 0.5`, right of the
    /// numerical range.
    pub shift: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        Self {
            k: 10,
            guard: 12,
            shift: None,
            tolerance: 1e-8,
            max_iterations: 400,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterativeResult {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

struct PlaneOperator {
    fft: FourierTransform2D,
    /// `-(kx^2 + ky^2)`, row-major like the grid.
    symbol: Vec<f64>,
    potential: Vec<Complex64>,
}

impl PlaneOperator {
    fn new(grid: &Grid2D, potential: &[Complex64]) -> Self {
        let (nx, ny) = (grid.x_axis().n(), grid.y_axis().n());
        Self {
            fft: FourierTransform2D::new(nx, ny),
            symbol: laplacian_symbol(grid),
            potential: potential.to_vec(),
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        if inverse {
            self.fft.inverse(data)
        } else {
            self.fft.forward(data)
        }
    }

    /// `(A - sigma) x`.
    fn apply(&self, x: &[Complex64], sigma: f64) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.transform(&mut buf, false);
        buf.iter_mut().zip(&self.symbol).for_each(|(v, s)| *v *= s);
        self.transform(&mut buf, true);
        buf.iter_mut()
            .zip(x.iter().zip(&self.potential))
            .for_each(|(b, (x, v))| *b += (v - sigma) * x);
        buf
    }

    /// `(Laplacian - sigma)^-1 x`.
    fn precondition(&self, x: &[Complex64], sigma: f64) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.transform(&mut buf, false);
        buf.iter_mut()
            .zip(&self.symbol)
            .for_each(|(v, s)| *v /= s - sigma);
        self.transform(&mut buf, true);
        buf
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted right-preconditioned GMRES for `(A - sigma) y = b`; returns the
/// last iterate if the cycle cap is reached.
fn gmres(op: &PlaneOperator, b: &[Complex64], sigma: f64, tol: f64) -> Result<Vec<Complex64>> {
    const RESTART: usize = 40;
    const MAX_CYCLES: usize = 50;
    let n = b.len();
    let bnorm = norm(b);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return Ok(y);
    }
    for _ in 0..MAX_CYCLES {
        let ay = op.apply(&y, sigma);
        let r: Vec<Complex64> = b.iter().zip(&ay).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        if beta <= tol * bnorm {
            return Ok(y);
        }
        let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![Complex64::new(0.0, 0.0); RESTART]; RESTART + 1];
        let mut cs = vec![Complex64::new(0.0, 0.0); RESTART];
        let mut sn = vec![Complex64::new(0.0, 0.0); RESTART];
        let mut g = vec![Complex64::new(0.0, 0.0); RESTART + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..RESTART {
            let mut w = op.apply(&op.precondition(&basis[j], sigma), sigma);
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                h[i][j] = c;
                w.iter_mut().zip(q).for_each(|(w, q)| *w -= c * q);
            }
            let wn = norm(&w);
            h[j + 1][j] = Complex64::new(wn, 0.0);
            for i in 0..j {
                let t = cs[i].conj() * h[i][j] + sn[i].conj() * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let (a, bb) = (h[j][j], h[j + 1][j]);
            let d = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if d == 0.0 {
                return Err(Error::NoConvergence("GMRES breakdown".into()));
            }
            cs[j] = a / d;
            sn[j] = bb / d;
            h[j][j] = cs[j].conj() * a + sn[j].conj() * bb;
            h[j + 1][j] = Complex64::new(0.0, 0.0);
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            used = j + 1;
            if g[j + 1].norm() <= tol * bnorm || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut z = vec![Complex64::new(0.0, 0.0); used];
        for i in (0..used).rev() {
            let s: Complex64 = (i + 1..used).map(|l| h[i][l] * z[l]).sum();
            z[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![Complex64::new(0.0, 0.0); n];
        for (zi, q) in z.iter().zip(&basis) {
            update.iter_mut().zip(q).for_each(|(u, q)| *u += zi * q);
        }
        let update = op.precondition(&update, sigma);
        y.iter_mut().zip(&update).for_each(|(y, u)| *y += u);
    }
    // Inexact solves only slow the outer iteration; its Ritz residuals are
    // checked against A itself.
    log::debug!("GMRES stopped above tolerance");
    Ok(y)
}

fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for pass in 0..2 {
        for j in 0..cols.len() {
            let (done, rest) = cols.split_at_mut(j);
            let v = &mut rest[0];
            for q in done.iter() {
                let c = dot(q, v);
                v.iter_mut().zip(q).for_each(|(v, q)| *v -= c * q);
            }
            let nv = norm(v);
            if nv > 0.0 {
                v.iter_mut().for_each(|x| *x /= nv);
            } else if pass == 1 {
                log::warn!("subspace column {j} collapsed");
            }
        }
    }
}

/// The `opts.k` eigenpairs of largest real part of a 2D operator.
pub fn shift_invert_eigs(v: &SampledPotential, opts: &IterativeOptions) -> Result<IterativeResult> {
    let grid = v
        .domain
        .as_plane()
        .ok_or_else(|| Error::InvalidParameter("iterative path needs a 2D potential".into()))?;
    let op = PlaneOperator::new(grid, &v.values);
    let n = v.values.len();
    let p = (opts.k + opts.guard).min(n);
    if opts.k == 0 || opts.k > 50 {
        return Err(Error::InvalidParameter("k must lie in 1..=50".into()));
    }
    let max_re = v
        .values
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sigma = opts.shift.unwrap_or(max_re + 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<Complex64>> = (0..p)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let mut last: Vec<f64> = vec![];
    for iter in 1..=opts.max_iterations {
        let mut y = x
            .iter()
            .map(|col| gmres(&op, col, sigma, 1e-12))
            .collect::<Result<Vec<_>>>()?;
        orthonormalize(&mut y);
        let ay: Vec<Vec<Complex64>> = y.iter().map(|col| op.apply(col, 0.0)).collect();
        let h = Mat::<Complex64>::from_fn(p, p, |i, j| dot(&y[i], &ay[j]));
        let evd = h
            .eigen()
            .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let w = evd.U();
        let mut ritz: Vec<(Complex64, Vec<Complex64>, f64)> = (0..p)
            .map(|c| {
                let mut xv = vec![Complex64::new(0.0, 0.0); n];
                let mut axv = vec![Complex64::new(0.0, 0.0); n];
                for r in 0..p {
                    let wr = w[(r, c)];
                    xv.iter_mut().zip(&y[r]).for_each(|(a, b)| *a += wr * b);
                    axv.iter_mut().zip(&ay[r]).for_each(|(a, b)| *a += wr * b);
                }
                let nx = norm(&xv);
                xv.iter_mut().for_each(|a| *a /= nx);
                axv.iter_mut().for_each(|a| *a /= nx);
                let res = norm(
                    &axv.iter()
                        .zip(&xv)
                        .map(|(a, b)| a - s[c] * b)
                        .collect::<Vec<_>>(),
                );
                (s[c], xv, res)
            })
            .collect();
        ritz.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(a.0.im.total_cmp(&b.0.im)));
        last = ritz.iter().take(opts.k).map(|r| r.2).collect();
        if last.iter().all(|r| *r < opts.tolerance) {
            let top: Vec<_> = ritz.into_iter().take(opts.k).collect();
            return Ok(IterativeResult {
                eigenvalues: top.iter().map(|r| r.0).collect(),
                residuals: top.iter().map(|r| r.2).collect(),
                vectors: top.into_iter().map(|r| r.1).collect(),
                iterations: iter,
            });
        }
        if iter == 3 && opts.shift.is_none() {
            // Move the shift close to the top of the spectrum.
            sigma = ritz[0].0.re + 0.2;
        }
        x = ritz.into_iter().map(|r| r.1).collect();
    }
    Err(Error::NoConvergence(format!(
        "shift-invert iteration: Ritz residuals {last:?} after {} iterations",
        opts.max_iterations
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::build_partial_pt_2d;
    use crate::spectrum::{assemble_operator, SpectrumOptions};

    #[test]
    fn matches_dense_top_of_spectrum() {
        let grid = Grid2D::square(20, 6.0).unwrap();
        let v = build_partial_pt_2d(1.5, 1.5, 0.25, &grid).unwrap();
        let mut dense = crate::numerics::eig_dense(&assemble_operator(&v).unwrap(), false)
            .unwrap()
            .eigenvalues;
        dense.sort_by(|a, b| b.re.total_cmp(&a.re));
        let it = shift_invert_eigs(
            &v,
            &IterativeOptions {
                k: 4,
                ..Default::default()
            },
        )
        .unwrap();
        for (z, r) in it.eigenvalues.iter().zip(&it.residuals) {
            assert!(*r < 1e-8);
            let nearest = dense
                .iter()
                .map(|d| (d - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "{z} off by {nearest}");
        }
        for d in dense.iter().take(3) {
            assert!(
                it.eigenvalues.iter().any(|z| (z - d).norm() < 1e-8),
                "missed {d}"
            );
        }
    }

    #[test]
    fn spectrum_2d_routes_large_grids_to_iteration() {
        let grid = Grid2D::square(24, 7.0).unwrap();
        let v = build_partial_pt_2d(1.5, 1.5, 0.1, &grid).unwrap();
        let opts = SpectrumOptions {
            max_order: 256,
            ..Default::default()
        };
        let s = crate::spectrum::spectrum_2d(&v, 5, &opts).unwrap();
        assert_eq!(s.eigenvalues.len(), 5);
        assert!(s.residual_norms.iter().all(|r| *r < 1e-8));
    }
}
