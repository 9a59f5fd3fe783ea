//! Fourier-collocation matrices of `d_xx + V` and `d_xx + d_yy + V`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::eig::DEFAULT_MAX_ORDER;
use crate::numerics::fourier::circulant_column;
use crate::numerics::{differentiation_matrix, ComplexMatrix, Grid1D};
use crate::potential::{Domain, SampledPotential};

pub fn assemble_operator(v: &SampledPotential) -> Result<ComplexMatrix> {
    assemble_operator_with_limit(v, DEFAULT_MAX_ORDER)
}

pub fn assemble_operator_with_limit(
    v: &SampledPotential,
    max_order: usize,
) -> Result<ComplexMatrix> {
    let order = v.values.len();
    if order > max_order {
        return Err(Error::SizeOverflow {
            order,
            limit: max_order,
        });
    }
    let mut m = match &v.domain {
        Domain::Line(g) => {
            let d2 = differentiation_matrix(g, 2);
            ComplexMatrix::from_row_major(
                order,
                d2.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
            )?
        }
        Domain::Plane(g) => {
            let (nx, ny) = (g.x_axis().n(), g.y_axis().n());
            let dx = differentiation_matrix(g.x_axis(), 2);
            let dy = differentiation_matrix(g.y_axis(), 2);
            let mut m = ComplexMatrix::zeros(order);
            for i in 0..nx {
                for j in 0..ny {
                    let row = g.index(i, j);
                    for k in 0..nx {
                        m.add_to(row, g.index(k, j), Complex64::new(dx[i * nx + k], 0.0));
                    }
                    for l in 0..ny {
                        m.add_to(row, g.index(i, l), Complex64::new(dy[j * ny + l], 0.0));
                    }
                }
            }
            m
        }
    };
    for (i, val) in v.values.iter().enumerate() {
        m.add_to(i, i, *val);
    }
    Ok(m)
}

/// `(d_x + i k)^2 + V` acting on the periodic factor of Bloch functions
/// `exp(ikx) phi(x)`.
pub fn assemble_bloch_operator(v: &[Complex64], grid: &Grid1D, k: f64) -> Result<ComplexMatrix> {
    crate::error::check_len(v.len(), grid.n())?;
    let n = grid.n();
    let col = circulant_column(grid, 2, k);
    let mut m = ComplexMatrix::from_fn(n, |i, j| col[(i + n - j) % n]);
    for (i, val) in v.iter().enumerate() {
        m.add_to(i, i, *val);
    }
    Ok(m)
}
