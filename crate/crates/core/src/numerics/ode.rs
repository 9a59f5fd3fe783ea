//! Second-order linear ODE `psi'' + (V(x) - mu) psi = 0` on a sampled grid.
//!
//! Classical RK4 with step `h` equal to the grid spacing. Potential values at
//! half steps come from four-point cubic interpolation of the samples.

use num_complex::Complex64;

use super::grid::Grid1D;
use crate::error::{check_finite, check_len, Error, Result};

/// Magnitude at which the running solution is rescaled.
pub const RENORMALIZE_AT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From the grid origin towards both ends.
    Outward,
    /// From `x_0` to `x_{n-1}`.
    Forward,
    /// From `x_{n-1}` to `x_0`.
    Backward,
}

/// Solution samples; the true solution at `x_j` is
/// `values[j] * exp(log_scale[j])` (same for slopes).
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub values: Vec<Complex64>,
    pub slopes: Vec<Complex64>,
    pub log_scale: Vec<f64>,
    pub overflowed: bool,
}

impl OdeSolution {
    pub fn value(&self, j: usize) -> Complex64 {
        self.values[j] * self.log_scale[j].exp()
    }

    pub fn slope(&self, j: usize) -> Complex64 {
        self.slopes[j] * self.log_scale[j].exp()
    }
}

fn midpoint_values(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n - 1)
        .map(|j| {
            if j == 0 {
                (v[0] * 5.0 + v[1] * 15.0 - v[2] * 5.0 + v[3]) / 16.0
            } else if j == n - 2 {
                (v[n - 1] * 5.0 + v[n - 2] * 15.0 - v[n - 3] * 5.0 + v[n - 4]) / 16.0
            } else {
                (-v[j - 1] + v[j] * 9.0 + v[j + 1] * 9.0 - v[j + 2]) / 16.0
            }
        })
        .collect()
}

/// One RK4 step of signed length `h` between samples with potentials
/// `v0`, `vm`, `v1`.
fn rk4_step(
    y: (Complex64, Complex64),
    h: f64,
    mu: Complex64,
    v0: Complex64,
    vm: Complex64,
    v1: Complex64,
) -> (Complex64, Complex64) {
    let f = |p: Complex64, q: Complex64, v: Complex64| (q, (mu - v) * p);
    let k1 = f(y.0, y.1, v0);
    let k2 = f(y.0 + k1.0 * (h / 2.0), y.1 + k1.1 * (h / 2.0), vm);
    let k3 = f(y.0 + k2.0 * (h / 2.0), y.1 + k2.1 * (h / 2.0), vm);
    let k4 = f(y.0 + k3.0 * h, y.1 + k3.1 * h, v1);
    (
        y.0 + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0),
        y.1 + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0),
    )
}

/// Integrates from grid index `start` one index at a time in direction
/// `step` (+1 or -1) until the end of the grid.
fn sweep(
    potential: &[Complex64],
    mids: &[Complex64],
    h: f64,
    mu: Complex64,
    start: usize,
    step: isize,
    sol: &mut OdeSolution,
) {
    let n = potential.len();
    let mut j = start;
    let mut y = (sol.values[start], sol.slopes[start]);
    let mut scale = sol.log_scale[start];
    loop {
        let next = j as isize + step;
        if next < 0 || next >= n as isize {
            break;
        }
        let next = next as usize;
        let mid = mids[j.min(next)];
        y = rk4_step(y, h * step as f64, mu, potential[j], mid, potential[next]);
        let size = y.0.norm().max(y.1.norm());
        if size > RENORMALIZE_AT {
            y = (y.0 / size, y.1 / size);
            scale += size.ln();
            sol.overflowed = true;
        }
        sol.values[next] = y.0;
        sol.slopes[next] = y.1;
        sol.log_scale[next] = scale;
        j = next;
    }
}

/// Solves `psi'' = (mu - V) psi` with `(psi, psi')` prescribed at the
/// starting point selected by `direction`.
pub fn integrate_ode_2nd(
    potential: &[Complex64],
    grid: &Grid1D,
    mu: Complex64,
    initial: (Complex64, Complex64),
    direction: Direction,
) -> Result<OdeSolution> {
    let n = grid.n();
    check_len(potential.len(), n)?;
    check_finite(potential, "potential")?;
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidParameter(
            "spectral parameter must be finite".into(),
        ));
    }
    check_finite(&[initial.0, initial.1], "initial data")?;
    let mids = midpoint_values(potential);
    let zero = Complex64::new(0.0, 0.0);
    let mut sol = OdeSolution {
        values: vec![zero; n],
        slopes: vec![zero; n],
        log_scale: vec![0.0; n],
        overflowed: false,
    };
    let h = grid.spacing();
    let start = match direction {
        Direction::Outward => grid.origin_index(),
        Direction::Forward => 0,
        Direction::Backward => n - 1,
    };
    sol.values[start] = initial.0;
    sol.slopes[start] = initial.1;
    match direction {
        Direction::Outward => {
            sweep(potential, &mids, h, mu, start, 1, &mut sol);
            sweep(potential, &mids, h, mu, start, -1, &mut sol);
        }
        Direction::Forward => sweep(potential, &mids, h, mu, start, 1, &mut sol),
        Direction::Backward => sweep(potential, &mids, h, mu, start, -1, &mut sol),
    }
    Ok(sol)
}
