//! Evans function of `psi'' + (V - mu) psi = 0` for potentials tending to
//! a constant `V_inf`, in the variable `s = sqrt(mu - V_inf)`.
//!
//! `psi_-` starts as `exp(s x)` at the left end, `psi_+` as `exp(-s x)` at
//! the right end, and `E(s)` is their Wronskian at `x = 0`, scaled by
//! `exp(-2 s X)`. Zeros with `Re s > 0` are discrete eigenvalues; following
//! a zero through `Re s = 0` locates where it leaves the continuum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_ode_2nd, Direction, Grid1D};

pub fn evans(v: &[Complex64], v_inf: f64, grid: &Grid1D, s: Complex64) -> Result<Complex64> {
    let mu = s * s + v_inf;
    let one = Complex64::new(1.0, 0.0);
    let left = integrate_ode_2nd(v, grid, mu, (one, s), Direction::Forward)?;
    let right = integrate_ode_2nd(v, grid, mu, (one, -s), Direction::Backward)?;
    let o = grid.origin_index();
    let w = left.values[o] * right.slopes[o] - left.slopes[o] * right.values[o];
    let x = grid.half_width();
    // psi_- was started at -X and psi_+ at the last node X - h.
    let exponent = Complex64::new(left.log_scale[o] + right.log_scale[o], 0.0)
        - s * (x + (x - grid.spacing()));
    Ok(w * exponent.exp())
}

/// Zero of `E` near `s0` by the secant method.
pub fn evans_zero(v: &[Complex64], v_inf: f64, grid: &Grid1D, s0: Complex64) -> Result<Complex64> {
    let mut a = s0;
    let mut b = s0 * (1.0 + 1e-4) + Complex64::new(1e-6, 1e-6);
    let mut fa = evans(v, v_inf, grid, a)?;
    let mut fb = evans(v, v_inf, grid, b)?;
    for _ in 0..60 {
        let denom = fb - fa;
        if denom.norm() == 0.0 {
            break;
        }
        let c = b - fb * (b - a) / denom;
        if !(c.re.is_finite() && c.im.is_finite()) {
            break;
        }
        a = b;
        fa = fb;
        b = c;
        fb = evans(v, v_inf, grid, b)?;
        if (b - a).norm() < 1e-12 * b.norm().max(1.0) {
            return Ok(b);
        }
    }
    Err(Error::NoConvergence(format!(
        "Evans zero search from s = {s0}"
    )))
}
