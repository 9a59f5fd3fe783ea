//! Generator functions from which the complex potential families are built.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::numerics::Grid1D;

/// Highest derivative order any family needs.
pub const MAX_DERIVATIVE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorFunction {
    /// `tanh(2(x + 2.5)) - tanh(x - 2.5) + c0`; real, tends to `c0` at both ends.
    TanhPair { c0: f64 },
    /// `d1 sech x + i d2 sech x tanh x`; PT-symmetric for real `d1`, `d2`.
    SechMix { d1: f64, d2: f64 },
    /// `amplitude * sech(x / width) + offset`; real.
    SingleSech {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Samples on a specific grid. `derivatives[k]` holds the `(k+1)`-th
    /// derivative; nothing is differentiated numerically.
    Tabulated {
        values: Vec<Complex64>,
        derivatives: Vec<Vec<Complex64>>,
    },
}

/// `[f, f', f'', f''']` for `f = tanh u`.
fn tanh_derivs(u: f64) -> [f64; 4] {
    let t = u.tanh();
    let s2 = 1.0 - t * t;
    [t, s2, -2.0 * t * s2, (6.0 * t * t - 2.0) * s2]
}

fn sech(u: f64) -> f64 {
    let c = u.abs().cosh();
    if c.is_finite() {
        1.0 / c
    } else {
        0.0
    }
}

/// `[f, f', f'', f''']` for `f = sech u`.
fn sech_derivs(u: f64) -> [f64; 4] {
    let s = sech(u);
    let t = u.tanh();
    [
        s,
        -s * t,
        s * (1.0 - 2.0 * s * s),
        -s * t * (1.0 - 6.0 * s * s),
    ]
}

/// `[f, f', f'', f''']` for `f = sech u tanh u`.
fn sech_tanh_derivs(u: f64) -> [f64; 4] {
    let s = sech(u);
    let t = u.tanh();
    let s3 = s * s * s;
    [
        s * t,
        2.0 * s3 - s,
        -s * t * (6.0 * s * s - 1.0),
        20.0 * s3 - 24.0 * s3 * s * s - s,
    ]
}

impl GeneratorFunction {
    pub fn tabulated(values: Vec<Complex64>, derivatives: Vec<Vec<Complex64>>) -> Self {
        Self::Tabulated {
            values,
            derivatives,
        }
    }

    /// Derivatives `0..=3` at `x`; `None` for tabulated generators.
    pub fn eval(&self, x: f64) -> Option<[Complex64; 4]> {
        let r = |v: [f64; 4]| v.map(|a| Complex64::new(a, 0.0));
        match *self {
            Self::TanhPair { c0 } => {
                let a = tanh_derivs(2.0 * (x + 2.5));
                let b = tanh_derivs(x - 2.5);
                Some(r([
                    a[0] - b[0] + c0,
                    2.0 * a[1] - b[1],
                    4.0 * a[2] - b[2],
                    8.0 * a[3] - b[3],
                ]))
            }
            Self::SechMix { d1, d2 } => {
                let s = sech_derivs(x);
                let p = sech_tanh_derivs(x);
                Some(std::array::from_fn(|k| {
                    Complex64::new(d1 * s[k], d2 * p[k])
                }))
            }
            Self::SingleSech {
                amplitude,
                width,
                offset,
            } => {
                let s = sech_derivs(x / width);
                let mut out = [0.0; 4];
                let mut scale = amplitude;
                for k in 0..4 {
                    out[k] = scale * s[k];
                    scale /= width;
                }
                out[0] += offset;
                Some(r(out))
            }
            Self::Tabulated { .. } => None,
        }
    }

    /// Samples of derivatives `0..=order` on `grid`; `out[k][j]` is the
    /// `k`-th derivative at `x_j`.
    pub fn sample(&self, grid: &Grid1D, order: usize) -> Result<Vec<Vec<Complex64>>> {
        if order > MAX_DERIVATIVE {
            return Err(Error::InvalidParameter(format!(
                "derivative order {order} exceeds {MAX_DERIVATIVE}"
            )));
        }
        match self {
            Self::Tabulated {
                values,
                derivatives,
            } => {
                check_len(values.len(), grid.n())?;
                if derivatives.len() < order {
                    return Err(Error::InvalidParameter(format!(
                        "tabulated generator supplies {} derivatives, {order} required",
                        derivatives.len()
                    )));
                }
                let mut out = vec![values.clone()];
                for d in &derivatives[..order] {
                    check_len(d.len(), grid.n())?;
                    out.push(d.clone());
                }
                for col in &out {
                    crate::error::check_finite(col, "tabulated generator")?;
                }
                Ok(out)
            }
            _ => {
                let mut out = vec![Vec::with_capacity(grid.n()); order + 1];
                for x in grid.points() {
                    let v = self.eval(x).expect("closed-form generator");
                    for (k, col) in out.iter_mut().enumerate() {
                        col.push(v[k]);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Largest `|Im g|` over the grid (zero for the real closed-form kinds).
    pub fn max_imag(&self, grid: &Grid1D) -> Result<f64> {
        Ok(match self {
            Self::TanhPair { .. } | Self::SingleSech { .. } => 0.0,
            Self::SechMix { d2, .. } if *d2 == 0.0 => 0.0,
            _ => self.sample(grid, 0)?[0]
                .iter()
                .map(|v| v.im.abs())
                .fold(0.0, f64::max),
        })
    }

    /// Common value of `g` at `x -> +-infinity` if it exists.
    pub fn asymptote(&self) -> Option<f64> {
        match self {
            Self::TanhPair { c0 } => Some(*c0),
            Self::SechMix { .. } => Some(0.0),
            Self::SingleSech { offset, .. } => Some(*offset),
            Self::Tabulated { values, .. } => {
                let (a, b) = (values.first()?, values.last()?);
                let scale = a.norm().max(b.norm()).max(1e-300);
                ((a - b).norm() <= 1e-6 * scale && a.im == 0.0 && b.im == 0.0)
                    .then_some(0.5 * (a.re + b.re))
            }
        }
    }
}
