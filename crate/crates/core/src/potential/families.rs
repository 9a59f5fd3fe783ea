//! Type-I, type-II, eta-P and partially-PT potential families, and the
//! intertwining check behind the type-II reality argument.

use num_complex::Complex64;

use super::generator::GeneratorFunction;
use super::sampled::{Domain, PotentialSpec, SampledPotential};
use crate::error::{Error, Result};
use crate::numerics::{spectral_derivative, Grid1D, Grid2D};

/// Default pole guard for type-II potentials.
pub const DEFAULT_G_FLOOR: f64 = 1e-6;
/// Allowed `max|h*(x) - h(-x)|` for eta-P generators.
pub const PT_GENERATOR_TOLERANCE: f64 = 1e-10;
/// Decay margin required around the 2D Gaussian centers.
pub const GAUSSIAN_MARGIN: f64 = 5.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn require_real(g: &GeneratorFunction, grid: &Grid1D) -> Result<()> {
    let max_imag = g.max_imag(grid)?;
    if max_imag > 0.0 {
        return Err(Error::NonRealGenerator { max_imag });
    }
    Ok(())
}

fn check_floor(g: &[Complex64], grid: &Grid1D, floor: f64, what: &'static str) -> Result<()> {
    let (j, min_abs) = g
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    if min_abs <= floor {
        return Err(Error::Pole {
            what,
            x: grid.point(j),
            min_abs,
            floor,
        });
    }
    Ok(())
}

/// `V = g^2 + i g'` for real `g`.
pub fn build_type1(g: &GeneratorFunction, grid: &Grid1D) -> Result<SampledPotential> {
    require_real(g, grid)?;
    let s = g.sample(grid, 1)?;
    let values = s[0]
        .iter()
        .zip(&s[1])
        .map(|(g, g1)| g * g + I * g1)
        .collect();
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::Type1 {
            generator: g.clone(),
        },
    )
}

/// `V = g^2/4 + (g'^2 - 2 g'' g + c2) / (4 g^2) + i g'`, optionally shifted
/// by `-(c0^2 + c2/c0^2)/4` where `c0` is the asymptote of `g`.
pub fn build_type2(
    g: &GeneratorFunction,
    c2: f64,
    grid: &Grid1D,
    subtract_offset: bool,
) -> Result<SampledPotential> {
    build_type2_with_floor(g, c2, grid, subtract_offset, DEFAULT_G_FLOOR)
}

pub fn build_type2_with_floor(
    g: &GeneratorFunction,
    c2: f64,
    grid: &Grid1D,
    subtract_offset: bool,
    g_floor: f64,
) -> Result<SampledPotential> {
    require_real(g, grid)?;
    let s = g.sample(grid, 2)?;
    check_floor(&s[0], grid, g_floor, "type-II generator")?;
    let offset = match g.asymptote() {
        Some(c0) if subtract_offset && c0 != 0.0 => (c0 * c0 + c2 / (c0 * c0)) / 4.0,
        _ => 0.0,
    };
    let values = (0..grid.n())
        .map(|j| {
            let (g, g1, g2) = (s[0][j].re, s[1][j].re, s[2][j].re);
            let re = g * g / 4.0 + (g1 * g1 - 2.0 * g2 * g + c2) / (4.0 * g * g) - offset;
            Complex64::new(re, g1)
        })
        .collect();
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::Type2 {
            generator: g.clone(),
            c2,
            subtract_offset,
        },
    )
}

/// `V = h' - h^2` for PT-symmetric `h`.
pub fn build_eta_p(h: &GeneratorFunction, grid: &Grid1D) -> Result<SampledPotential> {
    let s = h.sample(grid, 1)?;
    let residual = (1..grid.n())
        .map(|j| (s[0][j].conj() - s[0][grid.mirror_index(j)]).norm())
        .fold(0.0, f64::max);
    if residual >= PT_GENERATOR_TOLERANCE {
        return Err(Error::SymmetryViolation { residual });
    }
    let values = s[0].iter().zip(&s[1]).map(|(h, h1)| h1 - h * h).collect();
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::EtaP {
            generator: h.clone(),
        },
    )
}

/// Four Gaussians at `(+-x0, +-y0)`: real weights `3, 3, 2, 2` and gain-loss
/// weights `2, -2, 1, -1` scaled by `beta`. Satisfies `V*(x, y) = V(-x, y)`.
pub fn build_partial_pt_2d(x0: f64, y0: f64, beta: f64, grid: &Grid2D) -> Result<SampledPotential> {
    if !(x0.is_finite() && y0.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(
            "Gaussian parameters must be finite".into(),
        ));
    }
    let (lx, ly) = (grid.x_axis().half_width(), grid.y_axis().half_width());
    if x0.abs() + GAUSSIAN_MARGIN > lx || y0.abs() + GAUSSIAN_MARGIN > ly {
        log::warn!("Gaussian centers ({x0}, {y0}) lie within {GAUSSIAN_MARGIN} of the grid edge");
    }
    let values = grid.sample(|x, y| {
        let e = |a: f64, b: f64| (-(x - a).powi(2) - (y - b).powi(2)).exp();
        let (pp, mp, pm, mm) = (e(x0, y0), e(-x0, y0), e(x0, -y0), e(-x0, -y0));
        Complex64::new(
            3.0 * (pp + mp) + 2.0 * (pm + mm),
            beta * (2.0 * (pp - mp) + (pm - mm)),
        )
    });
    SampledPotential::new(
        Domain::Plane(*grid),
        values,
        PotentialSpec::PartialPt2d { x0, y0, beta },
    )
}

/// Max grid residual of `(-D + W)(D^2 + V) f - (D^2 + V0)(-D + W) f` over the
/// test functions, where `V` is the type-II potential with `c2 = -epsilon^2`,
/// `W = (g' + epsilon)/(2g) - i g/2` and `V0` is the real partner.
pub fn verify_intertwining(
    g: &GeneratorFunction,
    epsilon: f64,
    grid: &Grid1D,
    test_functions: &[Vec<Complex64>],
) -> Result<f64> {
    require_real(g, grid)?;
    let s = g.sample(grid, 2)?;
    check_floor(&s[0], grid, DEFAULT_G_FLOOR, "type-II generator")?;
    let c2 = -epsilon * epsilon;
    let v = build_type2(g, c2, grid, false)?.values;
    let n = grid.n();
    let mut w = Vec::with_capacity(n);
    let mut v0 = Vec::with_capacity(n);
    for j in 0..n {
        let (g, g1, g2) = (s[0][j].re, s[1][j].re, s[2][j].re);
        w.push(Complex64::new((g1 + epsilon) / (2.0 * g), -g / 2.0));
        v0.push(Complex64::new(
            g * g / 4.0
                + (2.0 * g * g2 - 3.0 * g1 * g1 - 4.0 * epsilon * g1 - epsilon * epsilon)
                    / (4.0 * g * g),
            0.0,
        ));
    }
    let mut worst: f64 = 0.0;
    for f in test_functions {
        crate::error::check_len(f.len(), n)?;
        let lf: Vec<Complex64> = spectral_derivative(f, grid, 2)?
            .iter()
            .zip(f.iter().zip(&v))
            .map(|(d2, (f, v))| d2 + v * f)
            .collect();
        let dlf = spectral_derivative(&lf, grid, 1)?;
        let lhs: Vec<Complex64> = (0..n).map(|j| -dlf[j] + w[j] * lf[j]).collect();
        let df = spectral_derivative(f, grid, 1)?;
        let af: Vec<Complex64> = (0..n).map(|j| -df[j] + w[j] * f[j]).collect();
        let d2af = spectral_derivative(&af, grid, 2)?;
        let rhs: Vec<Complex64> = (0..n).map(|j| d2af[j] + v0[j] * af[j]).collect();
        let r = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(r);
    }
    Ok(worst)
}
