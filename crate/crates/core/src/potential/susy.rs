//! Supersymmetric constructions: the one-parameter superpotential family,
//! first-order partners and the Cannata variant with real `mu1`.

use num_complex::Complex64;

use super::sampled::{Domain, PotentialSpec, SampledPotential};
use crate::error::{check_len, Error, Result};
use crate::numerics::{
    cumulative_integral, integrate_ode_2nd, spectral_derivative_bloch, Direction, Grid1D,
};

/// Pole guard on `F = c + int_0^x psi^2`.
pub const DEFAULT_F_FLOOR: f64 = 1e-8;
/// Allowed relative residual of the seed eigenrelation.
pub const EIGENRELATION_TOLERANCE: f64 = 1e-8;
/// Relative cancellation in `a1 f1 + a2 f2` treated as a zero of the seed.
pub const SEED_FLOOR: f64 = 1e-8;

/// Solution `psi` of `psi'' + V psi = mu psi` with its slope. `bloch` is the
/// quasi-momentum of `psi` on the periodic grid (zero for decayed seeds).
#[derive(Debug, Clone)]
pub struct SeedState {
    pub psi: Vec<Complex64>,
    pub slope: Vec<Complex64>,
    pub mu: Complex64,
    pub bloch: f64,
}

impl SeedState {
    /// Slope taken spectrally; `psi` must be periodic or decayed.
    pub fn from_values(grid: &Grid1D, psi: Vec<Complex64>, mu: Complex64) -> Result<Self> {
        let slope = spectral_derivative_bloch(&psi, grid, 1, 0.0)?;
        Ok(Self {
            psi,
            slope,
            mu,
            bloch: 0.0,
        })
    }

    /// `max|psi'' + (V - mu) psi| / max|psi|`.
    pub fn residual(&self, v: &SampledPotential) -> Result<f64> {
        let grid = line_grid(v)?;
        check_len(self.psi.len(), grid.n())?;
        let d2 = spectral_derivative_bloch(&self.psi, grid, 2, self.bloch)?;
        let scale = self.psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let r = (0..grid.n())
            .map(|j| (d2[j] + (v.values[j] - self.mu) * self.psi[j]).norm())
            .fold(0.0, f64::max);
        Ok(if scale > 0.0 { r / scale } else { r })
    }
}

fn line_grid(v: &SampledPotential) -> Result<&Grid1D> {
    v.grid()
        .ok_or_else(|| Error::InvalidParameter("construction requires a 1D potential".into()))
}

/// `V = -x^2`.
pub fn harmonic_well(grid: &Grid1D) -> SampledPotential {
    let values = grid.sample(|x| Complex64::new(-x * x, 0.0));
    SampledPotential::line(*grid, values, "harmonic").expect("finite samples")
}

/// Ground state `exp(-x^2/2)` of the harmonic well, `mu = -1`.
pub fn harmonic_ground_state(grid: &Grid1D) -> SeedState {
    SeedState {
        psi: grid.sample(|x| Complex64::new((-x * x / 2.0).exp(), 0.0)),
        slope: grid.sample(|x| Complex64::new(-x * (-x * x / 2.0).exp(), 0.0)),
        mu: Complex64::new(-1.0, 0.0),
        bloch: 0.0,
    }
}

/// Grid covering one period `[-pi/2, pi/2)` of the lattice `V0^2 exp(2ix)`.
pub fn lattice_period_grid(n: usize) -> Result<Grid1D> {
    Grid1D::new(n, std::f64::consts::FRAC_PI_2)
}

/// `V = V0^2 exp(2ix)`.
pub fn exponential_lattice(grid: &Grid1D, v0: f64) -> SampledPotential {
    let values = grid.sample(|x| Complex64::from_polar(v0 * v0, 2.0 * x));
    SampledPotential::line(*grid, values, "exponential-lattice").expect("finite samples")
}

/// `I1(z)` and `I1'(z)` by their power series, truncated at relative 1e-16.
pub fn bessel_i1(z: Complex64) -> (Complex64, Complex64) {
    let half = z / 2.0;
    let h2 = half * half;
    let mut term = half;
    let mut dterm = Complex64::new(0.5, 0.0);
    let mut sum = term;
    let mut dsum = dterm;
    for k in 1..200 {
        let kf = k as f64;
        term *= h2 / (kf * (kf + 1.0));
        dterm *= h2 / (kf * (kf + 1.0));
        sum += term;
        dsum += dterm * ((2.0 * kf + 1.0) / 1.0);
        if term.norm() <= 1e-16 * sum.norm() {
            break;
        }
    }
    (sum, dsum)
}

/// `psi = I1(V0 exp(ix))`, the `mu = -1` Bloch solution of the exponential
/// lattice; antiperiodic on one period, hence quasi-momentum 1.
pub fn bessel_seed(grid: &Grid1D, v0: f64) -> SeedState {
    let mut psi = Vec::with_capacity(grid.n());
    let mut slope = Vec::with_capacity(grid.n());
    for x in grid.points() {
        let z = Complex64::from_polar(v0, x);
        let (f, df) = bessel_i1(z);
        psi.push(f);
        slope.push(Complex64::new(0.0, 1.0) * z * df);
    }
    SeedState {
        psi,
        slope,
        mu: Complex64::new(-1.0, 0.0),
        bloch: 1.0,
    }
}

/// `F = c + int_0^x psi^2`.
pub fn accumulated_square(seed: &SeedState, c: Complex64, grid: &Grid1D) -> Result<Vec<Complex64>> {
    let sq: Vec<Complex64> = seed.psi.iter().map(|p| p * p).collect();
    Ok(cumulative_integral(&sq, grid)?
        .into_iter()
        .map(|v| v + c)
        .collect())
}

/// `V1 + 2(F'' F - F'^2)/F^2` with `F' = psi^2`, `F'' = 2 psi psi'`.
pub fn build_susy_super(
    v1: &SampledPotential,
    seed: &SeedState,
    c: Complex64,
) -> Result<SampledPotential> {
    build_susy_super_with_floor(v1, seed, c, DEFAULT_F_FLOOR)
}

pub fn build_susy_super_with_floor(
    v1: &SampledPotential,
    seed: &SeedState,
    c: Complex64,
    f_floor: f64,
) -> Result<SampledPotential> {
    let grid = line_grid(v1)?;
    check_len(seed.psi.len(), grid.n())?;
    check_len(seed.slope.len(), grid.n())?;
    let residual = seed.residual(v1)?;
    if residual >= EIGENRELATION_TOLERANCE {
        return Err(Error::EigenrelationResidual {
            residual,
            tolerance: EIGENRELATION_TOLERANCE,
        });
    }
    let f = accumulated_square(seed, c, grid)?;
    // Sign changes between grid points count as zeros.
    for j in 0..grid.n() - 1 {
        let dist = segment_distance_to_origin(f[j], f[j + 1]);
        if dist <= f_floor {
            return Err(Error::Pole {
                what: "accumulated square",
                x: grid.point(j),
                min_abs: dist,
                floor: f_floor,
            });
        }
    }
    let values = (0..grid.n())
        .map(|j| {
            let (p, dp) = (seed.psi[j], seed.slope[j]);
            let f1 = p * p;
            let f2 = 2.0 * p * dp;
            v1.values[j] + 2.0 * (f2 * f[j] - f1 * f1) / (f[j] * f[j])
        })
        .collect();
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::SusySuper { mu1: seed.mu, c },
    )
}

/// `V2 = V1 - 2W'` with `W = -psi'/psi`, evaluated as `2 mu1 - V1 - 2 W^2`.
pub fn build_partner(v1: &SampledPotential, seed: &SeedState) -> Result<SampledPotential> {
    let grid = line_grid(v1)?;
    check_len(seed.psi.len(), grid.n())?;
    let values = partner_values(v1, &seed.psi, &seed.slope, seed.mu, grid)?;
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::Partner { mu1: seed.mu },
    )
}

fn partner_values(
    v1: &SampledPotential,
    psi: &[Complex64],
    slope: &[Complex64],
    mu: Complex64,
    grid: &Grid1D,
) -> Result<Vec<Complex64>> {
    (0..grid.n())
        .map(|j| {
            if psi[j].norm() == 0.0 {
                return Err(Error::Pole {
                    what: "partner seed",
                    x: grid.point(j),
                    min_abs: 0.0,
                    floor: 0.0,
                });
            }
            let w = -slope[j] / psi[j];
            Ok(2.0 * mu - v1.values[j] - 2.0 * w * w)
        })
        .collect()
}

/// Distance from 0 to the segment `[a, b]` in the complex plane; zero when a
/// sampled function changes sign between two grid points.
fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Partner potential together with the seed it was built from.
#[derive(Debug, Clone)]
pub struct CannataPotential {
    pub potential: SampledPotential,
    /// `a1 f1 + a2 f2` and its slope, each scaled per point by
    /// `exp(log_scale)`.
    pub seed: Vec<Complex64>,
    pub seed_slope: Vec<Complex64>,
    pub log_scale: Vec<f64>,
}

/// Partner of a real `V1` built from the complex seed `a1 f1 + a2 f2`, where
/// `f1`, `f2` solve the real-`mu1` equation with data `(1, 0)` and `(0, 1)`
/// at `x = 0`.
pub fn build_cannata(
    v1: &SampledPotential,
    mu1: f64,
    combo: (Complex64, Complex64),
) -> Result<CannataPotential> {
    let grid = line_grid(v1)?;
    if !v1.is_real() {
        return Err(Error::InvalidParameter(
            "Cannata construction needs a real base potential".into(),
        ));
    }
    let mu = Complex64::new(mu1, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let f1 = integrate_ode_2nd(&v1.values, grid, mu, (one, zero), Direction::Outward)?;
    let f2 = integrate_ode_2nd(&v1.values, grid, mu, (zero, one), Direction::Outward)?;
    let (a1, a2) = combo;
    let n = grid.n();
    let mut seed = Vec::with_capacity(n);
    let mut seed_slope = Vec::with_capacity(n);
    let mut log_scale = Vec::with_capacity(n);
    for j in 0..n {
        let s = f1.log_scale[j].max(f2.log_scale[j]);
        let e1 = (f1.log_scale[j] - s).exp();
        let e2 = (f2.log_scale[j] - s).exp();
        let p1 = a1 * f1.values[j] * e1;
        let p2 = a2 * f2.values[j] * e2;
        let psi = p1 + p2;
        if psi.norm() <= SEED_FLOOR * (p1.norm() + p2.norm()) {
            return Err(Error::Pole {
                what: "Cannata seed",
                x: grid.point(j),
                min_abs: psi.norm(),
                floor: SEED_FLOOR,
            });
        }
        seed.push(psi);
        seed_slope.push(a1 * f1.slopes[j] * e1 + a2 * f2.slopes[j] * e2);
        log_scale.push(s);
    }
    for j in 0..n - 1 {
        let next = seed[j + 1] * (log_scale[j + 1] - log_scale[j]).exp();
        let scale = seed[j].norm().max(next.norm());
        let dist = segment_distance_to_origin(seed[j], next);
        if dist <= SEED_FLOOR * scale {
            return Err(Error::Pole {
                what: "Cannata seed",
                x: grid.point(j),
                min_abs: dist,
                floor: SEED_FLOOR,
            });
        }
    }
    let values = partner_values(v1, &seed, &seed_slope, mu, grid)?;
    let potential = SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::Cannata { mu1, a1, a2 },
    )?;
    Ok(CannataPotential {
        potential,
        seed,
        seed_slope,
        log_scale,
    })
}
