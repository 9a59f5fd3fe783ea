//! Split-step Fourier integration of `i Psi_z + Laplacian Psi + V Psi = 0`.
//!
//! An eigenmode `exp(i mu z) psi` grows like `exp(-Im mu z)`, so the norm
//! history gives a dynamical check on the spectrum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::numerics::fourier::{laplacian_symbol, FourierTransform, FourierTransform2D};
use crate::potential::{Domain, SampledPotential};
use crate::spectrum::{full_spectrum_with, spectrum_2d, SpectrumOptions};

/// Largest admissible `dz * max|V|`.
pub const STABILITY_LIMIT: f64 = 0.5;
/// Norm beyond which propagation stops early.
pub const NORM_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationOptions {
    pub z_end: f64,
    pub dz: f64,
    /// Number of recorded norms after the initial one.
    pub samples: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            z_end: 50.0,
            dz: 0.01,
            samples: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Gaussian of the given width plus a seeded odd perturbation of
    /// relative size `perturbation`.
    Generic {
        width: f64,
        perturbation: f64,
        seed: u64,
    },
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationTrace {
    pub z_samples: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `ln |Psi|` over the final third of the trace.
    pub fitted_growth_rate: f64,
    pub initial_condition: InitialCondition,
    /// Set when the norm passed [`NORM_CAP`].
    pub stopped_early: bool,
    #[serde(skip)]
    pub final_field: Vec<Complex64>,
}

enum Kinetic {
    Line(FourierTransform),
    Plane(FourierTransform2D),
}

impl Kinetic {
    fn forward(&self, d: &mut [Complex64]) {
        match self {
            Kinetic::Line(f) => f.forward(d),
            Kinetic::Plane(f) => f.forward(d),
        }
    }

    fn inverse(&self, d: &mut [Complex64]) {
        match self {
            Kinetic::Line(f) => f.inverse(d),
            Kinetic::Plane(f) => f.inverse(d),
        }
    }
}

fn cell_area(domain: &Domain) -> f64 {
    match domain {
        Domain::Line(g) => g.spacing(),
        Domain::Plane(g) => g.x_axis().spacing() * g.y_axis().spacing(),
    }
}

fn l2_norm(psi: &[Complex64], area: f64) -> f64 {
    (psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * area).sqrt()
}

/// Strang splitting with the potential half-steps outside the kinetic step.
pub fn propagate(
    v: &SampledPotential,
    psi0: &[Complex64],
    opts: &PropagationOptions,
) -> Result<PropagationTrace> {
    propagate_labelled(v, psi0, opts, InitialCondition::Supplied)
}

fn propagate_labelled(
    v: &SampledPotential,
    psi0: &[Complex64],
    opts: &PropagationOptions,
    initial_condition: InitialCondition,
) -> Result<PropagationTrace> {
    check_len(psi0.len(), v.values.len())?;
    check_finite(psi0, "initial field")?;
    let PropagationOptions { z_end, dz, samples } = *opts;
    if !(dz > 0.0 && dz.is_finite() && z_end > 0.0 && z_end.is_finite()) || samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "need dz > 0, z_end > 0 and samples > 0 (dz = {dz}, z_end = {z_end}, samples = {samples})"
        )));
    }
    let product = dz * v.max_abs();
    if product >= STABILITY_LIMIT {
        return Err(Error::UnstableStep { product });
    }
    let (kinetic, symbol) = match &v.domain {
        Domain::Line(g) => (
            Kinetic::Line(FourierTransform::new(g.n())),
            g.wavenumbers().iter().map(|k| -k * k).collect::<Vec<f64>>(),
        ),
        Domain::Plane(g) => (
            Kinetic::Plane(FourierTransform2D::new(g.x_axis().n(), g.y_axis().n())),
            laplacian_symbol(g),
        ),
    };
    let steps = (z_end / dz).round().max(1.0) as usize;
    let dz = z_end / steps as f64;
    let half: Vec<Complex64> = v
        .values
        .iter()
        .map(|&u| (Complex64::i() * u * (0.5 * dz)).exp())
        .collect();
    let full: Vec<Complex64> = symbol
        .iter()
        .map(|&s| Complex64::from_polar(1.0, s * dz))
        .collect();
    let area = cell_area(&v.domain);

    let mut psi = psi0.to_vec();
    let mut z_samples = vec![0.0];
    let mut norms = vec![l2_norm(&psi, area)];
    if norms[0] == 0.0 {
        return Err(Error::InvalidParameter("initial field is zero".into()));
    }
    let mut stopped_early = false;
    let mut next_sample = 1;
    for step in 1..=steps {
        psi.iter_mut().zip(&half).for_each(|(p, h)| *p *= h);
        kinetic.forward(&mut psi);
        psi.iter_mut().zip(&full).for_each(|(p, f)| *p *= f);
        kinetic.inverse(&mut psi);
        psi.iter_mut().zip(&half).for_each(|(p, h)| *p *= h);
        if step * samples >= next_sample * steps {
            let n = l2_norm(&psi, area);
            z_samples.push(step as f64 * dz);
            norms.push(n);
            next_sample += 1;
            if !(n <= NORM_CAP) {
                stopped_early = true;
                break;
            }
        }
    }
    let fitted_growth_rate = fit_growth(&z_samples, &norms);
    Ok(PropagationTrace {
        z_samples,
        norms,
        fitted_growth_rate,
        initial_condition,
        stopped_early,
        final_field: psi,
    })
}

/// Slope of `ln(norm)` against `z` over the final third of the samples.
pub fn fit_growth(z: &[f64], norms: &[f64]) -> f64 {
    let m = z.len();
    let start = m - (m / 3).max(2).min(m);
    let pts: Vec<(f64, f64)> = z[start..]
        .iter()
        .zip(&norms[start..])
        .map(|(&a, &b)| (a, b.ln()))
        .collect();
    let k = pts.len() as f64;
    let mz = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mz).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mz) * (p.1 - ml)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Centered Gaussian with a seeded random perturbation odd in every
/// coordinate direction, so that modes of either parity are excited.
pub fn generic_initial_field(
    domain: &Domain,
    width: f64,
    perturbation: f64,
    seed: u64,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    match domain {
        Domain::Line(g) => {
            let (a, b) = (coef(), coef());
            g.sample(|x| {
                let r = x / width;
                (-r * r).exp() * (1.0 + perturbation * (a * r + b * r * r * r))
            })
        }
        Domain::Plane(g) => {
            let (a, b, c) = (coef(), coef(), coef());
            g.sample(|x, y| {
                let (rx, ry) = (x / width, y / width);
                (-(rx * rx + ry * ry)).exp()
                    * (1.0 + perturbation * (a * rx + b * ry + c * rx * ry))
            })
        }
    }
}

/// Propagates the generic initial field.
pub fn propagate_generic(
    v: &SampledPotential,
    opts: &PropagationOptions,
    width: f64,
    perturbation: f64,
    seed: u64,
) -> Result<PropagationTrace> {
    let psi0 = generic_initial_field(&v.domain, width, perturbation, seed);
    propagate_labelled(
        v,
        &psi0,
        opts,
        InitialCondition::Generic {
            width,
            perturbation,
            seed,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthComparison {
    pub predicted: f64,
    pub measured: f64,
    /// `|measured - predicted| / predicted`, or `|measured|` when nothing
    /// is predicted to grow.
    pub relative_gap: f64,
}

/// Growth rate `max(-Im mu)` of the discrete spectrum against the rate
/// measured from a generic propagation.
pub fn growth_vs_spectrum(
    v: &SampledPotential,
    spectrum: &SpectrumOptions,
    opts: &PropagationOptions,
    seed: u64,
) -> Result<GrowthComparison> {
    let s = match v.domain {
        Domain::Line(_) => full_spectrum_with(v, spectrum)?,
        Domain::Plane(_) => spectrum_2d(v, 12, spectrum)?,
    };
    let predicted = s.max_growth_rate();
    let trace = propagate_generic(v, opts, 1.0, 0.1, seed)?;
    let measured = trace.fitted_growth_rate;
    let relative_gap = if predicted > 0.0 {
        (measured - predicted).abs() / predicted
    } else {
        measured.abs()
    };
    Ok(GrowthComparison {
        predicted,
        measured,
        relative_gap,
    })
}

/// Observed convergence order from three runs at `dz`, `dz/2`, `dz/4`,
/// measured on the final fields.
pub fn richardson_order(
    v: &SampledPotential,
    psi0: &[Complex64],
    z_end: f64,
    dz: f64,
) -> Result<f64> {
    let run = |h: f64| {
        propagate(
            v,
            psi0,
            &PropagationOptions {
                z_end,
                dz: h,
                samples: 1,
            },
        )
        .map(|t| t.final_field)
    };
    let a = run(dz)?;
    let b = run(dz / 2.0)?;
    let c = run(dz / 4.0)?;
    let diff = |p: &[Complex64], q: &[Complex64]| {
        p.iter()
            .zip(q)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    Ok((diff(&a, &b) / diff(&b, &c)).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Grid1D, Grid2D};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_propagation_is_unitary() {
        let g = Grid1D::new(256, 20.0).unwrap();
        let v = SampledPotential::constant(g, 0.0);
        let psi0 = g.sample(|x| c((-x * x).exp(), 0.0));
        let t = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 5.0,
                dz: 0.01,
                samples: 50,
            },
        )
        .unwrap();
        let n0 = t.norms[0];
        assert!(t.norms.iter().all(|n| (n - n0).abs() < 1e-10 * n0));
        assert!(t.z_samples.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t.z_samples.len(), 51);
    }

    #[test]
    fn real_potential_conserves_norm() {
        let g = Grid1D::new(256, 20.0).unwrap();
        let v =
            SampledPotential::line(g, g.sample(|x| c(2.0 / x.cosh().powi(2), 0.0)), "pt").unwrap();
        let psi0 = generic_initial_field(&v.domain, 1.0, 0.1, 3);
        let t = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 50.0,
                dz: 0.01,
                samples: 100,
            },
        )
        .unwrap();
        let n0 = t.norms[0];
        assert!(t.norms.iter().all(|n| (n - n0).abs() < 1e-8 * n0));
    }

    #[test]
    fn constant_imaginary_potential_grows_at_its_rate() {
        // V = -0.3 i gives Psi_z = 0.3 Psi for every mode.
        let g = Grid1D::new(64, 10.0).unwrap();
        let v = SampledPotential::line(g, vec![c(0.0, -0.3); 64], "gain").unwrap();
        let psi0 = generic_initial_field(&v.domain, 1.0, 0.1, 1);
        let t = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 10.0,
                dz: 0.05,
                samples: 30,
            },
        )
        .unwrap();
        assert!(
            (t.fitted_growth_rate - 0.3).abs() < 1e-10,
            "{}",
            t.fitted_growth_rate
        );
    }

    #[test]
    fn strang_splitting_is_second_order() {
        let g = Grid1D::new(128, 15.0).unwrap();
        let v =
            SampledPotential::line(g, g.sample(|x| c(2.0, 0.5 * x) / x.cosh().powi(2)), "scarf")
                .unwrap();
        let psi0 = generic_initial_field(&v.domain, 1.0, 0.2, 5);
        let order = richardson_order(&v, &psi0, 1.0, 0.02).unwrap();
        assert!(order >= 1.9, "order {order}");
    }

    #[test]
    fn unstable_step_and_bad_input_are_rejected() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let v = SampledPotential::constant(g, 10.0);
        let psi0 = vec![c(1.0, 0.0); 64];
        let r = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 1.0,
                dz: 0.1,
                samples: 10,
            },
        );
        assert!(matches!(r, Err(Error::UnstableStep { .. })));
        let r = propagate(&v, &psi0[..10], &PropagationOptions::default());
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
        let r = propagate(
            &v,
            &vec![c(0.0, 0.0); 64],
            &PropagationOptions {
                z_end: 1.0,
                dz: 0.01,
                samples: 10,
            },
        );
        assert!(r.is_err());
    }

    #[test]
    fn runaway_growth_stops_early() {
        let g = Grid1D::new(32, 5.0).unwrap();
        let v = SampledPotential::line(g, vec![c(0.0, -4.0); 32], "gain").unwrap();
        let psi0 = vec![c(1.0, 0.0); 32];
        let t = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 20.0,
                dz: 0.01,
                samples: 200,
            },
        )
        .unwrap();
        assert!(t.stopped_early);
        assert!(*t.norms.last().unwrap() > NORM_CAP);
        assert!((t.fitted_growth_rate - 4.0).abs() < 1e-8);
    }

    #[test]
    fn plane_free_propagation_is_unitary() {
        let g = Grid2D::square(32, 8.0).unwrap();
        let v = SampledPotential::new(
            Domain::Plane(g),
            vec![c(0.0, 0.0); 1024],
            crate::potential::PotentialSpec::Tabulated {
                label: "zero".into(),
            },
        )
        .unwrap();
        let psi0 = generic_initial_field(&v.domain, 1.5, 0.1, 2);
        let t = propagate(
            &v,
            &psi0,
            &PropagationOptions {
                z_end: 2.0,
                dz: 0.01,
                samples: 20,
            },
        )
        .unwrap();
        let n0 = t.norms[0];
        assert!(t.norms.iter().all(|n| (n - n0).abs() < 1e-10 * n0));
    }
}
