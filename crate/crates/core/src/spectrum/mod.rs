//! Spectra of Schrodinger operators with sampled complex potentials.
//!
//! All reality statements are made about classified-discrete eigenvalues;
//! discretized continua of non-normal operators need not hug the real axis.

pub mod classify;
pub mod iterative;
pub mod operator;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use classify::{
    classify_eigenvalues, conjugate_pairing, localization, EigenClass, Localization,
    LocalizationCriteria, PairingReport,
};
pub use iterative::{shift_invert_eigs, IterativeOptions};
pub use operator::{assemble_bloch_operator, assemble_operator, assemble_operator_with_limit};

use crate::error::{Error, Result};
use crate::numerics::eig::DEFAULT_MAX_ORDER;
use crate::numerics::{eig_dense_with, EigConfig, Grid1D};
use crate::potential::{PotentialSpec, SampledPotential};

/// Default `|Im mu|` below which a discrete eigenvalue counts as real.
pub const DEFAULT_IM_TOL: f64 = 1e-6;
/// Band around the real axis allowed for continuum-like eigenvalues.
pub const CONTINUUM_BAND: f64 = 1e-3;
/// Largest `|V|` at the domain edge, relative to `max|V|`, for a potential
/// to count as localized.
pub const DECAY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub criteria: LocalizationCriteria,
    pub max_order: usize,
    pub keep_vectors: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            criteria: LocalizationCriteria::default(),
            max_order: DEFAULT_MAX_ORDER,
            keep_vectors: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealityVerdict {
    AllReal,
    ComplexPair,
    ContinuumOnly,
}

/// Eigenvalues sorted by real then imaginary part, with classification.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub classification: Vec<EigenClass>,
    pub localization_scores: Vec<f64>,
    pub boundary_amplitudes: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// Conjugate-pairing residual of the discrete eigenvalues.
    pub pairing_residual: f64,
    pub continuum_edge: f64,
    pub spec: PotentialSpec,
}

impl SpectrumResult {
    pub fn discrete_indices(&self) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|&i| self.classification[i] == EigenClass::Discrete)
            .collect()
    }

    pub fn discrete(&self) -> Vec<Complex64> {
        self.discrete_indices()
            .into_iter()
            .map(|i| self.eigenvalues[i])
            .collect()
    }

    pub fn max_discrete_imag(&self) -> f64 {
        self.discrete()
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_continuum_imag(&self) -> f64 {
        (0..self.eigenvalues.len())
            .filter(|&i| self.classification[i] == EigenClass::ContinuumLike)
            .map(|i| self.eigenvalues[i].im.abs())
            .fold(0.0, f64::max)
    }

    pub fn verdict(&self, im_tol: f64) -> RealityVerdict {
        let d = self.discrete();
        if d.is_empty() {
            RealityVerdict::ContinuumOnly
        } else if d.iter().any(|z| z.im.abs() > im_tol) {
            RealityVerdict::ComplexPair
        } else {
            RealityVerdict::AllReal
        }
    }

    /// Growth rate `max(-Im mu)` over discrete eigenvalues, clamped at zero.
    pub fn max_growth_rate(&self) -> f64 {
        self.discrete().iter().map(|z| -z.im).fold(0.0, f64::max)
    }
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn full_spectrum(v: &SampledPotential, want_vectors: bool) -> Result<SpectrumResult> {
    full_spectrum_with(
        v,
        &SpectrumOptions {
            keep_vectors: want_vectors,
            ..Default::default()
        },
    )
}

pub fn full_spectrum_with(v: &SampledPotential, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let m = assemble_operator_with_limit(v, opts.max_order)?;
    let decomp = eig_dense_with(
        &m,
        true,
        &EigConfig {
            max_order: opts.max_order,
        },
    )?;
    if !decomp.residuals_converged() {
        log::warn!(
            "eigenpair residual {:.3e} exceeds tolerance (matrix norm {:.3e})",
            decomp.max_residual(),
            decomp.matrix_norm
        );
    }
    let (classes, locs) = classify_eigenvalues(&decomp, &v.domain, &opts.criteria)?;
    let mut order: Vec<usize> = (0..decomp.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| sort_key(&decomp.eigenvalues[a], &decomp.eigenvalues[b]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let classification: Vec<EigenClass> = order.iter().map(|&i| classes[i]).collect();
    let discrete: Vec<Complex64> = (0..eigenvalues.len())
        .filter(|&i| classification[i] == EigenClass::Discrete)
        .map(|i| eigenvalues[i])
        .collect();
    let eigenvectors = if opts.keep_vectors {
        let mut vecs = decomp.eigenvectors.expect("requested");
        Some(
            order
                .iter()
                .map(|&i| std::mem::take(&mut vecs[i]))
                .collect(),
        )
    } else {
        None
    };
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        classification,
        localization_scores: order.iter().map(|&i| locs[i].score).collect(),
        boundary_amplitudes: order.iter().map(|&i| locs[i].boundary).collect(),
        residual_norms: order.iter().map(|&i| decomp.residual_norms[i]).collect(),
        pairing_residual: conjugate_pairing(&discrete, DEFAULT_IM_TOL).residual,
        continuum_edge: v.continuum_edge(),
        spec: v.spec.clone(),
    })
}

/// 2D spectrum: dense when the order fits, otherwise the `k_requested`
/// eigenvalues of largest real part by shift-invert iteration.
pub fn spectrum_2d(
    v: &SampledPotential,
    k_requested: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    if v.domain.as_plane().is_none() {
        return Err(Error::InvalidParameter(
            "spectrum_2d needs a 2D potential".into(),
        ));
    }
    if v.values.len() <= opts.max_order {
        return full_spectrum_with(v, opts);
    }
    let it = shift_invert_eigs(
        v,
        &IterativeOptions {
            k: k_requested,
            ..Default::default()
        },
    )?;
    let locs: Vec<Localization> = it
        .vectors
        .iter()
        .map(|x| localization(x, &v.domain))
        .collect();
    let mut order: Vec<usize> = (0..it.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| sort_key(&it.eigenvalues[a], &it.eigenvalues[b]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| it.eigenvalues[i]).collect();
    let classification: Vec<EigenClass> = order
        .iter()
        .map(|&i| locs[i].class(&opts.criteria))
        .collect();
    let discrete: Vec<Complex64> = (0..eigenvalues.len())
        .filter(|&i| classification[i] == EigenClass::Discrete)
        .map(|i| eigenvalues[i])
        .collect();
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors: opts
            .keep_vectors
            .then(|| order.iter().map(|&i| it.vectors[i].clone()).collect()),
        classification,
        localization_scores: order.iter().map(|&i| locs[i].score).collect(),
        boundary_amplitudes: order.iter().map(|&i| locs[i].boundary).collect(),
        residual_norms: order.iter().map(|&i| it.residuals[i]).collect(),
        pairing_residual: conjugate_pairing(&discrete, DEFAULT_IM_TOL).residual,
        continuum_edge: v.continuum_edge(),
        spec: v.spec.clone(),
    })
}

/// True when no discrete eigenvalue is real and above the continuum edge.
pub fn no_real_discrete_check(v: &SampledPotential, opts: &SpectrumOptions) -> Result<bool> {
    if !matches!(v.spec, PotentialSpec::EtaP { .. }) {
        return Err(Error::InvalidParameter(
            "check applies to eta-P potentials".into(),
        ));
    }
    require_decay(v)?;
    let s = full_spectrum_with(v, opts)?;
    Ok(!s
        .discrete()
        .iter()
        .any(|z| z.im.abs() < DEFAULT_IM_TOL && z.re > s.continuum_edge))
}

pub fn require_decay(v: &SampledPotential) -> Result<()> {
    let boundary = v.boundary_magnitude();
    let tolerance = DECAY_TOLERANCE * v.max_abs().max(f64::MIN_POSITIVE);
    if boundary > tolerance {
        return Err(Error::NotDecayed {
            boundary,
            tolerance,
        });
    }
    Ok(())
}

/// Eigenvalues of the Bloch operator at quasi-momentum `k` for a periodic
/// potential sampled over one period.
pub fn bloch_spectrum(v: &[Complex64], grid: &Grid1D, k: f64) -> Result<Vec<Complex64>> {
    let m = assemble_bloch_operator(v, grid, k)?;
    let mut e = crate::numerics::eig_dense(&m, false)?.eigenvalues;
    e.sort_by(sort_key);
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{harmonic_well, GeneratorFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poschl_teller_single_bound_state() {
        let g = Grid1D::new(512, 20.0).unwrap();
        let v = SampledPotential::line(
            g,
            g.sample(|x| c(2.0 / x.cosh().powi(2), 0.0)),
            "poschl-teller",
        )
        .unwrap();
        let s = full_spectrum(&v, false).unwrap();
        let d = s.discrete();
        assert_eq!(d.len(), 1, "{d:?}");
        assert!((d[0] - c(1.0, 0.0)).norm() < 1e-8);
        assert!(s.eigenvalues.iter().all(|z| z.im.abs() < 1e-10));
        assert_eq!(s.verdict(DEFAULT_IM_TOL), RealityVerdict::AllReal);
    }

    #[test]
    fn harmonic_ladder() {
        let g = Grid1D::new(256, 12.0).unwrap();
        let s = full_spectrum(&harmonic_well(&g), false).unwrap();
        let mut top: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        top.sort_by(|a, b| b.total_cmp(a));
        for (k, mu) in top.iter().take(10).enumerate() {
            assert!((mu + (2 * k + 1) as f64).abs() < 1e-6, "level {k}: {mu}");
        }
    }

    #[test]
    fn zero_potential_has_no_discrete_eigenvalues() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let s = full_spectrum(&SampledPotential::constant(g, 0.0), false).unwrap();
        assert!(s.discrete().is_empty());
        assert_eq!(s.verdict(DEFAULT_IM_TOL), RealityVerdict::ContinuumOnly);
    }

    #[test]
    fn sech_type1_bound_state() {
        // mu = 1/4 decays like exp(-|x|/2); L = 40 brings the edge below 1e-8.
        let g = Grid1D::new(1024, 40.0).unwrap();
        let sech = GeneratorFunction::SingleSech {
            amplitude: 1.0,
            width: 1.0,
            offset: 0.0,
        };
        let v = crate::potential::build_type1(&sech, &g).unwrap();
        let d = full_spectrum(&v, false).unwrap().discrete();
        assert_eq!(d.len(), 1, "{d:?}");
        assert!((d[0] - c(0.25, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn eigenvalues_are_sorted() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let v = SampledPotential::line(g, g.sample(|x| c(0.0, (-(x - 1.0).powi(2)).exp())), "gain")
            .unwrap();
        let s = full_spectrum(&v, true).unwrap();
        assert!(s
            .eigenvalues
            .windows(2)
            .all(|w| sort_key(&w[0], &w[1]).is_le()));
        assert_eq!(s.eigenvectors.unwrap().len(), 64);
    }
}
