//! Discrete versus continuum-like eigenvalues, and conjugate pairing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::EigenDecomposition;
use crate::potential::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationCriteria {
    /// Minimum fraction of `|psi|^2` inside the inner half of the domain.
    pub mass_fraction: f64,
    /// Maximum boundary amplitude relative to `max|psi|`.
    pub boundary_amplitude: f64,
}

impl Default for LocalizationCriteria {
    fn default() -> Self {
        Self {
            mass_fraction: 0.99,
            boundary_amplitude: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    Discrete,
    ContinuumLike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localization {
    /// Inner-half mass fraction, in `[0, 1]`.
    pub score: f64,
    /// Largest boundary amplitude over `max|psi|`.
    pub boundary: f64,
}

impl Localization {
    pub fn class(&self, criteria: &LocalizationCriteria) -> EigenClass {
        if self.score >= criteria.mass_fraction && self.boundary <= criteria.boundary_amplitude {
            EigenClass::Discrete
        } else {
            EigenClass::ContinuumLike
        }
    }
}

pub fn localization(vector: &[Complex64], domain: &Domain) -> Localization {
    let mut total = 0.0;
    let mut inner = 0.0;
    let mut peak: f64 = 0.0;
    let mut edge: f64 = 0.0;
    for (i, v) in vector.iter().enumerate() {
        let p = v.norm_sqr();
        total += p;
        if domain.is_inner(i) {
            inner += p;
        }
        peak = peak.max(p);
        if domain.is_boundary(i) {
            edge = edge.max(p);
        }
    }
    if total == 0.0 || !total.is_finite() {
        return Localization {
            score: 0.0,
            boundary: 1.0,
        };
    }
    Localization {
        score: (inner / total).clamp(0.0, 1.0),
        boundary: (edge / peak).sqrt(),
    }
}

/// Classification of every eigenpair; eigenvectors are required.
pub fn classify_eigenvalues(
    decomp: &EigenDecomposition,
    domain: &Domain,
    criteria: &LocalizationCriteria,
) -> Result<(Vec<EigenClass>, Vec<Localization>)> {
    let vectors = decomp
        .eigenvectors
        .as_ref()
        .ok_or(Error::MissingEigenvectors("classification"))?;
    let locs: Vec<Localization> = vectors.iter().map(|v| localization(v, domain)).collect();
    Ok((locs.iter().map(|l| l.class(criteria)).collect(), locs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    /// Largest distance between a matched `mu*` and its partner.
    pub residual: f64,
    /// Eigenvalues whose match is farther than the tolerance.
    pub unmatched: usize,
}

/// Greedy matching of every `mu` with a partner close to `mu*`; an
/// eigenvalue may partner itself at cost `2|Im mu|`. Pairs are taken in
/// order of increasing cost.
pub fn conjugate_pairing(eigs: &[Complex64], tol: f64) -> PairingReport {
    let m = eigs.len();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        candidates.push((2.0 * eigs[i].im.abs(), i, i));
        for j in i + 1..m {
            candidates.push(((eigs[i].conj() - eigs[j]).norm(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cost = vec![f64::NAN; m];
    let mut left = m;
    for (c, i, j) in candidates {
        if left == 0 {
            break;
        }
        if cost[i].is_nan() && cost[j].is_nan() {
            cost[i] = c;
            cost[j] = c;
            left -= if i == j { 1 } else { 2 };
        }
    }
    PairingReport {
        residual: cost.iter().copied().fold(0.0, f64::max),
        unmatched: cost.iter().filter(|c| **c > tol).count(),
    }
}
