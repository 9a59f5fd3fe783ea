//! The reality predicate: is there a classified-discrete eigenvalue with
//! `|Im mu| > im_tol`?

use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{eig_dense_with, inverse_iteration, EigConfig};
use crate::potential::SampledPotential;
use crate::spectrum::{
    assemble_operator_with_limit, localization, EigenClass, LocalizationCriteria,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateOutcome {
    pub complex: bool,
    /// Classified-discrete eigenvalues off the real axis that were found;
    /// the search stops at the first one when candidates are refined one
    /// at a time.
    pub complex_discrete: Vec<Complex64>,
    /// Off-axis eigenvalues examined.
    pub candidates: usize,
}

/// Eigenvalues are computed without vectors. Up to `max_candidates`
/// off-axis eigenvalues, largest real part first, get an eigenvector by
/// inverse iteration; if none of them is localized and more candidates
/// remain, every vector is computed.
pub fn complex_discrete_present(
    v: &SampledPotential,
    im_tol: f64,
    criteria: &LocalizationCriteria,
    max_order: usize,
    max_candidates: usize,
) -> Result<PredicateOutcome> {
    let m = assemble_operator_with_limit(v, max_order)?;
    let cfg = EigConfig { max_order };
    let values = eig_dense_with(&m, false, &cfg)?.eigenvalues;
    let mut candidates: Vec<Complex64> =
        values.into_iter().filter(|z| z.im.abs() > im_tol).collect();
    candidates.sort_by(|a, b| b.re.total_cmp(&a.re));
    let mut found = Vec::new();
    for &z in candidates.iter().take(max_candidates) {
        let (mu, vec, _) = inverse_iteration(&m, z)?;
        if mu.im.abs() > im_tol
            && localization(&vec, &v.domain).class(criteria) == EigenClass::Discrete
        {
            found.push(mu);
            // One localized off-axis eigenvalue settles the predicate.
            break;
        }
    }
    if found.is_empty() && candidates.len() > max_candidates {
        let d = eig_dense_with(&m, true, &cfg)?;
        let vecs = d.eigenvectors.expect("requested");
        for (mu, vec) in d.eigenvalues.iter().zip(&vecs) {
            if mu.im.abs() > im_tol
                && localization(vec, &v.domain).class(criteria) == EigenClass::Discrete
            {
                found.push(*mu);
            }
        }
    }
    Ok(PredicateOutcome {
        complex: !found.is_empty(),
        complex_discrete: found,
        candidates: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eig::DEFAULT_MAX_ORDER;
    use crate::numerics::Grid1D;

    #[test]
    fn real_well_is_not_complex() {
        let g = Grid1D::new(256, 20.0).unwrap();
        let v = SampledPotential::line(
            g,
            g.sample(|x| Complex64::new(2.0 / x.cosh().powi(2), 0.0)),
            "pt",
        )
        .unwrap();
        let out = complex_discrete_present(
            &v,
            1e-6,
            &LocalizationCriteria::default(),
            DEFAULT_MAX_ORDER,
            16,
        )
        .unwrap();
        assert!(!out.complex);
        assert_eq!(out.candidates, 0);
    }

    #[test]
    fn complex_bound_state_is_detected() {
        // V = (2 + i) sech^2 x keeps a localized bound state with Im mu != 0.
        let g = Grid1D::new(256, 20.0).unwrap();
        let v = SampledPotential::line(
            g,
            g.sample(|x| Complex64::new(2.0, 1.0) / x.cosh().powi(2)),
            "c",
        )
        .unwrap();
        let out = complex_discrete_present(
            &v,
            1e-6,
            &LocalizationCriteria::default(),
            DEFAULT_MAX_ORDER,
            16,
        )
        .unwrap();
        assert!(out.complex, "{out:?}");
        assert!(out.complex_discrete.iter().all(|z| z.re > 0.5));
    }
}
