//! Zakharov-Shabat problem `v1' + i zeta v1 = g v2`, `v2' - i zeta v2 = -g v1`
//! for real `g`, solved as one dense eigenproblem in `zeta`:
//! `zeta v = [[iD, -iG], [-iG, -iD]] v`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::numerics::{
    differentiation_matrix, eig_dense, spectral_derivative_real, ComplexMatrix, Grid1D,
};
use crate::potential::{build_type1, Domain, GeneratorFunction};
use crate::spectrum::{full_spectrum, EigenClass, Localization, LocalizationCriteria};

/// Largest `|g|` allowed at the domain edge.
pub const BOUNDARY_DECAY: f64 = 1e-8;

/// Default ZS classification: mass fraction only. The boundary test is
/// switched off because slowly decaying states near `zeta = 0` are common.
pub fn default_zs_criteria() -> LocalizationCriteria {
    LocalizationCriteria {
        mass_fraction: 0.99,
        boundary_amplitude: 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZsSymmetry {
    /// Hausdorff distance between the discrete set and its negation.
    pub plus_minus: f64,
    /// Hausdorff distance between the discrete set and its conjugate.
    pub conjugate: f64,
}

#[derive(Debug, Clone)]
pub struct ZsResult {
    pub zeta: Vec<Complex64>,
    /// `-zeta^2`, index-aligned with `zeta`.
    pub mu: Vec<Complex64>,
    pub classification: Vec<EigenClass>,
    pub localization: Vec<Localization>,
    pub symmetry: ZsSymmetry,
}

impl ZsResult {
    pub fn discrete_zeta(&self) -> Vec<Complex64> {
        self.select(&self.zeta)
    }

    pub fn discrete_mu(&self) -> Vec<Complex64> {
        self.select(&self.mu)
    }

    fn select(&self, from: &[Complex64]) -> Vec<Complex64> {
        from.iter()
            .zip(&self.classification)
            .filter(|(_, c)| **c == EigenClass::Discrete)
            .map(|(z, _)| *z)
            .collect()
    }
}

/// Largest distance from a point of either set to the nearest point of the
/// other; zero for two empty sets, infinite if only one is empty.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |p: &[Complex64], q: &[Complex64]| {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        0.0
    } else {
        one_way(a, b).max(one_way(b, a))
    }
}

fn validate(g: &[f64], grid: &Grid1D) -> Result<()> {
    check_len(g.len(), grid.n())?;
    if let Some(index) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "ZS potential",
            index,
        });
    }
    let boundary = g[0].abs().max(g[grid.n() - 1].abs());
    if boundary >= BOUNDARY_DECAY {
        return Err(Error::NotDecayed {
            boundary,
            tolerance: BOUNDARY_DECAY,
        });
    }
    Ok(())
}

pub fn zs_matrix(g: &[f64], grid: &Grid1D) -> Result<ComplexMatrix> {
    check_len(g.len(), grid.n())?;
    let n = grid.n();
    let d = differentiation_matrix(grid, 1);
    let i = Complex64::new(0.0, 1.0);
    let mut m = ComplexMatrix::zeros(2 * n);
    for r in 0..n {
        for c in 0..n {
            m.set(r, c, i * d[r * n + c]);
            m.set(n + r, n + c, -i * d[r * n + c]);
        }
        m.set(r, n + r, -i * g[r]);
        m.set(n + r, r, -i * g[r]);
    }
    Ok(m)
}

pub fn zs_eigenvalues(g: &[f64], grid: &Grid1D) -> Result<ZsResult> {
    zs_eigenvalues_with(g, grid, &default_zs_criteria())
}

pub fn zs_eigenvalues_with(
    g: &[f64],
    grid: &Grid1D,
    criteria: &LocalizationCriteria,
) -> Result<ZsResult> {
    validate(g, grid)?;
    let n = grid.n();
    let decomp = eig_dense(&zs_matrix(g, grid)?, true)?;
    let domain = Domain::Line(*grid);
    let vectors = decomp.eigenvectors.as_ref().expect("requested");
    let localization: Vec<Localization> = vectors
        .iter()
        .map(|v| {
            // Fold both components onto the grid: |v1|^2 + |v2|^2.
            let folded: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new((v[j].norm_sqr() + v[n + j].norm_sqr()).sqrt(), 0.0))
                .collect();
            crate::spectrum::localization(&folded, &domain)
        })
        .collect();
    let mut order: Vec<usize> = (0..decomp.eigenvalues.len()).collect();
    let z = &decomp.eigenvalues;
    order.sort_by(|&a, &b| {
        z[a].im
            .total_cmp(&z[b].im)
            .then(z[a].re.total_cmp(&z[b].re))
    });
    let zeta: Vec<Complex64> = order.iter().map(|&i| z[i]).collect();
    let localization: Vec<Localization> = order.iter().map(|&i| localization[i]).collect();
    let classification: Vec<EigenClass> = localization.iter().map(|l| l.class(criteria)).collect();
    let discrete: Vec<Complex64> = zeta
        .iter()
        .zip(&classification)
        .filter(|(_, c)| **c == EigenClass::Discrete)
        .map(|(z, _)| *z)
        .collect();
    let negated: Vec<Complex64> = discrete.iter().map(|z| -z).collect();
    let conjugated: Vec<Complex64> = discrete.iter().map(|z| z.conj()).collect();
    Ok(ZsResult {
        mu: zeta.iter().map(|z| -z * z).collect(),
        zeta,
        classification,
        localization,
        symmetry: ZsSymmetry {
            plus_minus: hausdorff(&discrete, &negated),
            conjugate: hausdorff(&discrete, &conjugated),
        },
    })
}

/// Two-way distance between the discrete Schrodinger eigenvalues of
/// `V = g^2 + i g'` and the mapped discrete ZS eigenvalues, each side
/// measured against the other solver's full spectrum so that borderline
/// classifications do not register as disagreement.
pub fn zs_to_schrodinger_check(g: &[f64], grid: &Grid1D) -> Result<f64> {
    let zs = zs_eigenvalues(g, grid)?;
    let gc: Vec<Complex64> = g.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let dg: Vec<Complex64> = spectral_derivative_real(g, grid, 1)?
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    let generator = GeneratorFunction::tabulated(gc, vec![dg]);
    let schr = full_spectrum(&build_type1(&generator, grid)?, false)?;
    let nearest = |x: &Complex64, set: &[Complex64]| {
        set.iter()
            .map(|y| (x - y).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let a = zs
        .discrete_mu()
        .iter()
        .map(|m| nearest(m, &schr.eigenvalues))
        .fold(0.0, f64::max);
    let b = schr
        .discrete()
        .iter()
        .map(|m| nearest(m, &zs.mu))
        .fold(0.0, f64::max);
    Ok(a.max(b))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KlausShawReport {
    pub single_humped: bool,
    pub all_imaginary: bool,
    pub discrete_zeta: Vec<Complex64>,
}

/// `g` keeps one sign and its slope changes sign exactly once. Slopes below
/// `1e-8 max|g'|` are ignored as numerical noise.
pub fn is_single_humped(g: &[f64], grid: &Grid1D) -> Result<bool> {
    check_len(g.len(), grid.n())?;
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(false);
    }
    let one_sign = g.iter().all(|v| *v >= -1e-12 * scale) || g.iter().all(|v| *v <= 1e-12 * scale);
    let dg = spectral_derivative_real(g, grid, 1)?;
    let dscale = dg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<f64> = dg
        .iter()
        .filter(|v| v.abs() > 1e-8 * dscale)
        .map(|v| v.signum())
        .collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    Ok(one_sign && changes == 1)
}

pub fn klaus_shaw_test(g: &[f64], grid: &Grid1D) -> Result<KlausShawReport> {
    let single_humped = is_single_humped(g, grid)?;
    let discrete_zeta = zs_eigenvalues(g, grid)?.discrete_zeta();
    let max_im = discrete_zeta.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let tol = (1e-6 * max_im).max(1e-8);
    Ok(KlausShawReport {
        single_humped,
        all_imaginary: discrete_zeta.iter().all(|z| z.re.abs() < tol),
        discrete_zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Jost coefficient `a(i eta)` of the ZS problem by RK4 shooting on
    /// `[-x_max, x_max]`; zeros in `eta > 0` are the discrete eigenvalues.
    fn jost_a(g: &dyn Fn(f64) -> f64, eta: f64, x_max: f64, steps: usize) -> f64 {
        let h = 2.0 * x_max / steps as f64;
        let f = |x: f64, v: [f64; 2]| [eta * v[0] + g(x) * v[1], -eta * v[1] - g(x) * v[0]];
        let mut v = [1.0, 0.0];
        let mut x = -x_max;
        for _ in 0..steps {
            let k1 = f(x, v);
            let k2 = f(
                x + h / 2.0,
                [v[0] + h / 2.0 * k1[0], v[1] + h / 2.0 * k1[1]],
            );
            let k3 = f(
                x + h / 2.0,
                [v[0] + h / 2.0 * k2[0], v[1] + h / 2.0 * k2[1]],
            );
            let k4 = f(x + h, [v[0] + h * k3[0], v[1] + h * k3[1]]);
            for c in 0..2 {
                v[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            x += h;
        }
        // Start was exp(eta x) at -x_max; the ratio removes both exponentials.
        v[0] * (-2.0 * eta * x_max).exp()
    }

    fn shooting_roots(g: &dyn Fn(f64) -> f64, eta_max: f64) -> Vec<f64> {
        let scan: Vec<f64> = (1..200).map(|k| eta_max * k as f64 / 200.0).collect();
        let a = |e: f64| jost_a(g, e, 25.0, 20000);
        let mut roots = vec![];
        for w in scan.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (mut flo, fhi) = (a(lo), a(hi));
            if flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let fm = a(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        roots
    }

    fn sech(a: f64) -> impl Fn(f64) -> f64 {
        move |x: f64| a / x.cosh()
    }

    #[test]
    fn shooting_oracle_reproduces_known_sech_eigenvalues() {
        let r = shooting_roots(&sech(1.0), 2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-8);
        let r = shooting_roots(&sech(1.8), 2.0);
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] - 0.3).abs() < 1e-6 && (r[1] - 1.3).abs() < 1e-6);
    }

    #[test]
    fn sech_gives_imaginary_pair() {
        let grid = Grid1D::new(256, 20.0).unwrap();
        let g = grid.sample(sech(1.0));
        let r = zs_eigenvalues(&g, &grid).unwrap();
        let d = r.discrete_zeta();
        assert_eq!(d.len(), 2, "{d:?}");
        let oracle = shooting_roots(&sech(1.0), 2.0);
        for z in &d {
            assert!((z.im.abs() - oracle[0]).abs() < 1e-4 && z.re.abs() < 1e-4);
        }
        assert!(r.symmetry.plus_minus < 1e-8);
        for (z, m) in r.zeta.iter().zip(&r.mu) {
            assert_eq!(*m, -z * z);
        }
    }

    #[test]
    fn zero_potential_has_no_discrete_eigenvalues() {
        let grid = Grid1D::new(64, 10.0).unwrap();
        let r = zs_eigenvalues(&vec![0.0; 64], &grid).unwrap();
        assert!(r.discrete_zeta().is_empty());
        assert!(r.zeta.iter().all(|z| z.im.abs() < 1e-12));
        assert_eq!(zs_to_schrodinger_check(&vec![0.0; 64], &grid).unwrap(), 0.0);
    }

    #[test]
    fn undecayed_input_is_rejected() {
        let grid = Grid1D::new(64, 3.0).unwrap();
        let g = grid.sample(sech(1.0));
        assert!(matches!(
            zs_eigenvalues(&g, &grid),
            Err(Error::NotDecayed { .. })
        ));
    }

    #[test]
    fn klaus_shaw_cases() {
        let grid = Grid1D::new(256, 20.0).unwrap();
        let one = klaus_shaw_test(&grid.sample(sech(1.0)), &grid).unwrap();
        assert!(one.single_humped && one.all_imaginary);
        let strong = klaus_shaw_test(&grid.sample(sech(1.8)), &grid).unwrap();
        assert!(strong.single_humped && strong.all_imaginary);
        let mut ims: Vec<f64> = strong
            .discrete_zeta
            .iter()
            .filter(|z| z.im > 0.0)
            .map(|z| z.im)
            .collect();
        ims.sort_by(f64::total_cmp);
        let oracle = shooting_roots(&sech(1.8), 2.0);
        assert_eq!(ims.len(), 2, "{ims:?}");
        for (a, b) in ims.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
        let wide = Grid1D::new(320, 25.0).unwrap();
        let double = wide.sample(|x| 1.0 / (x - 3.0).cosh() - 1.0 / (x + 3.0).cosh());
        assert!(!klaus_shaw_test(&double, &wide).unwrap().single_humped);
    }

    #[test]
    fn cross_check_with_schrodinger_for_sech() {
        let grid = Grid1D::new(256, 20.0).unwrap();
        let d = zs_to_schrodinger_check(&grid.sample(sech(1.0)), &grid).unwrap();
        assert!(d < 1e-4, "discrepancy {d}");
    }
}
