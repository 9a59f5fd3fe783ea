//! mKdV soliton potentials `V = u^2 + i u_x`.
//!
//! Two-soliton profiles given by phases use the closed `G/F` form with
//! analytic derivative. Everything else goes through the determinant form,
//! evaluated as `u = -2 Im tr(M^-1 M')` with `M = diag(m_n) + C`,
//! `C_nm = 1/(i(eta_n + eta_m))`, `m_n = exp(2 eta_n x) / b_n` and
//! `b_n = -c_n exp(8 eta_n^3 t)`. Rows and columns of `M` are balanced by
//! `max(1, |m_n|)^(1/2)` in log space, so no exponential is ever formed.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sampled::{Domain, PotentialSpec, SampledPotential};
use crate::error::{Error, Result};
use crate::numerics::{spectral_derivative_real, Grid1D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolitonData {
    /// Real norming constants `c_n` of the determinant form.
    Norming(Vec<f64>),
    /// Shifts `delta_n` and signs `epsilon_n = +-1`. For a single soliton
    /// `u = 2 eta eps sech(2 eta x + delta - 8 eta^3 t)`.
    Phases { deltas: Vec<f64>, signs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub etas: Vec<f64>,
    pub data: SolitonData,
    pub t: f64,
}

impl SolitonParams {
    pub fn with_phases(etas: Vec<f64>, deltas: Vec<f64>, signs: Vec<f64>, t: f64) -> Self {
        Self {
            etas,
            data: SolitonData::Phases { deltas, signs },
            t,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.etas.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "at least one soliton is required".into(),
            ));
        }
        if let Some(e) = self.etas.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {e}"
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (self.etas[i] - self.etas[j]).abs() <= 1e-12 * self.etas[i].max(self.etas[j]) {
                    return Err(Error::CoincidentEtas { i, j });
                }
            }
        }
        let lens_ok = match &self.data {
            SolitonData::Norming(c) => c.len() == n && c.iter().all(|c| c.is_finite() && *c != 0.0),
            SolitonData::Phases { deltas, signs } => {
                deltas.len() == n && signs.len() == n && signs.iter().all(|s| s.abs() == 1.0)
            }
        };
        if !lens_ok || !self.t.is_finite() {
            return Err(Error::InvalidParameter(
                "soliton constants must match the eta count (nonzero norming constants, signs +-1)"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Norming constants equivalent to the phase description.
    pub fn norming_constants(&self) -> Vec<f64> {
        match &self.data {
            SolitonData::Norming(c) => c.clone(),
            SolitonData::Phases { deltas, signs } => {
                let base: Vec<f64> = (0..self.etas.len())
                    .map(|k| 2.0 * self.etas[k] * signs[k] * (-deltas[k]).exp())
                    .collect();
                if self.etas.len() != 2 {
                    return base;
                }
                let (e1, e2) = (self.etas[0], self.etas[1]);
                let k = (e1 + e2) / (e1 - e2).abs() * (e2 - e1).signum();
                vec![
                    base[0] * k * (e2 / e1).sqrt(),
                    base[1] * k * (e1 / e2).sqrt(),
                ]
            }
        }
    }
}

/// `(cosh a, sinh a) * exp(-m)` without overflow for `|a| <= m`.
fn scaled_cosh_sinh(a: f64, m: f64) -> (f64, f64) {
    let p = (a - m).exp();
    let q = (-a - m).exp();
    ((p + q) / 2.0, (p - q) / 2.0)
}

/// Closed two-soliton form; returns `(u, u_x)`.
fn two_soliton(etas: &[f64], deltas: &[f64], signs: &[f64], t: f64, x: f64) -> (f64, f64) {
    let (e1, e2) = (etas[0], etas[1]);
    let (s1, s2) = (signs[0], signs[1]);
    let d1 = deltas[0] - 8.0 * e1.powi(3) * t;
    let d2 = deltas[1] - 8.0 * e2.powi(3) * t;
    let gamma = (e2 / e1).ln();
    let ga = 2.0 * e2 * x + d2 + gamma / 2.0;
    let gb = 2.0 * e1 * x + d1 - gamma / 2.0;
    let fa = 2.0 * (e1 + e2) * x + d1 + d2;
    let fb = 2.0 * (e2 - e1) * x + d2 - d1 + gamma;
    let m = ga.abs().max(gb.abs()).max(fa.abs()).max(fb.abs());
    let (cga, sga) = scaled_cosh_sinh(ga, m);
    let (cgb, sgb) = scaled_cosh_sinh(gb, m);
    let (cfa, sfa) = scaled_cosh_sinh(fa, m);
    let (cfb, sfb) = scaled_cosh_sinh(fb, m);
    let ratio = ((e1 + e2) / (e1 - e2)).powi(2);
    let g = s1 * e1 * cga + s2 * e2 * cgb;
    let dg = s1 * e1 * 2.0 * e2 * sga + s2 * e2 * 2.0 * e1 * sgb;
    let f = cfa + 4.0 * e1 * e2 * s1 * s2 / (e1 - e2).powi(2) * (-m).exp() + ratio * cfb;
    let df = 2.0 * (e1 + e2) * sfa + ratio * 2.0 * (e2 - e1) * sfb;
    let k = 4.0 * (e1 + e2) / (e2 - e1);
    (k * g / f, k * (dg * f - g * df) / (f * f))
}

/// Determinant form of `u` at one point.
fn determinant_profile(etas: &[f64], cs: &[f64], t: f64, x: f64) -> Result<f64> {
    let n = etas.len();
    let i = Complex64::new(0.0, 1.0);
    // ln|m_k| and sign of m_k (b_k is real).
    let logs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let b = -cs[k] * (8.0 * etas[k].powi(3) * t).exp();
            let lb = cs[k].abs().ln() + 8.0 * etas[k].powi(3) * t;
            (2.0 * etas[k] * x - lb, b.signum())
        })
        .collect();
    let lam: Vec<f64> = logs.iter().map(|(l, _)| l.max(0.0) / 2.0).collect();
    let mt = Mat::<Complex64>::from_fn(n, n, |a, b| {
        let coupling = (-(lam[a] + lam[b])).exp() / (i * (etas[a] + etas[b]));
        if a == b {
            coupling + logs[a].1 * (logs[a].0 - 2.0 * lam[a]).exp()
        } else {
            coupling
        }
    });
    let rhs = Mat::<Complex64>::from_fn(n, n, |a, b| {
        if a == b {
            Complex64::new(
                2.0 * etas[a] * logs[a].1 * (logs[a].0 - 2.0 * lam[a]).exp(),
                0.0,
            )
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let sol = mt.partial_piv_lu().solve(&rhs);
    let tr: Complex64 = (0..n).map(|k| sol[(k, k)]).sum();
    if !(tr.re.is_finite() && tr.im.is_finite()) {
        return Err(Error::NonFinite {
            context: "soliton determinant",
            index: 0,
        });
    }
    Ok(-2.0 * tr.im)
}

/// `u(x, t)` and `u_x(x, t)` on the grid.
pub fn soliton_profile(params: &SolitonParams, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    if let (2, SolitonData::Phases { deltas, signs }) = (params.etas.len(), &params.data) {
        let (u, ux) = grid
            .points()
            .into_iter()
            .map(|x| two_soliton(&params.etas, deltas, signs, params.t, x))
            .unzip();
        return Ok((u, ux));
    }
    let cs = params.norming_constants();
    let u = grid
        .points()
        .into_iter()
        .map(|x| determinant_profile(&params.etas, &cs, params.t, x))
        .collect::<Result<Vec<f64>>>()?;
    let ux = spectral_derivative_real(&u, grid, 1)?;
    Ok((u, ux))
}

/// `V = u^2 + i u_x`; discrete spectrum `{eta_n^2}` for every `t`.
pub fn build_soliton(params: &SolitonParams, grid: &Grid1D) -> Result<SampledPotential> {
    let (u, ux) = soliton_profile(params, grid)?;
    let values = u
        .iter()
        .zip(&ux)
        .map(|(u, d)| Complex64::new(u * u, *d))
        .collect();
    SampledPotential::new(
        Domain::Line(*grid),
        values,
        PotentialSpec::SolitonMkdv {
            params: params.clone(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_soliton_matches_sech() {
        let grid = Grid1D::new(256, 20.0).unwrap();
        for &(eta, delta, sign, t) in &[(0.5, 0.0, 1.0, 0.0), (1.3, 0.4, -1.0, 0.2)] {
            let p = SolitonParams::with_phases(vec![eta], vec![delta], vec![sign], t);
            let (u, _) = soliton_profile(&p, &grid).unwrap();
            let oracle = grid.sample(|x| {
                2.0 * eta * sign / (2.0 * eta * x + delta - 8.0 * eta.powi(3) * t).cosh()
            });
            assert!(max_diff(&u, &oracle) < 1e-12, "eta {eta}");
        }
    }

    #[test]
    fn closed_form_agrees_with_determinant() {
        let grid = Grid1D::new(2048, 20.0).unwrap();
        for &(etas, deltas, signs, t) in &[
            ([1.0, 2.0], [0.0, 0.0], [1.0, 1.0], 0.0),
            ([1.0, 2.0], [0.0, 0.0], [1.0, 1.0], 0.1),
            ([2.0, 1.0], [0.3, -0.2], [1.0, -1.0], 0.05),
            ([0.7, 1.9], [-0.5, 0.8], [-1.0, 1.0], -0.02),
        ] {
            let p = SolitonParams::with_phases(etas.to_vec(), deltas.to_vec(), signs.to_vec(), t);
            let (u, ux) = soliton_profile(&p, &grid).unwrap();
            let det = SolitonParams {
                etas: etas.to_vec(),
                data: SolitonData::Norming(p.norming_constants()),
                t,
            };
            let (ud, uxd) = soliton_profile(&det, &grid).unwrap();
            let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max_diff(&u, &ud) < 1e-12 * scale, "{etas:?} {t}");
            // The spectral derivative sees the tiny jump of u at the seam.
            let inner: Vec<usize> = (0..grid.n()).filter(|&j| grid.is_inner(j)).collect();
            let dx = inner
                .iter()
                .map(|&j| (ux[j] - uxd[j]).abs())
                .fold(0.0, f64::max);
            assert!(dx < 1e-8 * scale, "{etas:?} {t}: {dx}");
        }
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        for (etas, deltas, signs) in [
            ([1.0, 2.0], [0.0, 0.0], [1.0, 1.0]),
            ([2.0, 1.0], [0.3, -0.2], [1.0, -1.0]),
        ] {
            for &x in &[-1.3, -0.2, 0.0, 0.4, 2.1] {
                let h = 1e-5;
                let f = |y: f64| two_soliton(&etas, &deltas, &signs, 0.1, y).0;
                let fd = (f(x + h) - f(x - h)) / (2.0 * h);
                let exact = two_soliton(&etas, &deltas, &signs, 0.1, x).1;
                assert!(
                    (fd - exact).abs() < 1e-6,
                    "{etas:?} at {x}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn far_field_is_finite_and_decayed() {
        let p = SolitonParams::with_phases(vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 1.0], 50.0);
        let grid = Grid1D::new(64, 600.0).unwrap();
        let (u, ux) = soliton_profile(&p, &grid).unwrap();
        assert!(u.iter().chain(&ux).all(|v| v.is_finite()));
        let det = SolitonParams {
            etas: vec![1.0, 2.0, 3.0],
            data: SolitonData::Norming(vec![2.0, -4.0, 6.0]),
            t: 5.0,
        };
        let (u3, _) = soliton_profile(&det, &grid).unwrap();
        assert!(u3.iter().all(|v| v.is_finite()));
        assert!(u3[0].abs() < 1e-100);
    }

    #[test]
    fn rejects_coincident_etas() {
        let grid = Grid1D::new(16, 5.0).unwrap();
        let p = SolitonParams::with_phases(vec![1.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0], 0.0);
        assert!(matches!(
            soliton_profile(&p, &grid),
            Err(Error::CoincidentEtas { i: 0, j: 1 })
        ));
    }

    #[test]
    fn potential_identities() {
        let grid = Grid1D::new(256, 15.0).unwrap();
        let p = SolitonParams::with_phases(vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 1.0], 0.1);
        let v = build_soliton(&p, &grid).unwrap();
        let (u, ux) = soliton_profile(&p, &grid).unwrap();
        for j in 0..grid.n() {
            assert_eq!(v.values[j], Complex64::new(u[j] * u[j], ux[j]));
        }
        assert!(v.symmetry.none());
    }
}
