//! Phase-transition scans over one-parameter potential families.
//!
//! The reality predicate looks only at classified-discrete eigenvalues. A
//! threshold is bracketed by bisection after a uniform re-scan confirms a
//! single predicate flip; the transition is then classified by how the
//! complex pair is born.

pub mod evans;
pub mod family;
pub mod predicate;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use evans::{evans, evans_zero};
pub use family::ParamFamily;
pub use predicate::{complex_discrete_present, PredicateOutcome};

use crate::error::{Error, Result};
use crate::numerics::eig::DEFAULT_MAX_ORDER;
use crate::numerics::Grid1D;
use crate::potential::{Domain, SampledPotential};
use crate::spectrum::{
    full_spectrum_with, EigenClass, LocalizationCriteria, SpectrumOptions, DEFAULT_IM_TOL,
};

/// Environment variable capping the sweep thread count.
pub const THREADS_ENV: &str = "REALSPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanOptions {
    pub im_tol: f64,
    pub bracket_width: f64,
    pub rescan_points: usize,
    pub criteria: LocalizationCriteria,
    pub max_order: usize,
    /// Off-axis eigenvalues refined individually before falling back to a
    /// full eigenvector solve.
    pub max_candidates: usize,
    pub coalescence_overlap: f64,
    pub distinct_overlap: f64,
    /// Required depth of an EP-free origin below the continuum edge.
    pub continuum_margin: f64,
    pub evans_points: usize,
    pub evans_half_width: f64,
    pub evans_steps: usize,
    pub evans_tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            im_tol: DEFAULT_IM_TOL,
            bracket_width: 1e-3,
            rescan_points: 16,
            criteria: LocalizationCriteria::default(),
            max_order: DEFAULT_MAX_ORDER,
            max_candidates: 16,
            coalescence_overlap: 0.99,
            distinct_overlap: 0.9,
            continuum_margin: 0.05,
            evans_points: 3000,
            evans_half_width: 25.0,
            evans_steps: 40,
            evans_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionClass {
    EpMediated,
    EpFree,
    NoneFound,
}

/// Side of the threshold on which complex pairs exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Below,
    Above,
}

/// Raw evidence behind a classification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationScores {
    /// Overlap of the closest real discrete pair at the bracket edge.
    pub coalescence_overlap: Option<f64>,
    pub gap_at_edge: Option<f64>,
    pub gap_further: Option<f64>,
    /// Overlap of the two eigenfunctions nearest the EP-free origin.
    pub candidate_overlap: Option<f64>,
    pub candidates_delocalized: Option<bool>,
    /// Parameter where the Evans zero crosses `Re s = 0`.
    pub evans_crossing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub parameter: String,
    pub interval: (f64, f64),
    /// Localization-predicate samples of the uniform re-scan.
    pub rescan: Vec<(f64, bool)>,
    pub bracket: Option<(f64, f64)>,
    pub complex_side: Option<Side>,
    pub threshold: Option<f64>,
    pub threshold_uncertainty: Option<f64>,
    pub transition_class: TransitionClass,
    /// EP location measured from the continuum edge.
    pub ep_location: Option<Complex64>,
    pub ep_location_raw: Option<Complex64>,
    pub continuum_edge: Option<f64>,
    pub bifurcation_origin: Option<f64>,
    pub eigenfunction_overlap_at_threshold: Option<f64>,
    pub scores: ClassificationScores,
}

impl TransitionReport {
    /// Parameter on the all-real side of the bracket.
    pub fn real_edge(&self) -> Option<f64> {
        let (lo, hi) = self.bracket?;
        Some(if self.complex_side? == Side::Above {
            lo
        } else {
            hi
        })
    }

    pub fn complex_edge(&self) -> Option<f64> {
        let (lo, hi) = self.bracket?;
        Some(if self.complex_side? == Side::Above {
            hi
        } else {
            lo
        })
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        b = b.num_threads(n.max(1));
    }
    b.build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn predicate(family: &ParamFamily, p: f64, opts: &ScanOptions) -> Result<bool> {
    let v = family.build(p)?;
    let out = complex_discrete_present(
        &v,
        opts.im_tol,
        &opts.criteria,
        opts.max_order,
        opts.max_candidates,
    )?;
    log::debug!(
        "{} = {p}: complex = {} ({} candidates)",
        family.name,
        out.complex,
        out.candidates
    );
    Ok(out.complex)
}

/// Locates the reality threshold of `family` on `[a, b]`.
///
/// A constant predicate yields a `NoneFound` report; more than one flip on
/// the re-scan is an error.
pub fn find_threshold(
    family: &ParamFamily,
    interval: (f64, f64),
    opts: &ScanOptions,
) -> Result<TransitionReport> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
    }
    if !(opts.bracket_width > 0.0) || opts.rescan_points < 2 {
        return Err(Error::InvalidParameter(
            "bracket width and re-scan size must be positive".into(),
        ));
    }
    let m = opts.rescan_points;
    let params: Vec<f64> = (0..m)
        .map(|i| a + (b - a) * i as f64 / (m - 1) as f64)
        .collect();
    let flags: Vec<bool> = thread_pool()?.install(|| {
        params
            .par_iter()
            .map(|&p| predicate(family, p, opts))
            .collect::<Result<Vec<bool>>>()
    })?;
    let rescan: Vec<(f64, bool)> = params.iter().copied().zip(flags.iter().copied()).collect();
    let flips: Vec<usize> = (1..m).filter(|&i| flags[i] != flags[i - 1]).collect();
    let mut report = TransitionReport {
        parameter: family.name.clone(),
        interval,
        rescan,
        bracket: None,
        complex_side: None,
        threshold: None,
        threshold_uncertainty: None,
        transition_class: TransitionClass::NoneFound,
        ep_location: None,
        ep_location_raw: None,
        continuum_edge: None,
        bifurcation_origin: None,
        eigenfunction_overlap_at_threshold: None,
        scores: ClassificationScores::default(),
    };
    match flips.len() {
        0 => return Ok(report),
        1 => {}
        n => return Err(Error::NonMonotone { flips: n }),
    }
    let i = flips[0];
    let (mut lo, mut hi) = (params[i - 1], params[i]);
    let lo_flag = flags[i - 1];
    while hi - lo > opts.bracket_width {
        let mid = 0.5 * (lo + hi);
        if predicate(family, mid, opts)? == lo_flag {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.bracket = Some((lo, hi));
    report.complex_side = Some(if lo_flag { Side::Below } else { Side::Above });
    report.threshold = Some(0.5 * (lo + hi));
    report.threshold_uncertainty = Some(0.5 * (hi - lo));
    Ok(report)
}

/// `|<a, b>| / (|a| |b|)` with the Hermitian inner product.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot.norm() / (na * nb)).clamp(0.0, 1.0)
}

struct RealPair {
    mu: (Complex64, Complex64),
    overlap: f64,
}

fn closest_real_pair(v: &SampledPotential, opts: &ScanOptions) -> Result<Option<RealPair>> {
    let s = full_spectrum_with(
        v,
        &SpectrumOptions {
            criteria: opts.criteria,
            max_order: opts.max_order,
            keep_vectors: true,
        },
    )?;
    let vecs = s.eigenvectors.as_ref().expect("requested");
    let real: Vec<usize> = s
        .discrete_indices()
        .into_iter()
        .filter(|&i| s.eigenvalues[i].im.abs() <= opts.im_tol)
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for w in real.windows(2) {
        let gap = (s.eigenvalues[w[1]] - s.eigenvalues[w[0]]).norm();
        if best.is_none_or(|b| gap < b.0) {
            best = Some((gap, w[0], w[1]));
        }
    }
    Ok(best.map(|(_, i, j)| RealPair {
        mu: (s.eigenvalues[i], s.eigenvalues[j]),
        overlap: overlap(&vecs[i], &vecs[j]),
    }))
}

/// Follows the Evans zero from `p_start` towards `p_end` and returns the
/// parameter where it crosses `Re s = 0`, with `s` there.
pub fn evans_crossing(
    family: &ParamFamily,
    p_start: f64,
    p_end: f64,
    s_start: Complex64,
    opts: &ScanOptions,
) -> Result<Option<(f64, Complex64)>> {
    let grid = Grid1D::new(opts.evans_points, opts.evans_half_width)?;
    let domain = Domain::Line(grid);
    let zero_at = |p: f64, s0: Complex64| -> Result<Complex64> {
        let v = family.build_on(p, &domain)?;
        evans_zero(&v.values, v.continuum_edge(), &grid, s0)
    };
    let mut p = p_start;
    let mut s = zero_at(p, s_start)?;
    if s.re <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Evans continuation must start from a bound state, got s = {s}"
        )));
    }
    let dp = (p_end - p_start) / opts.evans_steps.max(1) as f64;
    let mut prev: Option<(f64, Complex64)> = None;
    for _ in 0..opts.evans_steps.max(1) {
        let p_next = p + dp;
        let guess = match prev {
            Some((pp, sp)) => s + (s - sp) * ((p_next - p) / (p - pp)),
            None => s,
        };
        let s_next = zero_at(p_next, guess)?;
        if s_next.re <= 0.0 {
            // Secant on Re s(p) between the last two parameters.
            let (mut pa, mut sa, mut pb, mut sb) = (p, s, p_next, s_next);
            for _ in 0..60 {
                let pc = pb - sb.re * (pb - pa) / (sb.re - sa.re);
                let sc = zero_at(pc, sb + (sb - sa) * ((pc - pb) / (pb - pa)))?;
                pa = pb;
                sa = sb;
                pb = pc;
                sb = sc;
                if (pb - pa).abs() < opts.evans_tolerance {
                    return Ok(Some((pb, sb)));
                }
            }
            return Err(Error::NoConvergence("Evans crossing".into()));
        }
        prev = Some((p, s));
        p = p_next;
        s = s_next;
    }
    Ok(None)
}

/// Decides between the EP-mediated and EP-free scenarios for a report with
/// a bracketed threshold. EP-free thresholds are refined to the Evans
/// crossing.
pub fn classify_transition(
    family: &ParamFamily,
    mut report: TransitionReport,
    opts: &ScanOptions,
) -> Result<TransitionReport> {
    let (Some(real_p), Some(complex_p)) = (report.real_edge(), report.complex_edge()) else {
        return Err(Error::InvalidParameter(
            "classification needs a bracketed threshold".into(),
        ));
    };
    let away = real_p - complex_p;
    let v_edge = family.build(real_p)?;
    let edge = v_edge.continuum_edge();
    report.continuum_edge = Some(edge);

    if let Some(pair) = closest_real_pair(&v_edge, opts)? {
        let gap = (pair.mu.1 - pair.mu.0).norm();
        let further = closest_real_pair(&family.build(real_p + 8.0 * away)?, opts)?;
        let gap_further = further.map(|f| (f.mu.1 - f.mu.0).norm());
        report.scores.coalescence_overlap = Some(pair.overlap);
        report.scores.gap_at_edge = Some(gap);
        report.scores.gap_further = gap_further;
        if pair.overlap >= opts.coalescence_overlap && gap_further.is_some_and(|g| gap < g) {
            let raw = 0.5 * (pair.mu.0 + pair.mu.1);
            report.transition_class = TransitionClass::EpMediated;
            report.ep_location_raw = Some(raw);
            report.ep_location = Some(raw - edge);
            report.eigenfunction_overlap_at_threshold = Some(pair.overlap);
            return Ok(report);
        }
    }

    if family.domain.as_line().is_some() {
        if let Some(class) = ep_free(family, &mut report, opts, edge)? {
            report.transition_class = class;
            return Ok(report);
        }
    }
    report.transition_class = TransitionClass::NoneFound;
    Ok(report)
}

fn ep_free(
    family: &ParamFamily,
    report: &mut TransitionReport,
    opts: &ScanOptions,
    edge: f64,
) -> Result<Option<TransitionClass>> {
    let (a, b) = report.interval;
    let (start, end) = match report.complex_side {
        Some(Side::Above) => (b, a),
        _ => (a, b),
    };
    let v = family.build(start)?;
    let s = full_spectrum_with(
        &v,
        &SpectrumOptions {
            criteria: opts.criteria,
            max_order: opts.max_order,
            keep_vectors: false,
        },
    )?;
    let Some(mu) = s
        .discrete()
        .into_iter()
        .filter(|z| z.im.abs() > opts.im_tol)
        .max_by(|x, y| x.im.abs().total_cmp(&y.im.abs()))
    else {
        return Ok(None);
    };
    let s0 = (mu - v.continuum_edge()).sqrt();
    let Some((p_star, s_star)) = evans_crossing(family, start, end, s0, opts)? else {
        return Ok(None);
    };
    let mu0 = s_star * s_star + edge;
    report.scores.evans_crossing = Some(p_star);
    report.bifurcation_origin = Some(mu0.re);

    let step = (end - start).signum() * 10.0 * opts.bracket_width;
    let pre = full_spectrum_with(
        &family.build(p_star + step)?,
        &SpectrumOptions {
            criteria: opts.criteria,
            max_order: opts.max_order,
            keep_vectors: true,
        },
    )?;
    let vecs = pre.eigenvectors.as_ref().expect("requested");
    let mut near: Vec<usize> = (0..pre.eigenvalues.len()).collect();
    near.sort_by(|&i, &j| {
        (pre.eigenvalues[i] - mu0)
            .norm()
            .total_cmp(&(pre.eigenvalues[j] - mu0).norm())
    });
    let (i, j) = (near[0], near[1]);
    let ov = overlap(&vecs[i], &vecs[j]);
    let delocalized = pre.classification[i] == EigenClass::ContinuumLike
        && pre.classification[j] == EigenClass::ContinuumLike;
    report.scores.candidate_overlap = Some(ov);
    report.scores.candidates_delocalized = Some(delocalized);
    report.eigenfunction_overlap_at_threshold = Some(ov);

    if mu0.re < edge - opts.continuum_margin && ov <= opts.distinct_overlap && delocalized {
        report.threshold = Some(p_star);
        report.threshold_uncertainty = Some(opts.evans_tolerance);
        return Ok(Some(TransitionClass::EpFree));
    }
    Ok(None)
}

/// Summary of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub discrete: Vec<Complex64>,
    pub max_imag: f64,
    pub count: usize,
    pub continuum_edge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub summary: std::result::Result<SweepSummary, String>,
}

/// Spectra over a parameter list, computed concurrently. Failures are
/// recorded per point.
pub fn sweep_spectrum(
    family: &ParamFamily,
    params: &[f64],
    opts: &SpectrumOptions,
) -> Result<Vec<SweepPoint>> {
    let pool = thread_pool()?;
    Ok(pool.install(|| {
        params
            .par_iter()
            .map(|&p| {
                let summary = family
                    .build(p)
                    .and_then(|v| full_spectrum_with(&v, opts))
                    .map(|s| {
                        let discrete = s.discrete();
                        SweepSummary {
                            max_imag: discrete.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
                            count: discrete.len(),
                            discrete,
                            continuum_edge: s.continuum_edge,
                        }
                    })
                    .map_err(|e| e.to_string());
                SweepPoint { param: p, summary }
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scarf_family(grid: Grid1D) -> ParamFamily {
        // V = 2 sech^2 + i p sech tanh has an all-real spectrum iff p <= 9/4.
        ParamFamily::new("p", Domain::Line(grid), |p, d| {
            let g = d.as_line().unwrap();
            let v = g.sample(|x| Complex64::new(2.0, p * x.sinh()) / x.cosh().powi(2));
            SampledPotential::line(*g, v, "scarf")
        })
    }

    #[test]
    fn overlap_is_normalized() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let b: Vec<Complex64> = a.iter().map(|z| z * Complex64::new(0.0, 3.0)).collect();
        assert!((overlap(&a, &b) - 1.0).abs() < 1e-14);
        let c = vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)];
        assert!(overlap(&a, &c) < 1e-14);
    }

    #[test]
    fn constant_predicate_reports_none_found() {
        let fam = ParamFamily::constant(Grid1D::new(64, 10.0).unwrap());
        let r = find_threshold(&fam, (0.0, 1.0), &ScanOptions::default()).unwrap();
        assert_eq!(r.transition_class, TransitionClass::NoneFound);
        assert!(r.threshold.is_none());
        assert_eq!(r.rescan.len(), 16);
    }

    #[test]
    fn threshold_bracket_contains_the_flip() {
        let fam = scarf_family(Grid1D::new(512, 40.0).unwrap());
        let opts = ScanOptions {
            rescan_points: 4,
            ..Default::default()
        };
        let r = find_threshold(&fam, (1.5, 3.0), &opts).unwrap();
        let (lo, hi) = r.bracket.unwrap();
        assert!(hi - lo <= opts.bracket_width);
        assert!(r.threshold_uncertainty.unwrap() > 0.0);
        assert_eq!(r.complex_side, Some(Side::Above));
        assert!((r.threshold.unwrap() - 2.25).abs() < 2e-3, "{lo} {hi}");
        assert_ne!(
            predicate(&fam, lo, &opts).unwrap(),
            predicate(&fam, hi, &opts).unwrap()
        );
    }

    #[test]
    fn scarf_transition_is_ep_mediated() {
        let fam = scarf_family(Grid1D::new(512, 40.0).unwrap());
        let opts = ScanOptions {
            rescan_points: 4,
            ..Default::default()
        };
        let r = find_threshold(&fam, (1.5, 3.0), &opts).unwrap();
        let r = classify_transition(&fam, r, &opts).unwrap();
        assert_eq!(
            r.transition_class,
            TransitionClass::EpMediated,
            "{:?}",
            r.scores
        );
        assert!(r.eigenfunction_overlap_at_threshold.unwrap() >= 0.99);
    }

    #[test]
    fn multiple_flips_are_refused() {
        // Complex only on a middle window of the parameter.
        let grid = Grid1D::new(128, 15.0).unwrap();
        let fam = ParamFamily::new("p", Domain::Line(grid), |p, d| {
            let g = d.as_line().unwrap();
            let w = if (0.4..0.6).contains(&p) { 1.0 } else { 0.0 };
            SampledPotential::line(
                *g,
                g.sample(|x| Complex64::new(2.0, w) / x.cosh().powi(2)),
                "window",
            )
        });
        let opts = ScanOptions {
            rescan_points: 11,
            ..Default::default()
        };
        let r = find_threshold(&fam, (0.0, 1.0), &opts);
        assert!(matches!(r, Err(Error::NonMonotone { flips: 2 })), "{r:?}");
    }

    #[test]
    fn constant_family_sweep_shifts_spectrum() {
        let grid = Grid1D::new(32, 5.0).unwrap();
        let fam = ParamFamily::constant(grid);
        let pts = sweep_spectrum(&fam, &[0.0, 0.7], &SpectrumOptions::default()).unwrap();
        assert_eq!(pts.len(), 2);
        let e0 = pts[0].summary.as_ref().unwrap().continuum_edge;
        let e1 = pts[1].summary.as_ref().unwrap().continuum_edge;
        assert!((e1 - e0 - 0.7).abs() < 1e-14);
        let fam_bad = ParamFamily::new("bad", Domain::Line(grid), |_, _| {
            Err(Error::InvalidParameter("always fails".into()))
        });
        let pts = sweep_spectrum(&fam_bad, &[1.0], &SpectrumOptions::default()).unwrap();
        assert!(pts[0].summary.is_err());
    }
}
