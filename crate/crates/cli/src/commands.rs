//! One function per subcommand. Each writes its tables and `report.json`
//! into the configured output directory.

use realspec::numerics::Grid1D;
use realspec::potential::{
    bessel_seed, build_cannata, build_eta_p, build_partial_pt_2d, build_partner, build_soliton,
    build_susy_super, build_type1, build_type2, exponential_lattice, harmonic_ground_state,
    harmonic_well, lattice_period_grid, verify_intertwining, Domain, GeneratorFunction,
    SampledPotential, SolitonParams,
};
use realspec::propagate::{propagate_generic, PropagationOptions};
use realspec::spectrum::{
    bloch_spectrum, full_spectrum_with, spectrum_2d, RealityVerdict, SpectrumOptions,
    SpectrumResult,
};
use realspec::transition::{classify_transition, find_threshold, ParamFamily, ScanOptions};
use realspec::zs::{hausdorff, klaus_shaw_test, zs_eigenvalues, zs_to_schrodinger_check};
use realspec::Complex64;
use serde_json::json;

use crate::config::{FamilyConfig, GridConfig, RunConfig, Suite};
use crate::error::CliError;
use crate::output::{
    eigenvalue_rows, fmt_f64, potential_rows, OutputDir, ReportBundle, EIGENVALUE_HEADER,
};

/// Eigenvalues requested from the iterative 2D path.
const PLANE_EIGENVALUES: usize = 12;
/// Bloch momenta sampled across the reduced zone `[-1, 1]`.
const BLOCH_POINTS: usize = 32;
/// Bands written per Bloch momentum.
const BANDS: usize = 5;
/// Pass thresholds of the verification suites.
const PAIRING_LIMIT: f64 = 1e-8;
const INTERTWINING_LIMIT: f64 = 1e-8;
const ZS_CROSS_LIMIT: f64 = 1e-3;
const SUSY_LIMIT: f64 = 1e-6;
const SOLITON_LIMIT: f64 = 1e-8;

/// Samples the configured family on its grid.
pub fn build_potential(
    family: &FamilyConfig,
    grid: &GridConfig,
) -> Result<SampledPotential, CliError> {
    if family.is_plane() {
        let g = grid.plane()?;
        return Ok(match family {
            FamilyConfig::PartialPt2d { x0, y0, beta } => build_partial_pt_2d(*x0, *y0, *beta, &g)?,
            _ => unreachable!("only the partial-PT family lives on the plane"),
        });
    }
    let line = grid.line()?;
    Ok(match family {
        FamilyConfig::Type1 { generator } => build_type1(generator, &line)?,
        FamilyConfig::Type2 {
            generator,
            c2,
            subtract_offset,
        } => build_type2(generator, *c2, &line, *subtract_offset)?,
        FamilyConfig::EtaP { generator } => build_eta_p(generator, &line)?,
        FamilyConfig::SusyHarmonic { c } => {
            build_susy_super(&harmonic_well(&line), &harmonic_ground_state(&line), *c)?
        }
        FamilyConfig::SusyPeriodic { c, v0 } => {
            let g = lattice_period_grid(line.n())?;
            build_susy_super(&exponential_lattice(&g, *v0), &bessel_seed(&g, *v0), *c)?
        }
        FamilyConfig::Partner {} => {
            build_partner(&harmonic_well(&line), &harmonic_ground_state(&line))?
        }
        FamilyConfig::Cannata { mu1, a1, a2 } => {
            build_cannata(&SampledPotential::constant(line, 0.0), *mu1, (*a1, *a2))?.potential
        }
        FamilyConfig::Soliton {
            etas,
            deltas,
            signs,
            t,
        } => {
            let n = etas.len();
            let deltas = if deltas.is_empty() {
                vec![0.0; n]
            } else {
                deltas.clone()
            };
            let signs = if signs.is_empty() {
                vec![1.0; n]
            } else {
                signs.clone()
            };
            build_soliton(
                &SolitonParams::with_phases(etas.clone(), deltas, signs, *t),
                &line,
            )?
        }
        FamilyConfig::Constant { value } => SampledPotential::constant(line, *value),
        FamilyConfig::PartialPt2d { .. } => unreachable!("handled above"),
    })
}

fn spectrum_options(cfg: &RunConfig, scanning: bool) -> SpectrumOptions {
    SpectrumOptions {
        criteria: cfg.criteria(scanning),
        max_order: cfg.solver.max_order,
        keep_vectors: false,
    }
}

fn compute_spectrum(v: &SampledPotential, cfg: &RunConfig) -> Result<SpectrumResult, CliError> {
    let opts = spectrum_options(cfg, false);
    Ok(match v.domain {
        Domain::Line(_) => full_spectrum_with(v, &opts)?,
        Domain::Plane(_) => spectrum_2d(v, PLANE_EIGENVALUES, &opts)?,
    })
}

pub fn construct(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    let v = build_potential(&cfg.family, &cfg.grid)?;
    let mut out = OutputDir::create(&cfg.output)?;
    let (header, rows) = potential_rows(&v);
    out.write_csv("potential.csv", &header, &rows)?;
    out.finish(
        "construct",
        cfg,
        json!({
            "spec": v.spec,
            "symmetry": v.symmetry,
            "points": v.values.len(),
            "max_abs": v.max_abs(),
            "continuum_edge": v.continuum_edge(),
        }),
    )
}

pub fn spectrum(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    if let FamilyConfig::SusyPeriodic { .. } = cfg.family {
        return bands(cfg);
    }
    let v = build_potential(&cfg.family, &cfg.grid)?;
    let s = compute_spectrum(&v, cfg)?;
    let mut out = OutputDir::create(&cfg.output)?;
    out.write_csv("eigenvalues.csv", &EIGENVALUE_HEADER, &eigenvalue_rows(&s))?;
    let verdict: RealityVerdict = s.verdict(cfg.solver.im_tol);
    out.finish(
        "spectrum",
        cfg,
        json!({
            "verdict": verdict,
            "discrete": s.discrete(),
            "pairing_residual": s.pairing_residual,
            "continuum_edge": s.continuum_edge,
            "max_continuum_imag": s.max_continuum_imag(),
            "max_growth_rate": s.max_growth_rate(),
            "eigenvalue_count": s.eigenvalues.len(),
            "symmetry": v.symmetry,
        }),
    )
}

/// Bloch bands of the periodic deformation over `k` in `[-1, 1]`.
fn bands(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    let v = build_potential(&cfg.family, &cfg.grid)?;
    let grid = *v.grid().expect("periodic family is 1D");
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..BLOCH_POINTS {
        let k = -1.0 + 2.0 * i as f64 / (BLOCH_POINTS - 1) as f64;
        let mut e = bloch_spectrum(&v.values, &grid, k)?;
        e.reverse();
        for (m, mu) in e.iter().take(BANDS).enumerate() {
            rows.push(vec![
                fmt_f64(k),
                m.to_string(),
                fmt_f64(mu.re),
                fmt_f64(mu.im),
            ]);
        }
        // Free bands -(k + 2m)^2 for m = 0, 1, 2.
        for m in 0..3 {
            let target = Complex64::new(-(k + 2.0 * m as f64).powi(2), 0.0);
            let d = e
                .iter()
                .map(|z| (z - target).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    let mut out = OutputDir::create(&cfg.output)?;
    out.write_csv("bands.csv", &["k", "band", "re_mu", "im_mu"], &rows)?;
    out.finish(
        "spectrum",
        cfg,
        json!({ "bloch_points": BLOCH_POINTS, "max_free_band_deviation": worst }),
    )
}

fn real_generator(cfg: &RunConfig) -> Result<&GeneratorFunction, CliError> {
    match &cfg.family {
        FamilyConfig::Type1 { generator } => Ok(generator),
        _ => Err(CliError::Config(
            "zs needs a type1 family; its real generator is the ZS potential".into(),
        )),
    }
}

fn real_samples(g: &GeneratorFunction, grid: &Grid1D) -> Result<Vec<f64>, CliError> {
    let s = g.sample(grid, 0)?;
    Ok(s[0].iter().map(|z| z.re).collect())
}

pub fn zs(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    let grid = cfg.grid.line()?;
    let g = real_samples(real_generator(cfg)?, &grid)?;
    let r = zs_eigenvalues(&g, &grid)?;
    let mut order: Vec<usize> = (0..r.zeta.len()).collect();
    order.sort_by(|&a, &b| {
        r.zeta[a]
            .re
            .total_cmp(&r.zeta[b].re)
            .then(r.zeta[a].im.total_cmp(&r.zeta[b].im))
    });
    let rows: Vec<Vec<String>> = order
        .iter()
        .map(|&i| {
            vec![
                fmt_f64(r.zeta[i].re),
                fmt_f64(r.zeta[i].im),
                crate::output::class_label(r.classification[i]).to_string(),
                fmt_f64(r.localization[i].score),
            ]
        })
        .collect();
    let cross = zs_to_schrodinger_check(&g, &grid)?;
    let ks = klaus_shaw_test(&g, &grid)?;
    let mut out = OutputDir::create(&cfg.output)?;
    out.write_csv(
        "zs_eigenvalues.csv",
        &["re_zeta", "im_zeta", "class", "localization"],
        &rows,
    )?;
    out.finish(
        "zs",
        cfg,
        json!({
            "discrete_zeta": r.discrete_zeta(),
            "discrete_mu": r.discrete_mu(),
            "symmetry": r.symmetry,
            "schrodinger_discrepancy": cross,
            "single_humped": ks.single_humped,
            "all_imaginary": ks.all_imaginary,
        }),
    )
}

/// Family over the scan parameter, rebuilt from the configuration.
pub fn param_family(cfg: &RunConfig) -> Result<ParamFamily, CliError> {
    let name = cfg
        .family
        .scan_parameter()
        .ok_or_else(|| CliError::Config("this family has no scan parameter".into()))?;
    let family = cfg.family.clone();
    let domain = if family.is_plane() {
        Domain::Plane(cfg.grid.plane()?)
    } else {
        Domain::Line(cfg.grid.line()?)
    };
    Ok(ParamFamily::new(name, domain, move |p, d| {
        let f = family.with_parameter(p).expect("scan parameter exists");
        let grid = match d {
            Domain::Line(g) => GridConfig {
                n: Some(g.n()),
                half_width: Some(g.half_width()),
            },
            Domain::Plane(g) => GridConfig {
                n: Some(g.x_axis().n()),
                half_width: Some(g.x_axis().half_width()),
            },
        };
        build_potential(&f, &grid).map_err(|e| realspec::Error::InvalidParameter(e.to_string()))
    }))
}

pub fn scan_options(cfg: &RunConfig) -> ScanOptions {
    ScanOptions {
        im_tol: cfg.solver.im_tol,
        bracket_width: cfg.solver.bracket_width,
        rescan_points: cfg.solver.rescan_points,
        criteria: cfg.criteria(true),
        max_order: cfg.solver.max_order,
        ..Default::default()
    }
}

pub fn scan(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    let interval = cfg
        .scan
        .ok_or_else(|| CliError::Config("scan needs [scan] lo and hi".into()))?;
    let family = param_family(cfg)?;
    let opts = scan_options(cfg);
    let mut report = find_threshold(&family, (interval.lo, interval.hi), &opts)?;
    if report.threshold.is_some() {
        report = classify_transition(&family, report, &opts)?;
    }
    let rows: Vec<Vec<String>> = report
        .rescan
        .iter()
        .map(|(p, c)| vec![fmt_f64(*p), u8::from(*c).to_string()])
        .collect();
    let mut out = OutputDir::create(&cfg.output)?;
    out.write_csv("rescan.csv", &[family.name.as_str(), "complex"], &rows)?;
    out.finish("scan", cfg, serde_json::to_value(&report)?)
}

pub fn propagate(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    let p = cfg.propagate.unwrap_or_default();
    let v = build_potential(&cfg.family, &cfg.grid)?;
    let opts = PropagationOptions {
        z_end: p.z_end,
        dz: p.dz,
        samples: p.samples,
    };
    let trace = propagate_generic(&v, &opts, p.width, p.perturbation, p.seed)?;
    let predicted = compute_spectrum(&v, cfg)?.max_growth_rate();
    let rows: Vec<Vec<String>> = trace
        .z_samples
        .iter()
        .zip(&trace.norms)
        .map(|(z, n)| vec![fmt_f64(*z), fmt_f64(*n)])
        .collect();
    let mut out = OutputDir::create(&cfg.output)?;
    out.write_csv("trace.csv", &["z", "norm"], &rows)?;
    let relative_gap = if predicted > 0.0 {
        (trace.fitted_growth_rate - predicted).abs() / predicted
    } else {
        trace.fitted_growth_rate.abs()
    };
    out.finish(
        "propagate",
        cfg,
        json!({
            "fitted_growth_rate": trace.fitted_growth_rate,
            "predicted_growth_rate": predicted,
            "relative_gap": relative_gap,
            "growing": predicted > cfg.solver.im_tol,
            "stopped_early": trace.stopped_early,
            "initial_condition": trace.initial_condition,
        }),
    )
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub residual: f64,
    pub limit: f64,
    pub pass: bool,
    pub detail: serde_json::Value,
}

fn outcome(suite: Suite, residual: f64, limit: f64, detail: serde_json::Value) -> SuiteOutcome {
    SuiteOutcome {
        suite,
        residual,
        limit,
        pass: residual < limit,
        detail,
    }
}

pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<SuiteOutcome, CliError> {
    match suite {
        Suite::Pairing => {
            let v = build_potential(&cfg.family, &cfg.grid)?;
            let s = compute_spectrum(&v, cfg)?;
            Ok(outcome(
                suite,
                s.pairing_residual,
                PAIRING_LIMIT,
                json!({ "discrete": s.discrete() }),
            ))
        }
        Suite::Symmetry => {
            let v = build_potential(&cfg.family, &cfg.grid)?;
            let best = [
                Some(v.symmetry.pt_residual),
                v.symmetry.partial_pt_x_residual,
                v.symmetry.partial_pt_y_residual,
            ]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
            Ok(outcome(
                suite,
                best,
                realspec::potential::sampled::SYMMETRY_TOLERANCE,
                json!({ "symmetry": v.symmetry }),
            ))
        }
        Suite::Intertwining => {
            let grid = cfg.grid.line()?;
            let tests = [
                grid.sample(|x| Complex64::new((-x * x).exp(), 0.0)),
                grid.sample(|x| Complex64::new(1.0 / x.cosh(), 0.0)),
                grid.sample(|x| Complex64::new(x * (-x * x / 2.0).exp(), 0.0)),
            ];
            let cases = [
                (GeneratorFunction::TanhPair { c0: 1.0 }, 1.0),
                (
                    GeneratorFunction::SingleSech {
                        amplitude: 2.0,
                        width: 1.0,
                        offset: 1.0,
                    },
                    0.5,
                ),
                (GeneratorFunction::TanhPair { c0: 0.5 }, 2.0),
            ];
            let mut residuals = Vec::new();
            for (g, eps) in &cases {
                residuals.push(verify_intertwining(g, *eps, &grid, &tests)?);
            }
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            Ok(outcome(
                suite,
                worst,
                INTERTWINING_LIMIT,
                json!({ "residuals": residuals }),
            ))
        }
        Suite::ZsCross => {
            let grid = cfg.grid.line()?;
            let g = match &cfg.family {
                FamilyConfig::Type1 { generator } => real_samples(generator, &grid)?,
                _ => grid.sample(|x| 1.0 / x.cosh()),
            };
            let d = zs_to_schrodinger_check(&g, &grid)?;
            Ok(outcome(suite, d, ZS_CROSS_LIMIT, json!({})))
        }
        Suite::SusyIsospectral => {
            let grid = cfg.grid.line()?;
            let base = harmonic_well(&grid);
            let seed = harmonic_ground_state(&grid);
            let opts = spectrum_options(cfg, false);
            let reference = top_discrete(&full_spectrum_with(&base, &opts)?, 5);
            let mut worst: f64 = 0.0;
            for c in [
                Complex64::new(1.0, 1.0),
                Complex64::new(0.5, -2.0),
                Complex64::new(3.0, 0.0),
            ] {
                let s = full_spectrum_with(&build_susy_super(&base, &seed, c)?, &opts)?;
                worst = worst.max(set_distance(&top_discrete(&s, 5), &reference));
            }
            Ok(outcome(
                suite,
                worst,
                SUSY_LIMIT,
                json!({ "reference": reference }),
            ))
        }
        Suite::SolitonIsospectral => {
            let grid = cfg.grid.line()?;
            let opts = spectrum_options(cfg, false);
            let at = |t: f64| -> Result<Vec<Complex64>, CliError> {
                let p =
                    SolitonParams::with_phases(vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 1.0], t);
                Ok(full_spectrum_with(&build_soliton(&p, &grid)?, &opts)?.discrete())
            };
            let (a, b) = (at(0.0)?, at(0.1)?);
            Ok(outcome(
                suite,
                hausdorff(&a, &b),
                SOLITON_LIMIT,
                json!({ "t0": a, "t1": b }),
            ))
        }
    }
}

fn top_discrete(s: &SpectrumResult, k: usize) -> Vec<Complex64> {
    let mut d = s.discrete();
    d.sort_by(|a, b| b.re.total_cmp(&a.re));
    d.truncate(k);
    d
}

fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn verify(cfg: &RunConfig) -> Result<(ReportBundle, bool), CliError> {
    let suite = cfg
        .verify
        .map(|v| v.suite)
        .ok_or_else(|| CliError::Config("verify needs a suite".into()))?;
    let o = run_suite(cfg, suite)?;
    let pass = o.pass;
    let out = OutputDir::create(&cfg.output)?;
    Ok((out.finish("verify", cfg, serde_json::to_value(&o)?)?, pass))
}
