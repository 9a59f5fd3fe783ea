use std::path::Path;
use std::process::Command;

use realspec::potential::GeneratorFunction;
use realspec::Complex64;
use realspec_cli::commands::{build_potential, construct, spectrum};
use realspec_cli::config::{
    FamilyConfig, GridConfig, PropagateConfig, RunConfig, ScanConfig, Suite, VerifyConfig,
};
use realspec_cli::output::{
    load_eigenvalues, load_numeric, load_potential_line, load_potential_plane, ReportBundle,
};
use realspec_cli::CliError;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_realspec"))
}

fn config(family: FamilyConfig, n: usize, half_width: f64, out: &Path) -> RunConfig {
    RunConfig {
        family,
        grid: GridConfig {
            n: Some(n),
            half_width: Some(half_width),
        },
        solver: Default::default(),
        output: out.to_path_buf(),
        scan: None,
        propagate: None,
        verify: None,
    }
}

fn report(dir: &Path) -> ReportBundle {
    ReportBundle::load(&dir.join("report.json")).unwrap()
}

#[test]
fn config_round_trips_through_toml() {
    let families = vec![
        FamilyConfig::Type1 {
            generator: GeneratorFunction::TanhPair { c0: -0.181 },
        },
        FamilyConfig::Type2 {
            generator: GeneratorFunction::TanhPair { c0: 1.0 },
            c2: 2.535,
            subtract_offset: true,
        },
        FamilyConfig::EtaP {
            generator: GeneratorFunction::SechMix { d1: 1.0, d2: 1.385 },
        },
        FamilyConfig::SusyHarmonic {
            c: Complex64::new(0.5, -2.0),
        },
        FamilyConfig::SusyPeriodic {
            c: Complex64::new(1.0, 1.0),
            v0: 1.0,
        },
        FamilyConfig::Partner {},
        FamilyConfig::Cannata {
            mu1: -1.0,
            a1: Complex64::new(1.0, 0.0),
            a2: Complex64::new(0.0, 0.5),
        },
        FamilyConfig::Soliton {
            etas: vec![1.0, 2.0],
            deltas: vec![0.1, -0.2],
            signs: vec![1.0, -1.0],
            t: 0.1,
        },
        FamilyConfig::PartialPt2d {
            x0: 1.5,
            y0: 1.5,
            beta: 0.214,
        },
        FamilyConfig::Constant { value: 1.0 / 3.0 },
    ];
    for f in families {
        let mut cfg = config(f, 256, 12.5, Path::new("some/dir"));
        cfg.scan = Some(ScanConfig { lo: -0.3, hi: 0.1 });
        cfg.propagate = Some(PropagateConfig::default());
        cfg.verify = Some(VerifyConfig {
            suite: Suite::ZsCross,
        });
        cfg.solver.mass_fraction = Some(0.95);
        let text = cfg.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg, "{text}");
    }
}

#[test]
fn report_echoes_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        FamilyConfig::Type1 {
            generator: GeneratorFunction::TanhPair { c0: 0.0 },
        },
        64,
        10.0,
        dir.path(),
    );
    construct(&cfg).unwrap();
    let r = report(dir.path());
    assert_eq!(r.config, cfg);
    assert_eq!(r.files, vec!["potential.csv", "report.json"]);
    for f in &r.files {
        assert!(dir.path().join(f).exists());
    }
    let echoed = RunConfig::from_toml_str(&r.config.to_toml_string().unwrap()).unwrap();
    assert_eq!(echoed, cfg);
}

#[test]
fn potential_csv_is_read_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        FamilyConfig::EtaP {
            generator: GeneratorFunction::SechMix { d1: 1.0, d2: 2.0 },
        },
        128,
        15.0,
        dir.path(),
    );
    construct(&cfg).unwrap();
    let (x, v) = load_potential_line(&dir.path().join("potential.csv")).unwrap();
    let built = build_potential(&cfg.family, &cfg.grid).unwrap();
    assert_eq!(v, built.values);
    assert_eq!(x, cfg.grid.line().unwrap().points());

    let dir2 = tempfile::tempdir().unwrap();
    let cfg2 = config(
        FamilyConfig::PartialPt2d {
            x0: 1.5,
            y0: 1.5,
            beta: 0.1,
        },
        16,
        8.0,
        dir2.path(),
    );
    construct(&cfg2).unwrap();
    let rows = load_potential_plane(&dir2.path().join("potential.csv")).unwrap();
    let built = build_potential(&cfg2.family, &cfg2.grid).unwrap();
    assert_eq!(rows.len(), 256);
    assert!(rows.iter().zip(&built.values).all(|(r, v)| r.2 == *v));
}

#[test]
fn eigenvalue_csv_is_read_back_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        FamilyConfig::Type1 {
            generator: GeneratorFunction::TanhPair { c0: 0.0 },
        },
        256,
        20.0,
        dir.path(),
    );
    spectrum(&cfg).unwrap();
    let rows = load_eigenvalues(&dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(rows.len(), 256);
    assert!(rows
        .windows(2)
        .all(|w| (w[0].mu.re, w[0].mu.im) <= (w[1].mu.re, w[1].mu.im)));
    assert!(rows.iter().any(|r| r.discrete));
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.localization)));
    assert_eq!(report(dir.path()).result["verdict"], "all-real");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[family]\ntype = \"constant\"\nvalue = 1.0\nunknown = 3\n",
    )
    .unwrap();
    let s = bin()
        .args(["construct", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
    let s = bin()
        .args(["construct", "--family", "type1", "--c0", "0", "--n", "7"])
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
    let s = bin()
        .args(["construct", "--family", "no-such-family"])
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
    // A type-II generator that crosses zero is a pole in the formula.
    let s = bin()
        .args([
            "construct",
            "--family",
            "type2",
            "--c0",
            "-1",
            "--c2",
            "1",
            "--out",
        ])
        .arg(dir.path().join("pole"))
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn io_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let s = bin()
        .args([
            "construct",
            "--family",
            "constant",
            "--value",
            "1",
            "--n",
            "16",
            "--out",
        ])
        .arg(blocker.join("sub"))
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(3));
    let s = bin()
        .args(["construct", "--config"])
        .arg(dir.path().join("missing.toml"))
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(3));
}

#[test]
fn solver_failures_map_to_4() {
    let e: CliError = realspec::Error::NoConvergence("x".into()).into();
    assert_eq!(e.exit_code(), 4);
    let e: CliError = realspec::Error::NonMonotone { flips: 3 }.into();
    assert_eq!(e.exit_code(), 4);
    let e: CliError = realspec::Error::InvalidParameter("x".into()).into();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn construct_flags_write_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1");
    let s = bin()
        .args([
            "construct",
            "--family",
            "type1",
            "--g",
            "tanh-pair",
            "--c0",
            "0",
            "--n",
            "64",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let text = std::fs::read_to_string(out.join("potential.csv")).unwrap();
    assert!(text.starts_with("x,re_v,im_v\n"));
    // 17 significant digits per float.
    let first = text.lines().nth(1).unwrap();
    assert!(first
        .split(',')
        .all(|f| f.split('e').next().unwrap().trim_start_matches('-').len() == 18));

    let out = dir.path().join("sol");
    let s = bin()
        .args([
            "construct",
            "--family",
            "soliton",
            "--etas",
            "1,2",
            "--t",
            "0.1",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    assert_eq!(
        load_potential_line(&out.join("potential.csv"))
            .unwrap()
            .0
            .len(),
        512
    );
}

#[test]
fn spectrum_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let out = dir.path().join(name);
        let s = bin()
            .arg("spectrum")
            .args(args)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(s.code(), Some(0), "{name}");
        report(&out).result["verdict"].as_str().unwrap().to_string()
    };
    assert_eq!(
        run(
            "zero",
            &["--family", "constant", "--value", "0", "--n", "64"]
        ),
        "continuum-only"
    );
    assert_eq!(
        // The pair's tails decay like exp(-0.28|x|), so the boundary test is relaxed.
        run(
            "eta",
            &[
                "--family",
                "eta-p",
                "--d1",
                "1",
                "--d2",
                "2",
                "--n",
                "512",
                "--half-width",
                "30",
                "--boundary-amplitude",
                "1e-2"
            ]
        ),
        "complex-pair"
    );
}

#[test]
fn scan_without_flip_reports_none_found() {
    let dir = tempfile::tempdir().unwrap();
    let s = bin()
        .args([
            "scan", "--family", "constant", "--value", "0", "--n", "32", "--lo", "0", "--hi", "1",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r.result["transition_class"], "none-found");
    let rows = load_numeric(&dir.path().join("rescan.csv"), &["value", "complex"]).unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn verify_intertwining_passes() {
    let dir = tempfile::tempdir().unwrap();
    let s = bin()
        .args([
            "verify",
            "--suite",
            "intertwining",
            "--family",
            "constant",
            "--value",
            "0",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r.result["pass"], true);
    assert!(r.result["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn propagate_flags_growth() {
    let dir = tempfile::tempdir().unwrap();
    let real = dir.path().join("real");
    let s = bin()
        .args([
            "propagate",
            "--family",
            "constant",
            "--value",
            "1",
            "--n",
            "128",
            "--z-end",
            "10",
            "--out",
        ])
        .arg(&real)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let r = report(&real);
    assert!(r.result["fitted_growth_rate"].as_f64().unwrap().abs() < 1e-3);
    assert_eq!(r.result["growing"], false);
    let rows = load_numeric(&real.join("trace.csv"), &["z", "norm"]).unwrap();
    assert_eq!(rows.len(), 501);

    let grow = dir.path().join("grow");
    let s = bin()
        .args([
            "propagate",
            "--family",
            "eta-p",
            "--d1",
            "1",
            "--d2",
            "2",
            "--half-width",
            "30",
            "--z-end",
            "30",
            "--boundary-amplitude",
            "1e-2",
            "--out",
        ])
        .arg(&grow)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let r = report(&grow);
    assert_eq!(r.result["growing"], true);
    assert!(r.result["fitted_growth_rate"].as_f64().unwrap() > 0.0);
}
