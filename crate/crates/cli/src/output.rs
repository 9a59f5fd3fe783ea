//! CSV tables, the JSON report, and the loaders that read them back.

use std::path::{Path, PathBuf};

use realspec::potential::{Domain, SampledPotential};
use realspec::spectrum::{EigenClass, SpectrumResult};
use realspec::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Io(format!("not a number: {s:?}")))
}

/// Output directory plus the list of files written so far.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `report.json` listing every file written before it.
    pub fn finish(
        mut self,
        command: &str,
        config: &RunConfig,
        result: serde_json::Value,
    ) -> Result<ReportBundle, CliError> {
        self.written.push(REPORT_FILE.to_string());
        let bundle = ReportBundle {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            files: self.written.clone(),
            result,
        };
        let text = serde_json::to_string_pretty(&bundle)?;
        std::fs::write(self.path(REPORT_FILE), text)?;
        Ok(bundle)
    }
}

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub command: String,
    pub version: String,
    /// Configuration the run used, after flag overrides.
    pub config: RunConfig,
    pub files: Vec<String>,
    pub result: serde_json::Value,
}

impl ReportBundle {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn potential_rows(v: &SampledPotential) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match &v.domain {
        Domain::Line(g) => (
            vec!["x", "re_v", "im_v"],
            g.points()
                .iter()
                .zip(&v.values)
                .map(|(x, u)| vec![fmt_f64(*x), fmt_f64(u.re), fmt_f64(u.im)])
                .collect(),
        ),
        Domain::Plane(g) => (
            vec!["x", "y", "re_v", "im_v"],
            v.values
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    let (x, y) = g.point(i);
                    vec![fmt_f64(x), fmt_f64(y), fmt_f64(u.re), fmt_f64(u.im)]
                })
                .collect(),
        ),
    }
}

pub fn class_label(c: EigenClass) -> &'static str {
    match c {
        EigenClass::Discrete => "discrete",
        EigenClass::ContinuumLike => "continuum",
    }
}

pub const EIGENVALUE_HEADER: [&str; 4] = ["re_mu", "im_mu", "class", "localization"];

/// Rows in the result's order (real part, then imaginary part).
pub fn eigenvalue_rows(s: &SpectrumResult) -> Vec<Vec<String>> {
    (0..s.eigenvalues.len())
        .map(|i| {
            vec![
                fmt_f64(s.eigenvalues[i].re),
                fmt_f64(s.eigenvalues[i].im),
                class_label(s.classification[i]).to_string(),
                fmt_f64(s.localization_scores[i]),
            ]
        })
        .collect()
}

fn read_table(path: &Path, expected: &[&str]) -> Result<Vec<csv::StringRecord>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Io(format!(
            "{}: expected columns {expected:?}, found {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(r.records().collect::<Result<Vec<_>, _>>()?)
}

/// Reads a 1D `potential.csv`.
pub fn load_potential_line(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let rows = read_table(path, &["x", "re_v", "im_v"])?;
    let mut x = Vec::with_capacity(rows.len());
    let mut v = Vec::with_capacity(rows.len());
    for r in rows {
        x.push(parse_f64(&r[0])?);
        v.push(Complex64::new(parse_f64(&r[1])?, parse_f64(&r[2])?));
    }
    Ok((x, v))
}

/// Reads a 2D `potential.csv` as `(x, y, V)` triples.
pub fn load_potential_plane(path: &Path) -> Result<Vec<(f64, f64, Complex64)>, CliError> {
    read_table(path, &["x", "y", "re_v", "im_v"])?
        .iter()
        .map(|r| {
            Ok((
                parse_f64(&r[0])?,
                parse_f64(&r[1])?,
                Complex64::new(parse_f64(&r[2])?, parse_f64(&r[3])?),
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueRow {
    pub mu: Complex64,
    pub discrete: bool,
    pub localization: f64,
}

pub fn load_eigenvalues(path: &Path) -> Result<Vec<EigenvalueRow>, CliError> {
    read_table(path, &EIGENVALUE_HEADER)?
        .iter()
        .map(|r| {
            let discrete = match &r[2] {
                "discrete" => true,
                "continuum" => false,
                other => return Err(CliError::Io(format!("unknown class {other:?}"))),
            };
            Ok(EigenvalueRow {
                mu: Complex64::new(parse_f64(&r[0])?, parse_f64(&r[1])?),
                discrete,
                localization: parse_f64(&r[3])?,
            })
        })
        .collect()
}

/// Reads any all-numeric table with the given header.
pub fn load_numeric(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    read_table(path, header)?
        .iter()
        .map(|r| r.iter().map(parse_f64).collect())
        .collect()
}
