//! Run configuration: a TOML file, overridden key by key from flags.

use std::path::{Path, PathBuf};

use realspec::numerics::{Grid1D, Grid2D};
use realspec::potential::GeneratorFunction;
use realspec::spectrum::LocalizationCriteria;
use realspec::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Potential family and its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Type1 {
        generator: GeneratorFunction,
    },
    Type2 {
        generator: GeneratorFunction,
        c2: f64,
        #[serde(default = "yes")]
        subtract_offset: bool,
    },
    EtaP {
        generator: GeneratorFunction,
    },
    /// Deformation of the harmonic well `-x^2` from its ground state.
    SusyHarmonic {
        c: Complex64,
    },
    /// Deformation of the lattice `V0^2 exp(2ix)` over one period.
    SusyPeriodic {
        c: Complex64,
        #[serde(default = "one")]
        v0: f64,
    },
    /// SUSY partner of the harmonic well.
    Partner {},
    /// Complex partner of the free line at real `mu1`.
    Cannata {
        mu1: f64,
        a1: Complex64,
        a2: Complex64,
    },
    Soliton {
        etas: Vec<f64>,
        #[serde(default)]
        deltas: Vec<f64>,
        #[serde(default)]
        signs: Vec<f64>,
        #[serde(default)]
        t: f64,
    },
    PartialPt2d {
        #[serde(default = "default_offset")]
        x0: f64,
        #[serde(default = "default_offset")]
        y0: f64,
        beta: f64,
    },
    Constant {
        value: f64,
    },
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

fn default_offset() -> f64 {
    1.5
}

impl FamilyConfig {
    pub fn is_plane(&self) -> bool {
        matches!(self, FamilyConfig::PartialPt2d { .. })
    }

    /// Name of the parameter a scan varies.
    pub fn scan_parameter(&self) -> Option<&'static str> {
        match self {
            FamilyConfig::Type1 {
                generator: GeneratorFunction::TanhPair { .. },
            } => Some("c0"),
            FamilyConfig::Type2 { .. } => Some("c2"),
            FamilyConfig::EtaP {
                generator: GeneratorFunction::SechMix { .. },
            } => Some("d2"),
            FamilyConfig::PartialPt2d { .. } => Some("beta"),
            FamilyConfig::Constant { .. } => Some("value"),
            _ => None,
        }
    }

    /// Copy with the scan parameter set to `p`.
    pub fn with_parameter(&self, p: f64) -> Option<FamilyConfig> {
        let mut out = self.clone();
        match &mut out {
            FamilyConfig::Type1 {
                generator: GeneratorFunction::TanhPair { c0 },
            } => *c0 = p,
            FamilyConfig::Type2 { c2, .. } => *c2 = p,
            FamilyConfig::EtaP {
                generator: GeneratorFunction::SechMix { d2, .. },
            } => *d2 = p,
            FamilyConfig::PartialPt2d { beta, .. } => *beta = p,
            FamilyConfig::Constant { value } => *value = p,
            _ => return None,
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points per axis; defaults to 512 on the line and 48 on the plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Half width `L`; defaults to 20 on the line and 8 on the plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

pub const LINE_DEFAULT: (usize, f64) = (512, 20.0);
pub const PLANE_DEFAULT: (usize, f64) = (48, 8.0);

impl GridConfig {
    pub fn line(&self) -> Result<Grid1D, CliError> {
        Grid1D::new(
            self.n.unwrap_or(LINE_DEFAULT.0),
            self.half_width.unwrap_or(LINE_DEFAULT.1),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn plane(&self) -> Result<Grid2D, CliError> {
        Grid2D::square(
            self.n.unwrap_or(PLANE_DEFAULT.0),
            self.half_width.unwrap_or(PLANE_DEFAULT.1),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub im_tol: f64,
    /// Defaults depend on the command and dimension; see
    /// [`RunConfig::criteria`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_amplitude: Option<f64>,
    pub max_order: usize,
    pub bracket_width: f64,
    pub rescan_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let scan = realspec::transition::ScanOptions::default();
        Self {
            im_tol: scan.im_tol,
            mass_fraction: None,
            boundary_amplitude: None,
            max_order: scan.max_order,
            bracket_width: scan.bracket_width,
            rescan_points: scan.rescan_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagateConfig {
    pub z_end: f64,
    pub dz: f64,
    pub samples: usize,
    pub seed: u64,
    pub width: f64,
    pub perturbation: f64,
}

impl Default for PropagateConfig {
    fn default() -> Self {
        Self {
            z_end: 50.0,
            dz: 0.01,
            samples: 500,
            seed: 7,
            width: 1.0,
            perturbation: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Pairing,
    Symmetry,
    Intertwining,
    ZsCross,
    SusyIsospectral,
    SolitonIsospectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: Suite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagate: Option<PropagateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, CliError> {
        let table: toml::Table = s
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<toml::Table, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    /// Checks that do not need any numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.family.is_plane() {
            self.grid.plane()?;
        } else {
            self.grid.line()?;
        }
        let s = &self.solver;
        if !(s.im_tol > 0.0 && s.bracket_width > 0.0) || s.rescan_points < 2 || s.max_order == 0 {
            return Err(CliError::Config(
                "solver tolerances must be positive and rescan_points at least 2".into(),
            ));
        }
        if let Some(f) = s.mass_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(CliError::Config(format!(
                    "mass_fraction must lie in [0, 1], got {f}"
                )));
            }
        }
        if let Some(scan) = &self.scan {
            if !(scan.lo < scan.hi) {
                return Err(CliError::Config(format!(
                    "scan interval [{}, {}] is empty",
                    scan.lo, scan.hi
                )));
            }
        }
        if let Some(p) = &self.propagate {
            if !(p.dz > 0.0 && p.z_end > 0.0 && p.width > 0.0) || p.samples == 0 {
                return Err(CliError::Config(
                    "propagation needs positive dz, z_end, width and samples".into(),
                ));
            }
        }
        if let FamilyConfig::Soliton {
            etas,
            deltas,
            signs,
            ..
        } = &self.family
        {
            let n = etas.len();
            if n == 0
                || (!deltas.is_empty() && deltas.len() != n)
                || (!signs.is_empty() && signs.len() != n)
            {
                return Err(CliError::Config(
                    "soliton deltas and signs must be empty or match the eta count".into(),
                ));
            }
        }
        Ok(())
    }

    /// Localization criteria: explicit values win; otherwise the plane
    /// uses `{0.9, 0.05}`, scans on the line `{0.99, 1e-2}`, and
    /// everything else the library default.
    pub fn criteria(&self, scanning: bool) -> LocalizationCriteria {
        let base = if self.family.is_plane() {
            LocalizationCriteria {
                mass_fraction: 0.9,
                boundary_amplitude: 0.05,
            }
        } else if scanning {
            LocalizationCriteria {
                mass_fraction: 0.99,
                boundary_amplitude: 1e-2,
            }
        } else {
            LocalizationCriteria::default()
        };
        LocalizationCriteria {
            mass_fraction: self.solver.mass_fraction.unwrap_or(base.mass_fraction),
            boundary_amplitude: self
                .solver
                .boundary_amplitude
                .unwrap_or(base.boundary_amplitude),
        }
    }
}
