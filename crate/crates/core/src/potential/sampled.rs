use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generator::GeneratorFunction;
use super::soliton::SolitonParams;
use crate::error::{check_finite, check_len, Result};
use crate::numerics::{Grid1D, Grid2D};

/// Relative residual below which a symmetry counts as present.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialSpec {
    Type1 {
        generator: GeneratorFunction,
    },
    Type2 {
        generator: GeneratorFunction,
        c2: f64,
        subtract_offset: bool,
    },
    EtaP {
        generator: GeneratorFunction,
    },
    SusySuper {
        mu1: Complex64,
        c: Complex64,
    },
    Cannata {
        mu1: f64,
        a1: Complex64,
        a2: Complex64,
    },
    Partner {
        mu1: Complex64,
    },
    SolitonMkdv {
        params: SolitonParams,
    },
    PartialPt2d {
        x0: f64,
        y0: f64,
        beta: f64,
    },
    /// Anything sampled directly (constant, harmonic well, user data).
    Tabulated {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Line(Grid1D),
    Plane(Grid2D),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Self::Line(g) => g.n(),
            Self::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_inner(&self, idx: usize) -> bool {
        match self {
            Self::Line(g) => g.is_inner(idx),
            Self::Plane(g) => g.is_inner(idx),
        }
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        match self {
            Self::Line(g) => idx == 0 || idx + 1 == g.n(),
            Self::Plane(g) => g.is_boundary(idx),
        }
    }

    pub fn as_line(&self) -> Option<&Grid1D> {
        match self {
            Self::Line(g) => Some(g),
            Self::Plane(_) => None,
        }
    }

    pub fn as_plane(&self) -> Option<&Grid2D> {
        match self {
            Self::Plane(g) => Some(g),
            Self::Line(_) => None,
        }
    }
}

/// Measured symmetry residuals, each relative to `max|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymmetryFlags {
    pub pt: bool,
    pub partial_pt_x: bool,
    pub partial_pt_y: bool,
    pub pt_residual: f64,
    pub partial_pt_x_residual: Option<f64>,
    pub partial_pt_y_residual: Option<f64>,
}

impl SymmetryFlags {
    pub fn none(&self) -> bool {
        !(self.pt || self.partial_pt_x || self.partial_pt_y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPotential {
    pub domain: Domain,
    pub values: Vec<Complex64>,
    pub spec: PotentialSpec,
    pub symmetry: SymmetryFlags,
}

impl SampledPotential {
    /// Validates the samples and measures their symmetry.
    pub fn new(domain: Domain, values: Vec<Complex64>, spec: PotentialSpec) -> Result<Self> {
        check_len(values.len(), domain.len())?;
        check_finite(&values, "potential")?;
        let symmetry = measure_symmetry(&domain, &values);
        Ok(Self {
            domain,
            values,
            spec,
            symmetry,
        })
    }

    pub fn line(grid: Grid1D, values: Vec<Complex64>, label: &str) -> Result<Self> {
        Self::new(
            Domain::Line(grid),
            values,
            PotentialSpec::Tabulated {
                label: label.into(),
            },
        )
    }

    pub fn constant(grid: Grid1D, value: f64) -> Self {
        let values = vec![Complex64::new(value, 0.0); grid.n()];
        Self::line(grid, values, "constant").expect("finite constant")
    }

    pub fn grid(&self) -> Option<&Grid1D> {
        self.domain.as_line()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Largest `|V|` on the outermost grid points.
    pub fn boundary_magnitude(&self) -> f64 {
        self.boundary_values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Mean of `Re V` over the boundary points. For potentials tending to a
    /// constant this is where the continuous spectrum ends.
    pub fn continuum_edge(&self) -> f64 {
        let (sum, count) = self
            .boundary_values()
            .fold((0.0, 0usize), |(s, c), v| (s + v.re, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    fn boundary_values(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.values.len())
            .filter(|&i| self.domain.is_boundary(i))
            .map(|i| self.values[i])
    }
}

fn relative_residual(pairs: impl Iterator<Item = (Complex64, Complex64)>, scale: f64) -> f64 {
    let r = pairs.map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

fn measure_symmetry(domain: &Domain, v: &[Complex64]) -> SymmetryFlags {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match domain {
        Domain::Line(g) => {
            // x_0 = -L has no mirror image on the grid.
            let pt = relative_residual(
                (1..g.n()).map(|j| (v[j].conj(), v[g.mirror_index(j)])),
                scale,
            );
            SymmetryFlags {
                pt: pt < SYMMETRY_TOLERANCE,
                pt_residual: pt,
                ..Default::default()
            }
        }
        Domain::Plane(g) => {
            let (nx, ny) = (g.x_axis().n(), g.y_axis().n());
            let mx = |i: usize| g.x_axis().mirror_index(i);
            let my = |j: usize| g.y_axis().mirror_index(j);
            let cells = || (1..nx).flat_map(move |i| (1..ny).map(move |j| (i, j)));
            let at = |i: usize, j: usize| v[g.index(i, j)];
            let rx =
                relative_residual(cells().map(|(i, j)| (at(i, j).conj(), at(mx(i), j))), scale);
            let ry =
                relative_residual(cells().map(|(i, j)| (at(i, j).conj(), at(i, my(j)))), scale);
            let rp = relative_residual(
                cells().map(|(i, j)| (at(i, j).conj(), at(mx(i), my(j)))),
                scale,
            );
            SymmetryFlags {
                pt: rp < SYMMETRY_TOLERANCE,
                partial_pt_x: rx < SYMMETRY_TOLERANCE,
                partial_pt_y: ry < SYMMETRY_TOLERANCE,
                pt_residual: rp,
                partial_pt_x_residual: Some(rx),
                partial_pt_y_residual: Some(ry),
            }
        }
    }
}

/// Re-measures the symmetry residuals of `v`.
pub fn check_symmetry(v: &SampledPotential) -> SymmetryFlags {
    measure_symmetry(&v.domain, &v.values)
}
