//! One-parameter potential families.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{Grid1D, Grid2D};
use crate::potential::{
    build_eta_p, build_partial_pt_2d, build_type1, build_type2, Domain, GeneratorFunction,
    SampledPotential,
};

type Builder = dyn Fn(f64, &Domain) -> Result<SampledPotential> + Send + Sync;

/// A potential family `p -> V_p`, buildable on any compatible domain.
#[derive(Clone)]
pub struct ParamFamily {
    pub name: String,
    pub domain: Domain,
    builder: Arc<Builder>,
}

impl std::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamFamily")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

fn line(domain: &Domain) -> Result<&Grid1D> {
    domain
        .as_line()
        .ok_or_else(|| Error::InvalidParameter("family needs a 1D grid".into()))
}

impl ParamFamily {
    pub fn new<F>(name: impl Into<String>, domain: Domain, builder: F) -> Self
    where
        F: Fn(f64, &Domain) -> Result<SampledPotential> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            builder: Arc::new(builder),
        }
    }

    pub fn build(&self, p: f64) -> Result<SampledPotential> {
        (self.builder)(p, &self.domain)
    }

    pub fn build_on(&self, p: f64, domain: &Domain) -> Result<SampledPotential> {
        (self.builder)(p, domain)
    }

    /// Same family on another domain.
    pub fn with_domain(&self, domain: Domain) -> Self {
        Self {
            name: self.name.clone(),
            domain,
            builder: Arc::clone(&self.builder),
        }
    }

    /// Type-I potentials of the tanh-pair generator, parameter `c0`.
    pub fn type1_tanh(grid: Grid1D) -> Self {
        Self::new("c0", Domain::Line(grid), |c0, d| {
            build_type1(&GeneratorFunction::TanhPair { c0 }, line(d)?)
        })
    }

    /// Type-II potentials of the tanh-pair generator with fixed `c0`,
    /// parameter `c2`, asymptotic offset removed.
    pub fn type2_tanh(grid: Grid1D, c0: f64) -> Self {
        Self::new("c2", Domain::Line(grid), move |c2, d| {
            build_type2(&GeneratorFunction::TanhPair { c0 }, c2, line(d)?, true)
        })
    }

    /// Eta-P potentials of the sech mix with fixed `d1`, parameter `d2`.
    pub fn eta_p_sech(grid: Grid1D, d1: f64) -> Self {
        Self::new("d2", Domain::Line(grid), move |d2, d| {
            build_eta_p(&GeneratorFunction::SechMix { d1, d2 }, line(d)?)
        })
    }

    /// Four-Gaussian partially-PT potentials, parameter `beta`.
    pub fn partial_pt_2d(grid: Grid2D, x0: f64, y0: f64) -> Self {
        Self::new("beta", Domain::Plane(grid), move |beta, d| {
            let g = d
                .as_plane()
                .ok_or_else(|| Error::InvalidParameter("family needs a 2D grid".into()))?;
            build_partial_pt_2d(x0, y0, beta, g)
        })
    }

    /// `V = p` everywhere.
    pub fn constant(grid: Grid1D) -> Self {
        Self::new("value", Domain::Line(grid), |p, d| {
            Ok(SampledPotential::constant(*line(d)?, p))
        })
    }
}
