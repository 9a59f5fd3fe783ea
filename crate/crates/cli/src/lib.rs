//! Command-line front end: configuration, overrides, and file output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "realspec",
    version,
    about = "Spectra and phase transitions of complex Schrodinger potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a potential and write potential.csv.
    Construct(Overrides),
    /// Full spectrum with classification, or Bloch bands for the periodic family.
    Spectrum(Overrides),
    /// Zakharov-Shabat eigenvalues of a type1 generator.
    Zs(Overrides),
    /// Locate and classify the reality threshold over [scan] lo..hi.
    Scan(Overrides),
    /// Run one invariant suite.
    Verify(Overrides),
    /// Split-step propagation of a generic initial field.
    Propagate(Overrides),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Spectrum(_) => "spectrum",
            Command::Zs(_) => "zs",
            Command::Scan(_) => "scan",
            Command::Verify(_) => "verify",
            Command::Propagate(_) => "propagate",
        }
    }

    pub fn overrides(&self) -> &Overrides {
        match self {
            Command::Construct(o)
            | Command::Spectrum(o)
            | Command::Zs(o)
            | Command::Scan(o)
            | Command::Verify(o)
            | Command::Propagate(o) => o,
        }
    }
}

/// Flags named after the configuration keys they replace.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// family.type
    #[arg(long)]
    pub family: Option<String>,
    /// family.generator.kind
    #[arg(long = "g")]
    pub generator: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub d1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub d2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    /// Complex constant as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    pub etas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub deltas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<f64>,
    #[arg(long)]
    pub subtract_offset: Option<bool>,
    /// grid.n
    #[arg(long)]
    pub n: Option<usize>,
    /// grid.half_width
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub im_tol: Option<f64>,
    #[arg(long)]
    pub mass_fraction: Option<f64>,
    #[arg(long)]
    pub boundary_amplitude: Option<f64>,
    #[arg(long)]
    pub max_order: Option<usize>,
    #[arg(long)]
    pub bracket_width: Option<f64>,
    #[arg(long)]
    pub rescan_points: Option<usize>,
    /// scan.lo
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// scan.hi
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub z_end: Option<f64>,
    #[arg(long)]
    pub dz: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// verify.suite
    #[arg(long, value_enum)]
    pub suite: Option<config::Suite>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("not a number in list: {p:?}")))
        })
        .collect()
}

fn parse_complex(s: &str) -> Result<Value, CliError> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [re] => Ok(Value::Array(vec![Value::Float(*re), Value::Float(0.0)])),
        [re, im] => Ok(Value::Array(vec![Value::Float(*re), Value::Float(*im)])),
        _ => Err(CliError::Config(format!(
            "complex value must be `re` or `re,im`, got {s:?}"
        ))),
    }
}

fn float_list(s: &str) -> Result<Value, CliError> {
    Ok(Value::Array(
        parse_list(s)?.into_iter().map(Value::Float).collect(),
    ))
}

fn section<'a>(t: &'a mut Table, key: &str) -> Result<&'a mut Table, CliError> {
    t.entry(key.to_string())
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(|| CliError::Config(format!("`{key}` must be a table")))
}

impl Overrides {
    /// Configuration file (if any) with every given flag written over it.
    pub fn apply(&self, mut t: Table, command: &str) -> Result<Table, CliError> {
        {
            let fam = section(&mut t, "family")?;
            if let Some(f) = &self.family {
                fam.insert("type".into(), Value::String(f.clone()));
            }
            let gen_keys: [(&str, Option<f64>); 6] = [
                ("c0", self.c0),
                ("d1", self.d1),
                ("d2", self.d2),
                ("amplitude", self.amplitude),
                ("width", self.width),
                ("offset", self.offset),
            ];
            if self.generator.is_some() || gen_keys.iter().any(|(_, v)| v.is_some()) {
                let g = section(fam, "generator")?;
                if let Some(k) = &self.generator {
                    g.insert("kind".into(), Value::String(k.clone()));
                }
                for (k, v) in gen_keys {
                    if let Some(v) = v {
                        g.insert(k.into(), Value::Float(v));
                    }
                }
                if !g.contains_key("kind") {
                    let kind = if g.contains_key("c0") {
                        "tanh-pair"
                    } else if g.contains_key("d1") || g.contains_key("d2") {
                        "sech-mix"
                    } else {
                        "single-sech"
                    };
                    g.insert("kind".into(), Value::String(kind.into()));
                }
            }
            let scalars: [(&str, Option<f64>); 8] = [
                ("c2", self.c2),
                ("v0", self.v0),
                ("mu1", self.mu1),
                ("t", self.t),
                ("x0", self.x0),
                ("y0", self.y0),
                ("beta", self.beta),
                ("value", self.value),
            ];
            for (k, v) in scalars {
                if let Some(v) = v {
                    fam.insert(k.into(), Value::Float(v));
                }
            }
            if let Some(b) = self.subtract_offset {
                fam.insert("subtract_offset".into(), Value::Boolean(b));
            }
            for (k, v) in [("c", &self.c), ("a1", &self.a1), ("a2", &self.a2)] {
                if let Some(s) = v {
                    fam.insert(k.into(), parse_complex(s)?);
                }
            }
            for (k, v) in [
                ("etas", &self.etas),
                ("deltas", &self.deltas),
                ("signs", &self.signs),
            ] {
                if let Some(s) = v {
                    fam.insert(k.into(), float_list(s)?);
                }
            }
        }
        if self.n.is_some() || self.half_width.is_some() {
            let g = section(&mut t, "grid")?;
            if let Some(n) = self.n {
                g.insert("n".into(), Value::Integer(n as i64));
            }
            if let Some(l) = self.half_width {
                g.insert("half_width".into(), Value::Float(l));
            }
        }
        let solver: [(&str, Option<Value>); 6] = [
            ("im_tol", self.im_tol.map(Value::Float)),
            ("mass_fraction", self.mass_fraction.map(Value::Float)),
            (
                "boundary_amplitude",
                self.boundary_amplitude.map(Value::Float),
            ),
            (
                "max_order",
                self.max_order.map(|v| Value::Integer(v as i64)),
            ),
            ("bracket_width", self.bracket_width.map(Value::Float)),
            (
                "rescan_points",
                self.rescan_points.map(|v| Value::Integer(v as i64)),
            ),
        ];
        if solver.iter().any(|(_, v)| v.is_some()) {
            let s = section(&mut t, "solver")?;
            for (k, v) in solver {
                if let Some(v) = v {
                    s.insert(k.into(), v);
                }
            }
        }
        if self.lo.is_some() || self.hi.is_some() {
            let s = section(&mut t, "scan")?;
            if let Some(v) = self.lo {
                s.insert("lo".into(), Value::Float(v));
            }
            if let Some(v) = self.hi {
                s.insert("hi".into(), Value::Float(v));
            }
        }
        let prop: [(&str, Option<Value>); 4] = [
            ("z_end", self.z_end.map(Value::Float)),
            ("dz", self.dz.map(Value::Float)),
            ("samples", self.samples.map(|v| Value::Integer(v as i64))),
            ("seed", self.seed.map(|v| Value::Integer(v as i64))),
        ];
        if command == "propagate" || prop.iter().any(|(_, v)| v.is_some()) {
            let p = section(&mut t, "propagate")?;
            for (k, v) in prop {
                if let Some(v) = v {
                    p.insert(k.into(), v);
                }
            }
        }
        if let Some(s) = self.suite {
            let v = section(&mut t, "verify")?;
            let name = serde_json::to_value(s)?;
            v.insert(
                "suite".into(),
                Value::String(name.as_str().unwrap_or_default().to_string()),
            );
        }
        if let Some(o) = &self.out {
            t.insert("output".into(), Value::String(o.display().to_string()));
        }
        Ok(t)
    }

    pub fn resolve(&self, command: &str) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => Table::new(),
        };
        RunConfig::from_table(self.apply(base, command)?)
    }
}

/// Runs one command; the returned code follows the exit-code contract.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let name = cli.command.name();
    let cfg = cli.command.overrides().resolve(name)?;
    log::info!("{name}: writing to {}", cfg.output.display());
    match &cli.command {
        Command::Construct(_) => commands::construct(&cfg).map(|_| error::EXIT_OK),
        Command::Spectrum(_) => commands::spectrum(&cfg).map(|_| error::EXIT_OK),
        Command::Zs(_) => commands::zs(&cfg).map(|_| error::EXIT_OK),
        Command::Scan(_) => commands::scan(&cfg).map(|_| error::EXIT_OK),
        Command::Propagate(_) => commands::propagate(&cfg).map(|_| error::EXIT_OK),
        Command::Verify(_) => {
            let (_, pass) = commands::verify(&cfg)?;
            Ok(if pass {
                error::EXIT_OK
            } else {
                error::EXIT_SOLVER
            })
        }
    }
}
