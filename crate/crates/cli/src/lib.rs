//! Command-line front end for `legendre-flow`.
//!
//! Every run is described by a [`RunConfig`]. A JSON file given with
//! `--config` is read first and any flags on the command line replace the
//! matching fields.

mod commands;
pub mod config;
pub mod error;
mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use legendre_flow::fd::{Scheme, Stencil};

pub use config::{CommandKind, RunConfig};
pub use error::{CliError, Result};
pub use output::MANIFEST;

#[derive(Debug, Parser)]
#[command(name = "legendre-flow", version, about = "Curvature flow of Legendre curves in the plane")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "LEGENDRE_FLOW_OUT")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args, Default)]
pub struct SourceArgs {
    /// Rotation index of the curve built from `--coeffs`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Fourier data of β₀, e.g. "a0=0.01, 2:1, 4:0.1:-0.5".
    #[arg(long)]
    pub coeffs: Option<String>,
    /// Sampled curve in CSV form (u,x,y,nu_x,nu_y).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a curve and write snapshots at the requested times.
    Simulate(SourceArgs),
    /// Sample a self-similar profile, or the whole reference catalog.
    SelfSimilar {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        /// Samples per profile; defaults to a resolution that scales with n + m.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        catalog: bool,
    },
    /// Reparametrize a sampled curve to constant curvature ℓ ≡ n.
    Reparam {
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Track the zeros of β and the times at which their number drops.
    Cusps(SourceArgs),
    /// Measure the decay of the scaled distance to the self-similar limit.
    Converge(SourceArgs),
    /// Compare finite-difference solvers against the exact solution.
    OracleCheck {
        #[arg(long, value_enum)]
        equation: Option<config::Equation>,
        /// explicit-euler or crank-nicolson
        #[arg(long)]
        scheme: Option<String>,
        /// standard or compact
        #[arg(long)]
        stencil: Option<String>,
        #[arg(long)]
        n_points: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        forcing: Option<f64>,
        #[arg(long)]
        warp: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        coeffs: Option<String>,
    },
}

fn parse_named<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(text.replace('-', "_")))
        .map_err(|_| CliError::Validation(format!("unknown {what} `{text}`")))
}

fn apply_source(config: &mut RunConfig, args: SourceArgs) -> Result<()> {
    match (args.coeffs, args.n) {
        (Some(text), n) => {
            let n = n.or(config.coefficients.as_ref().map(|c| c.n)).unwrap_or(1);
            config.coefficients = Some(config::Coefficients::parse(n, &text)?);
        }
        (None, Some(n)) => match &mut config.coefficients {
            Some(c) => c.n = n,
            None => return Err(CliError::Validation("--n needs --coeffs".into())),
        },
        (None, None) => {}
    }
    if args.curve.is_some() {
        config.curve = args.curve;
    }
    if args.times.is_some() {
        config.times = args.times;
    }
    if args.grid.is_some() {
        config.grid = args.grid;
    }
    Ok(())
}

impl Cli {
    /// Merges the config file (if any) with the flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if self.out.is_some() {
            config.out_dir = self.out;
        }
        let Some(command) = self.command else {
            return Ok(config);
        };
        match command {
            Command::Simulate(a) => {
                config.command = Some(CommandKind::Simulate);
                apply_source(&mut config, a)?;
            }
            Command::Cusps(a) => {
                config.command = Some(CommandKind::Cusps);
                apply_source(&mut config, a)?;
            }
            Command::Converge(a) => {
                config.command = Some(CommandKind::Converge);
                apply_source(&mut config, a)?;
            }
            Command::SelfSimilar { n, m, c1, c2, samples, catalog } => {
                config.command = Some(CommandKind::SelfSimilar);
                config.catalog |= catalog;
                if n.is_some() || m.is_some() || c1.is_some() || c2.is_some() {
                    let mut p = config.profile.unwrap_or(config::ProfileParams { n: 1, m: 0, c1: 0.0, c2: 0.0 });
                    p.n = n.unwrap_or(p.n);
                    p.m = m.unwrap_or(p.m);
                    p.c1 = c1.unwrap_or(p.c1);
                    p.c2 = c2.unwrap_or(p.c2);
                    config.profile = Some(p);
                }
                if samples.is_some() {
                    config.grid = samples;
                }
            }
            Command::Reparam { curve } => {
                config.command = Some(CommandKind::Reparam);
                if curve.is_some() {
                    config.curve = curve;
                }
            }
            Command::OracleCheck { equation, scheme, stencil, n_points, dt, t_end, forcing, warp, n, coeffs } => {
                config.command = Some(CommandKind::OracleCheck);
                let o = &mut config.oracle;
                if let Some(v) = equation {
                    o.equation = v;
                }
                if let Some(v) = scheme {
                    o.scheme = parse_named::<Scheme>("scheme", &v)?;
                }
                if let Some(v) = stencil {
                    o.stencil = parse_named::<Stencil>("stencil", &v)?;
                }
                o.n_points = n_points.unwrap_or(o.n_points);
                o.dt = dt.unwrap_or(o.dt);
                o.t_end = t_end.unwrap_or(o.t_end);
                o.forcing = forcing.unwrap_or(o.forcing);
                o.warp = warp.unwrap_or(o.warp);
                apply_source(&mut config, SourceArgs { n, coeffs, ..SourceArgs::default() })?;
            }
        }
        Ok(config)
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Verification checks that did not hold. Empty on success.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.failures.is_empty() {
            0
        } else {
            3
        }
    }
}

/// Validates the configuration, runs the command and writes the manifest.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let mut out = output::Outputs::new(&config.out_dir())?;
    let failures = match config.command()? {
        CommandKind::Simulate => commands::simulate(config, &mut out)?,
        CommandKind::SelfSimilar => commands::self_similar(config, &mut out)?,
        CommandKind::Reparam => commands::reparam(config, &mut out)?,
        CommandKind::Cusps => commands::cusps(config, &mut out)?,
        CommandKind::Converge => commands::converge(config, &mut out)?,
        CommandKind::OracleCheck => commands::oracle_check(config, &mut out)?,
    };
    let artifacts = out.finish(config)?;
    Ok(Outcome { artifacts, failures })
}
