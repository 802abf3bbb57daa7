//! Run configuration: one JSON document, with command-line flags on top.

use std::path::PathBuf;

use legendre_flow::fd::{Scheme, Stencil};
use legendre_flow::{SelfSimilarProfile, SpectralBeta};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    SelfSimilar,
    Reparam,
    Cusps,
    Converge,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: u32,
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// `β₀ = a₀ + Σ a_k cos ku + b_k sin ku` with rotation index `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub n: u32,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub modes: Vec<Mode>,
}

impl Coefficients {
    /// Parses `a0=<v>` and `k:a[:b]` terms separated by commas or spaces.
    pub fn parse(n: u32, text: &str) -> Result<Self> {
        let mut c = Coefficients { n, a0: 0.0, modes: Vec::new() };
        let bad = |t: &str| CliError::Validation(format!("malformed coefficient term `{t}`; expected `a0=<value>` or `k:a[:b]`"));
        for term in text.split([',', ' ', ';']).map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(v) = term.strip_prefix("a0=") {
                c.a0 = v.parse().map_err(|_| bad(term))?;
                continue;
            }
            let parts: Vec<&str> = term.split(':').collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(bad(term));
            }
            let k: u32 = parts[0].parse().map_err(|_| bad(term))?;
            if k == 0 {
                return Err(CliError::Validation("mode 0 is the mean; write it as a0=<value>".into()));
            }
            let a: f64 = parts[1].parse().map_err(|_| bad(term))?;
            let b: f64 = if parts.len() == 3 { parts[2].parse().map_err(|_| bad(term))? } else { 0.0 };
            c.modes.push(Mode { k, a, b });
        }
        Ok(c)
    }

    pub fn spectral(&self) -> Result<SpectralBeta> {
        let modes: Vec<(u32, f64, f64)> = self.modes.iter().map(|m| (m.k, m.a, m.b)).collect();
        Ok(SpectralBeta::from_modes(self.n, self.a0, &modes)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub n: u32,
    pub m: u32,
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
}

impl ProfileParams {
    pub fn profile(&self) -> Result<SelfSimilarProfile> {
        Ok(SelfSimilarProfile::new(self.n, self.m, self.c1, self.c2)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Beta,
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub equation: Equation,
    pub scheme: Scheme,
    pub stencil: Stencil,
    pub n_points: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Amplitude `a` of the forcing `F(u) = a·sin u` for the φ equation; 0 by default.
    pub forcing: f64,
    /// Amplitude `w` of the initial map `φ₀(u) = u + w·sin u`.
    pub warp: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            equation: Equation::Beta,
            scheme: Scheme::CrankNicolson,
            stencil: Stencil::Compact,
            n_points: 256,
            dt: 1e-3,
            t_end: 0.25,
            forcing: 0.0,
            warp: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub coefficients: Option<Coefficients>,
    pub curve: Option<PathBuf>,
    pub profile: Option<ProfileParams>,
    /// Emit all twelve reference profiles instead of one.
    pub catalog: bool,
    pub times: Option<Vec<f64>>,
    pub grid: Option<usize>,
    /// Base point `X₀(0)` when building a curve from coefficients.
    pub base: [f64; 2],
    pub out_dir: Option<PathBuf>,
    pub oracle: OracleConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            coefficients: None,
            curve: None,
            profile: None,
            catalog: false,
            times: None,
            grid: None,
            base: [0.0, 0.0],
            out_dir: None,
            oracle: OracleConfig::default(),
        }
    }
}

/// The single initial-data source of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Coefficients(Coefficients),
    Curve(PathBuf),
    Profile(ProfileParams),
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn command(&self) -> Result<CommandKind> {
        self.command
            .ok_or_else(|| CliError::Validation("no command given; pass a subcommand or set `command` in the config".into()))
    }

    fn sources(&self) -> Vec<Source> {
        let mut v = Vec::new();
        if let Some(c) = &self.coefficients {
            v.push(Source::Coefficients(c.clone()));
        }
        if let Some(p) = &self.curve {
            v.push(Source::Curve(p.clone()));
        }
        if let Some(p) = &self.profile {
            v.push(Source::Profile(*p));
        }
        v
    }

    /// Exactly one of `--coeffs`, `--curve`, `--profile`.
    pub fn source(&self) -> Result<Source> {
        let mut s = self.sources();
        match s.len() {
            1 => Ok(s.remove(0)),
            0 => Err(CliError::Validation("no initial data; give exactly one of --coeffs, --curve, --profile".into())),
            _ => Err(CliError::Validation("several initial-data sources; give exactly one of --coeffs, --curve, --profile".into())),
        }
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(legendre_flow::DEFAULT_GRID)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("legendre-flow-out"))
    }

    /// Checks everything that can be checked before any work is done.
    pub fn validate(&self) -> Result<()> {
        let command = self.command()?;
        if let Some(times) = &self.times {
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(CliError::Validation("times must be finite and non-negative".into()));
            }
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Validation("times must be strictly increasing".into()));
            }
            if command == CommandKind::Cusps && times.first().is_some_and(|t| *t == 0.0) {
                return Err(CliError::Validation("zero counting starts after t = 0; drop the time 0".into()));
            }
        }
        if let Some(g) = self.grid {
            if g < 8 {
                return Err(CliError::Validation(format!("grid of {g} points is too coarse (need ≥ 8)")));
            }
        }
        let n_sources = self.sources().len();
        match command {
            CommandKind::Simulate | CommandKind::Cusps | CommandKind::Converge => {
                self.source()?;
            }
            CommandKind::SelfSimilar => {
                if self.coefficients.is_some() || self.curve.is_some() {
                    return Err(CliError::Validation("self-similar takes profile parameters only".into()));
                }
                if self.catalog == self.profile.is_some() {
                    return Err(CliError::Validation("give either --catalog or --n/--m/--c1/--c2".into()));
                }
            }
            CommandKind::Reparam => {
                if !matches!(self.source()?, Source::Curve(_)) {
                    return Err(CliError::Validation("reparam needs --curve <csv>".into()));
                }
            }
            CommandKind::OracleCheck => {
                let o = &self.oracle;
                if self.curve.is_some() || self.profile.is_some() || n_sources > 1 {
                    return Err(CliError::Validation("oracle-check accepts at most --coeffs as initial data".into()));
                }
                if o.equation == Equation::Phi && self.coefficients.is_some() {
                    return Err(CliError::Validation("the φ check takes --forcing and --warp, not coefficients".into()));
                }
                if !(o.dt > 0.0 && o.t_end > 0.0) || o.n_points < 8 {
                    return Err(CliError::Validation("oracle-check needs dt > 0, T > 0 and at least 8 points".into()));
                }
            }
        }
        if command != CommandKind::SelfSimilar && self.catalog {
            return Err(CliError::Validation("--catalog only applies to self-similar".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_inline_coefficients() {
        let c = Coefficients::parse(1, "a0=0.01, 2:1, 4:0.1:-0.5").unwrap();
        assert_eq!(c.a0, 0.01);
        assert_eq!(c.modes, vec![Mode { k: 2, a: 1.0, b: 0.0 }, Mode { k: 4, a: 0.1, b: -0.5 }]);
        assert!(Coefficients::parse(1, "2:x").is_err());
        assert!(Coefficients::parse(1, "0:1").is_err());
        assert!(Coefficients::parse(1, "2").is_err());
    }

    #[test]
    fn exactly_one_source() {
        let mut c = RunConfig { command: Some(CommandKind::Simulate), ..RunConfig::default() };
        assert!(c.validate().is_err());
        c.coefficients = Some(Coefficients::parse(1, "2:1").unwrap());
        assert!(c.validate().is_ok());
        c.profile = Some(ProfileParams { n: 1, m: 2, c1: 1.5, c2: 0.0 });
        assert!(c.validate().is_err());
    }

    #[test]
    fn times_must_increase() {
        let c = RunConfig {
            command: Some(CommandKind::Simulate),
            coefficients: Some(Coefficients::parse(1, "2:1").unwrap()),
            times: Some(vec![0.0, 1.0, 1.0]),
            ..RunConfig::default()
        };
        assert!(matches!(c.validate(), Err(CliError::Validation(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig {
            command: Some(CommandKind::Converge),
            coefficients: Some(Coefficients::parse(1, "2:1, 4:0.1").unwrap()),
            times: Some(vec![1.0, 2.0]),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
        assert!(RunConfig::from_json("{\"bogus\": 1}").is_err());
    }
}
