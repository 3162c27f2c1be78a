//! Run configuration: a TOML file, edited by `--set section.key=value`
//! overrides, deserialised strictly (unknown keys are errors).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::FunctionalContext;
use crate::grid::make_grid;
use crate::model::{NonlinearitySpec, PotentialSpec, Profile};
use crate::solver::SolveOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seed of the verification sampler.
    pub seed: u64,
    pub lambda: f64,
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    pub nonlinearity: NonlinearityConfig,
    pub solver: SolveOptions,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            lambda: 1.0,
            grid: GridConfig::default(),
            potential: PotentialConfig::AlgebraicWell {
                a: 1.0,
                b: 0.2,
                alpha: 2.0,
                theta: None,
            },
            nonlinearity: NonlinearityConfig::Power { p: 4.0, coef: 1.0 },
            solver: SolveOptions::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub r_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            r_max: 30.0,
            n: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Constant {
        v_inf: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
    AlgebraicWell {
        a: f64,
        b: f64,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
    Perturbed {
        v_inf: f64,
        eps: f64,
        profile: Profile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
}

impl PotentialConfig {
    pub fn spec(&self) -> Result<PotentialSpec> {
        let (spec, theta) = match *self {
            PotentialConfig::Constant { v_inf, theta } => {
                if !v_inf.is_finite() {
                    return Err(Error::InvalidParameter(format!("bad v_inf {v_inf}")));
                }
                (PotentialSpec::constant(v_inf), theta)
            }
            PotentialConfig::AlgebraicWell { a, b, alpha, theta } => {
                (PotentialSpec::algebraic_well(a, b, alpha)?, theta)
            }
            PotentialConfig::Perturbed {
                v_inf,
                eps,
                profile,
                theta,
            } => (PotentialSpec::perturbed(v_inf, eps, profile)?, theta),
        };
        match theta {
            Some(t) => spec.with_theta(t),
            None => Ok(spec),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Power {
        p: f64,
        #[serde(default = "one")]
        coef: f64,
    },
    DoublePower {
        p: f64,
        q: f64,
        a: f64,
        b: f64,
    },
    DampedPower {
        p: f64,
        #[serde(default = "one")]
        coef: f64,
    },
}

impl NonlinearityConfig {
    pub fn spec(&self) -> Result<NonlinearitySpec> {
        match *self {
            NonlinearityConfig::Power { p, coef } => {
                NonlinearitySpec::power_with_coefficient(p, coef)
            }
            NonlinearityConfig::DoublePower { p, q, a, b } => {
                NonlinearitySpec::double_power(p, q, a, b)
            }
            NonlinearityConfig::DampedPower { p, coef } => NonlinearitySpec::damped_power(p, coef),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_grid: Vec<f64>,
    /// Largest path endpoint `T` tried.
    pub t_cap: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_grid: vec![0.9, 0.95, 1.0],
            t_cap: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

/// Applies one `section.key=value` (or top-level `key=value`) override.
/// The value is read as a TOML literal, falling back to a bare string.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let value = parse_literal(raw.trim());
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad override key `{path}`")));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut table = doc;
    for k in parents {
        let entry = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{k}` in `{path}` is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_literal(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` (defaults when absent) and applies `overrides` in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let defaults: toml::Table =
            toml::Table::try_from(Config::default()).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            // an override into a missing section edits that section's defaults,
            // unless it switches the family
            if let Some((section, rest)) = o.split_once('.') {
                let switches_family = rest.trim_start().starts_with("family");
                if !doc.contains_key(section) && !switches_family {
                    if let Some(d) = defaults.get(section) {
                        doc.insert(section.to_string(), d.clone());
                    }
                }
            }
            apply_override(&mut doc, o)?;
        }
        let cfg = Config::deserialize(doc).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "lambda must lie in [0,1], got {}",
                self.lambda
            )));
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.potential
            .spec()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.nonlinearity
            .spec()
            .map_err(|e| Error::Config(e.to_string()))?;
        make_grid(self.grid.dim, self.grid.r_max, self.grid.n)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn context(&self) -> Result<FunctionalContext> {
        let grid = make_grid(self.grid.dim, self.grid.r_max, self.grid.n)?;
        FunctionalContext::new(grid, self.potential.spec()?, self.nonlinearity.spec()?)
            .with_lambda(self.lambda)
    }
}
