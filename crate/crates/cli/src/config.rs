//! JSON configs for the `demo` subcommand and shared input loading.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use rearrange_lab_core::{Kernel, LatticeSpec};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "REARRANGE_LAB_SEED";

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        origin: path.display().to_string(),
        source,
    })
}

/// A kernel given inline as JSON or as a path to a JSON file, either bare
/// or wrapped as `{"kernel": ...}`.
pub fn kernel_arg(arg: &str) -> CliResult<Kernel> {
    let (origin, mut value): (String, Value) = if arg.trim_start().starts_with('{') {
        let v = serde_json::from_str(arg).map_err(|source| CliError::Json {
            origin: "--kernel".into(),
            source,
        })?;
        ("--kernel".into(), v)
    } else {
        (arg.to_string(), read_json(Path::new(arg))?)
    };
    if let Some(inner) = value.as_object_mut().and_then(|m| m.remove("kernel")) {
        value = inner;
    }
    serde_json::from_value(value).map_err(|source| CliError::Json { origin, source })
}

/// Seed from the flag, then the config, then `REARRANGE_LAB_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = flag.or(config) {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{SEED_ENV} must be an unsigned integer, got {text:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

/// A quadruple `(i, j, y, h, k)` with zero-based coordinate indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessInput {
    pub i: usize,
    pub j: usize,
    pub y: Vec<f64>,
    pub h: f64,
    pub k: f64,
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

fn unit() -> f64 {
    1.0
}

fn default_pairs() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HlDemoConfig {
    pub integrand: String,
    pub arity: usize,
    #[serde(default = "one")]
    pub dim: usize,
    /// Searched on `lattice` when absent.
    #[serde(default)]
    pub witness: Option<WitnessInput>,
    #[serde(default)]
    pub lattice: LatticeSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszDemoConfig {
    pub integrand: String,
    #[serde(default = "two")]
    pub arity: usize,
    pub kernel: Kernel,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default)]
    pub witness: Option<WitnessInput>,
    #[serde(default)]
    pub lattice: LatticeSpec,
    /// Searched when absent.
    #[serde(default)]
    pub eps_t0: Option<(f64, f64)>,
    #[serde(default, rename = "R_list")]
    pub r_list: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDemoConfig {
    pub integrand: String,
    #[serde(default = "two")]
    pub arity: usize,
    pub kernel: Kernel,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub eps: f64,
    #[serde(default = "unit")]
    pub a: f64,
    #[serde(default = "unit")]
    pub b: f64,
    /// Random pairs for the pointwise monotonicity probe.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Radius of the probe ball; defaults to `2 max(|z1|, |z2|, 1)`.
    #[serde(default)]
    pub probe_radius: Option<f64>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}
