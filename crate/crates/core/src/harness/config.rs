//! TOML sweep configuration: the `run` flags, with lists allowed for sizes
//! and probabilities.
//!
//! ```toml
//! model = "structured-clifford"
//! L = [16, 32, 64]
//! p_z = 0.1
//! p_u = [0.3, 0.4, 0.5, 0.6, 0.7]
//! trajectories = 200
//! seed = 7
//! metrics = ["qfi", "tmi"]
//! out = "results/structured"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ensemble::{parse_observables, run_ensemble, AnnealConfig, EnsembleOptions, EnsembleResult, Observable};
use super::persist::persist;
use crate::anneal::{AnnealSchedule, DEFAULT_ITERATIONS_PER_RUNG, DEFAULT_RESTARTS};
use crate::circuit::{Backend, Boundary, CircuitSpec, Model};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MetricList {
    Joined(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Model,
    #[serde(rename = "L")]
    pub sizes: OneOrMany<usize>,
    pub p_z: OneOrMany<f64>,
    #[serde(default)]
    pub p_u: Option<OneOrMany<f64>>,
    #[serde(default)]
    pub p_xx: Option<OneOrMany<f64>>,
    #[serde(default = "default_depth_factor")]
    pub depth_factor: usize,
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    pub metrics: MetricList,
    #[serde(default)]
    pub boundary: Option<Boundary>,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iters")]
    pub iters_per_rung: usize,
    pub out: PathBuf,
}

fn default_depth_factor() -> usize {
    4
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

fn default_iters() -> usize {
    DEFAULT_ITERATIONS_PER_RUNG
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn observables(&self) -> Result<Vec<Observable>> {
        match &self.metrics {
            MetricList::Joined(s) => parse_observables(s),
            MetricList::List(v) => parse_observables(&v.join(",")),
        }
    }

    pub fn options(&self) -> Result<EnsembleOptions> {
        Ok(EnsembleOptions {
            backend: self.backend,
            anneal: AnnealConfig { schedule: AnnealSchedule::with_iterations(self.iters_per_rung)?, restarts: self.restarts },
            workers: self.workers,
            tmi_offset: 0,
        })
    }

    /// Every grid point, sizes outermost.
    pub fn specs(&self) -> Result<Vec<CircuitSpec>> {
        let p_us: Vec<Option<f64>> = self.p_u.as_ref().map_or(vec![None], |v| v.to_vec().into_iter().map(Some).collect());
        let p_xxs: Vec<Option<f64>> =
            self.p_xx.as_ref().map_or(vec![None], |v| v.to_vec().into_iter().map(Some).collect());
        let mut out = Vec::new();
        for l in self.sizes.to_vec() {
            for p_z in self.p_z.to_vec() {
                for &p_u in &p_us {
                    for &p_xx in &p_xxs {
                        let mut spec = CircuitSpec::for_model(self.model, l, p_z, p_u, p_xx, self.seed)?
                            .with_depth(self.depth_factor * l);
                        if let Some(b) = self.boundary {
                            spec = spec.with_boundary(b)?;
                        }
                        out.push(spec);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// File name for one grid point inside the sweep's output directory.
pub fn point_file_name(spec: &CircuitSpec) -> String {
    format!("{}_L{}_pz{}_pu{}_pxx{}.jsonl", spec.model, spec.num_qubits, spec.p_z, spec.p_u, spec.p_xx)
}

/// Runs every grid point and persists each under `config.out`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<(PathBuf, EnsembleResult)>> {
    let observables = config.observables()?;
    let options = config.options()?;
    let specs = config.specs()?;
    let mut done = Vec::with_capacity(specs.len());
    for spec in specs {
        let result = run_ensemble(&spec, config.trajectories, &observables, &options)?;
        let path = config.out.join(point_file_name(&spec));
        persist(&result, &path)?;
        done.push((path, result));
    }
    Ok(done)
}
