use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{anneal, AnnealSchedule, DEFAULT_RESTARTS};
use crate::circuit::{run_trajectory_with, Backend, Boundary, CircuitSpec, FinalState, Model};
use crate::error::{Error, Result};
use crate::metrics::{correlation_tensor, half_chain_entropy, tmi, TmiPartition};
use crate::rng::{stream, Purpose};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Qfi,
    Tmi,
    Entropy,
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "qfi" | "fq" => Ok(Observable::Qfi),
            "tmi" | "i3" => Ok(Observable::Tmi),
            "entropy" | "s_half" => Ok(Observable::Entropy),
            other => Err(Error::Config(format!("unknown observable '{other}'"))),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::Qfi => "qfi",
            Observable::Tmi => "tmi",
            Observable::Entropy => "entropy",
        })
    }
}

/// Parses a comma-separated list such as `qfi,tmi`.
pub fn parse_observables(list: &str) -> Result<Vec<Observable>> {
    let mut out: Vec<Observable> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealConfig {
    pub schedule: AnnealSchedule,
    pub restarts: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self { schedule: AnnealSchedule::default(), restarts: DEFAULT_RESTARTS }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnsembleOptions {
    /// Defaults to the model's natural backend.
    pub backend: Option<Backend>,
    pub anneal: AnnealConfig,
    /// Worker threads; `None` uses rayon's global pool.
    pub workers: Option<usize>,
    pub tmi_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub schema_version: u32,
    pub model: Model,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub p_z: f64,
    pub p_xx: f64,
    pub p_u: f64,
    pub depth: usize,
    pub boundary: Boundary,
    pub master_seed: u64,
    pub trajectory_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_half: Option<f64>,
    pub wall_ms: f64,
}

impl Row {
    fn new(spec: &CircuitSpec, trajectory_index: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model: spec.model,
            num_qubits: spec.num_qubits,
            p_z: spec.p_z,
            p_xx: spec.p_xx,
            p_u: spec.p_u,
            depth: spec.depth,
            boundary: spec.boundary,
            master_seed: spec.master_seed,
            trajectory_index,
            f_q: None,
            i3: None,
            s_half: None,
            wall_ms: 0.0,
        }
    }

    pub fn value(&self, observable: Observable) -> Option<f64> {
        match observable {
            Observable::Qfi => self.f_q,
            Observable::Tmi => self.i3,
            Observable::Entropy => self.s_half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation over `√n`; zero for a single row.
    pub stderr: f64,
    pub count: usize,
}

impl Stat {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, stderr, count: n })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_q: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i3: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_half: Option<Stat>,
}

impl Aggregates {
    pub fn from_rows(rows: &[Row]) -> Self {
        let collect = |obs| Stat::from_values(&rows.iter().filter_map(|r| r.value(obs)).collect::<Vec<_>>());
        Self { f_q: collect(Observable::Qfi), i3: collect(Observable::Tmi), s_half: collect(Observable::Entropy) }
    }

    pub fn get(&self, observable: Observable) -> Option<Stat> {
        match observable {
            Observable::Qfi => self.f_q,
            Observable::Tmi => self.i3,
            Observable::Entropy => self.s_half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub spec: CircuitSpec,
    pub rows: Vec<Row>,
    pub aggregates: Aggregates,
}

/// Runs one trajectory and evaluates the requested observables on it.
pub fn trajectory_row(
    spec: &CircuitSpec,
    trajectory_index: u64,
    observables: &[Observable],
    options: &EnsembleOptions,
) -> Result<Row> {
    let started = Instant::now();
    let backend = options.backend.unwrap_or(spec.model.default_backend());
    let record = run_trajectory_with(spec, trajectory_index, backend, false)?;
    let mut row = Row::new(spec, trajectory_index);
    let state = &record.final_state;
    let n = spec.num_qubits as f64;
    for &obs in observables {
        match obs {
            Observable::Qfi => {
                row.f_q = Some(match state {
                    FinalState::Cluster(labels) => labels.cluster_qfi() / n,
                    _ => {
                        let source = state.pauli_source().ok_or_else(|| Error::Internal("no Pauli access".into()))?;
                        let tensor = correlation_tensor(source)?;
                        let mut rng = stream(spec.master_seed, trajectory_index, Purpose::Anneal);
                        anneal(&tensor, &options.anneal.schedule, options.anneal.restarts, &mut rng)?.density
                    }
                });
            }
            Observable::Tmi => {
                let partition = TmiPartition::with_offset(spec.num_qubits, options.tmi_offset)?;
                row.i3 = Some(tmi(state.entropy_source(), &partition)?);
            }
            Observable::Entropy => row.s_half = Some(half_chain_entropy(state.entropy_source())?),
        }
    }
    row.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(row)
}

/// Runs trajectories `0..trajectories`. Rows come back in index order and
/// do not depend on the number of workers.
pub fn run_ensemble(
    spec: &CircuitSpec,
    trajectories: usize,
    observables: &[Observable],
    options: &EnsembleOptions,
) -> Result<EnsembleResult> {
    spec.validate()?;
    if observables.contains(&Observable::Tmi) {
        TmiPartition::new(spec.num_qubits)?;
    }
    let work = || -> Result<Vec<Row>> {
        (0..trajectories as u64).into_par_iter().map(|i| trajectory_row(spec, i, observables, options)).collect()
    };
    let rows = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let aggregates = Aggregates::from_rows(&rows);
    Ok(EnsembleResult { spec: spec.clone(), rows, aggregates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stat_matches_definition() {
        let s = Stat::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.stderr - sd / 2.0).abs() < 1e-12);
        assert!(Stat::from_values(&[]).is_none());
        assert_eq!(Stat::from_values(&[7.0]).unwrap().stderr, 0.0);
    }

    #[test]
    fn zero_trajectories_is_empty() {
        let spec = CircuitSpec::projective_ising(8, 0.3, 1).unwrap();
        let r = run_ensemble(&spec, 0, &[Observable::Qfi], &EnsembleOptions::default()).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.aggregates, Aggregates::default());
        assert_eq!(serde_json::to_string(&r.aggregates).unwrap(), "{}");
    }

    #[test]
    fn observables_parse() {
        assert_eq!(parse_observables("tmi,qfi,tmi").unwrap(), vec![Observable::Qfi, Observable::Tmi]);
        assert!(parse_observables("qfi,foo").is_err());
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let spec = CircuitSpec::unstructured(Model::UnstructuredClifford, 8, 0.2, 11).unwrap();
        let obs = [Observable::Tmi, Observable::Entropy];
        let one = EnsembleOptions { workers: Some(1), ..Default::default() };
        let three = EnsembleOptions { workers: Some(3), ..Default::default() };
        let mut a = run_ensemble(&spec, 12, &obs, &one).unwrap();
        let mut b = run_ensemble(&spec, 12, &obs, &three).unwrap();
        for r in a.rows.iter_mut().chain(b.rows.iter_mut()) {
            r.wall_ms = 0.0;
        }
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.aggregates, b.aggregates);
    }
}
