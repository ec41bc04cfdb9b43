//! Simulation of monitored qubit chains and extraction of their
//! multipartite entanglement from the quantum Fisher information.
//!
//! Three interchangeable backends ([`PureState`], [`Tableau`],
//! [`ClusterLabeling`]) are driven by the [`circuit`] engine; [`anneal`]
//! maximises the Fisher density over local measurement directions and
//! [`harness`] runs ensembles, persists them and analyses the results.

pub mod anneal;
pub mod circuit;
pub mod cluster;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod pauli;
pub mod rng;
pub mod stabilizer;
pub mod statevector;

pub use anneal::{anneal, AnnealSchedule, CorrelationTensor, DirectionField, QfiResult};
pub use circuit::{
    replay, run_trajectory, run_trajectory_with, Backend, Boundary, CircuitSpec, Engine, FinalState, Model,
    TrajectoryRecord,
};
pub use cluster::ClusterLabeling;
pub use error::{Error, Result};
pub use metrics::{correlation_tensor, half_chain_entropy, tmi, EntropySource, PauliExpectation, TmiPartition};
pub use pauli::{Axis, PauliString};
pub use stabilizer::{CliffordGate, Tableau};
pub use statevector::{GateSymmetry, PureState, TwoQubitGate};
