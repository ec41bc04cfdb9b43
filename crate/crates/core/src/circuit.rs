//! Stochastic circuit realisations.
//!
//! A trajectory is fully determined by its [`CircuitSpec`] and its index:
//! which operations act where (and which gates are drawn) comes from the
//! circuit stream, measurement outcomes from the measurement stream. Because
//! the two are independent, one realisation can drive several backends, and
//! a recorded outcome log can be replayed on the exact state-vector backend.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterLabeling;
use crate::error::{Error, Result};
use crate::metrics::{EntropySource, PauliExpectation};
use crate::pauli::{Axis, PauliString};
use crate::rng::{stream, Purpose, StreamRng};
use crate::stabilizer::{sample_clifford_two_qubit, sample_symmetric_clifford, CliffordGate, Tableau};
use crate::statevector::{sample_haar_gate, sample_symmetric_gate, PureState, TwoQubitGate, DEFAULT_QUBIT_CAP};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    UnstructuredHaar,
    UnstructuredClifford,
    ProjectiveIsing,
    StructuredClifford,
    StructuredHaar,
    StructuredNosymClifford,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::UnstructuredHaar,
        Model::UnstructuredClifford,
        Model::ProjectiveIsing,
        Model::StructuredClifford,
        Model::StructuredHaar,
        Model::StructuredNosymClifford,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::UnstructuredHaar => "unstructured-haar",
            Model::UnstructuredClifford => "unstructured-clifford",
            Model::ProjectiveIsing => "projective-ising",
            Model::StructuredClifford => "structured-clifford",
            Model::StructuredHaar => "structured-haar",
            Model::StructuredNosymClifford => "structured-nosym-clifford",
        }
    }

    pub fn is_unstructured(self) -> bool {
        matches!(self, Model::UnstructuredHaar | Model::UnstructuredClifford)
    }

    pub fn is_structured(self) -> bool {
        matches!(self, Model::StructuredClifford | Model::StructuredHaar | Model::StructuredNosymClifford)
    }

    pub fn uses_haar(self) -> bool {
        matches!(self, Model::UnstructuredHaar | Model::StructuredHaar)
    }

    pub fn default_backend(self) -> Backend {
        match self {
            Model::ProjectiveIsing => Backend::Cluster,
            m if m.uses_haar() => Backend::Statevector,
            _ => Backend::Stabilizer,
        }
    }

    pub fn default_boundary(self) -> Boundary {
        match self {
            Model::ProjectiveIsing => Boundary::Open,
            _ => Boundary::Periodic,
        }
    }

    fn supports(self, backend: Backend) -> bool {
        match backend {
            Backend::Statevector => true,
            Backend::Stabilizer => !self.uses_haar(),
            Backend::Cluster => self == Model::ProjectiveIsing,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            _ => Err(Error::Config(format!("unknown boundary '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Statevector,
    Stabilizer,
    Cluster,
}

/// How a structured step distributes `p_u`, `p_xx`, `p_z` over a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuredLayout {
    /// Exactly one operation per active brickwork bond.
    #[default]
    PerBondExclusive,
    /// Independent gate, `XX` and `Z` sublayers.
    IndependentSublayers,
}

/// Sites hit by a `Z` draw in the per-bond-exclusive layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuredZ {
    #[default]
    BothSites,
    FirstSite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub model: Model,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub depth: usize,
    pub p_z: f64,
    pub p_xx: f64,
    pub p_u: f64,
    pub boundary: Boundary,
    pub master_seed: u64,
    #[serde(default)]
    pub layout: StructuredLayout,
    #[serde(default)]
    pub z_mode: StructuredZ,
}

impl CircuitSpec {
    /// Brickwork circuit with a `Z` measurement layer before every gate layer.
    pub fn unstructured(model: Model, num_qubits: usize, p_z: f64, master_seed: u64) -> Result<Self> {
        Self {
            model,
            num_qubits,
            depth: 4 * num_qubits,
            p_z,
            p_xx: 0.0,
            p_u: 1.0,
            boundary: model.default_boundary(),
            master_seed,
            layout: StructuredLayout::default(),
            z_mode: StructuredZ::default(),
        }
        .validated()
    }

    pub fn projective_ising(num_qubits: usize, p_z: f64, master_seed: u64) -> Result<Self> {
        Self {
            model: Model::ProjectiveIsing,
            num_qubits,
            depth: 4 * num_qubits,
            p_z,
            p_xx: 1.0 - p_z,
            p_u: 0.0,
            boundary: Boundary::Open,
            master_seed,
            layout: StructuredLayout::default(),
            z_mode: StructuredZ::default(),
        }
        .validated()
    }

    /// Structured circuit with `p_xx = 1 − p_u − p_z`.
    pub fn structured(model: Model, num_qubits: usize, p_u: f64, p_z: f64, master_seed: u64) -> Result<Self> {
        Self {
            model,
            num_qubits,
            depth: 4 * num_qubits,
            p_z,
            p_xx: 1.0 - p_u - p_z,
            p_u,
            boundary: model.default_boundary(),
            master_seed,
            layout: StructuredLayout::default(),
            z_mode: StructuredZ::default(),
        }
        .validated()
    }

    /// Builds a spec from loosely given probabilities, filling in whatever
    /// the model fixes. An explicit `p_xx` or `p_u` must agree with it.
    pub fn for_model(
        model: Model,
        num_qubits: usize,
        p_z: f64,
        p_u: Option<f64>,
        p_xx: Option<f64>,
        master_seed: u64,
    ) -> Result<Self> {
        let spec = match model {
            m if m.is_unstructured() => Self::unstructured(m, num_qubits, p_z, master_seed)?,
            Model::ProjectiveIsing => Self::projective_ising(num_qubits, p_z, master_seed)?,
            m => {
                let p_u = match (p_u, p_xx) {
                    (Some(u), _) => u,
                    (None, Some(xx)) => 1.0 - p_z - xx,
                    (None, None) => return Err(Error::Config(format!("{m} needs p_u"))),
                };
                Self::structured(m, num_qubits, p_u, p_z, master_seed)?
            }
        };
        for (name, given, fixed) in [("p_u", p_u, spec.p_u), ("p_xx", p_xx, spec.p_xx)] {
            if let Some(v) = given {
                if (v - fixed).abs() > PROB_TOL {
                    return Err(Error::Config(format!("{name} = {v} conflicts with {fixed} required by {model}")));
                }
            }
        }
        Ok(spec)
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Result<Self> {
        self.boundary = boundary;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_qubits < 2 {
            return bad(format!("need at least two qubits, got {}", self.num_qubits));
        }
        for (name, p) in [("p_z", self.p_z), ("p_xx", self.p_xx), ("p_u", self.p_u)] {
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.model.is_unstructured() && (self.p_xx.abs() > PROB_TOL || (self.p_u - 1.0).abs() > PROB_TOL) {
            return bad("unstructured models require p_xx = 0 and p_u = 1".into());
        }
        if self.model == Model::ProjectiveIsing
            && (self.p_u.abs() > PROB_TOL || (self.p_xx + self.p_z - 1.0).abs() > PROB_TOL)
        {
            return bad("projective-ising requires p_u = 0 and p_xx = 1 − p_z".into());
        }
        if self.model.is_structured() && (self.p_u + self.p_z + self.p_xx - 1.0).abs() > PROB_TOL {
            return bad("structured models require p_u + p_z + p_xx = 1".into());
        }
        if self.boundary == Boundary::Periodic && self.model != Model::ProjectiveIsing && self.num_qubits % 2 == 1 {
            return bad("periodic brickwork needs an even number of qubits".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Unitary(TwoQubitGate),
    Clifford(CliffordGate),
}

/// What the engine needs from a backend.
pub trait Simulator {
    /// Measures `p`, postselecting on `forced` when given. Backends that do
    /// not track outcomes return `None`.
    fn measure(&mut self, p: &PauliString, forced: Option<i8>, rng: &mut StreamRng) -> Result<Option<i8>>;
    fn apply_gate(&mut self, i: usize, j: usize, gate: &Gate) -> Result<()>;

    fn measure_z(&mut self, k: usize, forced: Option<i8>, rng: &mut StreamRng) -> Result<Option<i8>> {
        self.measure(&PauliString::z(k), forced, rng)
    }

    fn measure_xx(&mut self, a: usize, b: usize, forced: Option<i8>, rng: &mut StreamRng) -> Result<Option<i8>> {
        self.measure(&PauliString::xx(a, b)?, forced, rng)
    }
}

impl Simulator for PureState {
    fn measure(&mut self, p: &PauliString, forced: Option<i8>, rng: &mut StreamRng) -> Result<Option<i8>> {
        match forced {
            Some(o) => self.postselect_pauli(p, o).map(|_| Some(o)),
            None => self.measure_pauli(p, rng).map(Some),
        }
    }

    fn apply_gate(&mut self, i: usize, j: usize, gate: &Gate) -> Result<()> {
        match gate {
            Gate::Unitary(u) => PureState::apply_gate(self, i, j, u),
            Gate::Clifford(c) => PureState::apply_gate(self, i, j, &c.to_unitary()),
        }
    }
}

impl Simulator for Tableau {
    fn measure(&mut self, p: &PauliString, forced: Option<i8>, rng: &mut StreamRng) -> Result<Option<i8>> {
        match forced {
            Some(o) => self.postselect_pauli(p, o).map(|_| Some(o)),
            None => self.measure_pauli(p, rng).map(Some),
        }
    }

    fn apply_gate(&mut self, i: usize, j: usize, gate: &Gate) -> Result<()> {
        match gate {
            Gate::Clifford(c) => self.apply_clifford(i, j, c),
            Gate::Unitary(_) => Err(Error::Config("stabilizer backend cannot apply a non-Clifford gate".into())),
        }
    }
}

impl Simulator for ClusterLabeling {
    fn measure(&mut self, p: &PauliString, _forced: Option<i8>, _rng: &mut StreamRng) -> Result<Option<i8>> {
        match *p.support() {
            [(k, Axis::Z)] => self.apply_z(k)?,
            [(a, Axis::X), (b, Axis::X)] => self.apply_xx_pair(a, b)?,
            _ => return Err(Error::Config("cluster backend only measures Z and XX".into())),
        }
        Ok(None)
    }

    fn apply_gate(&mut self, _i: usize, _j: usize, _gate: &Gate) -> Result<()> {
        Err(Error::Config("cluster backend cannot apply unitary gates".into()))
    }

    fn measure_z(&mut self, k: usize, _forced: Option<i8>, _rng: &mut StreamRng) -> Result<Option<i8>> {
        self.apply_z(k).map(|_| None)
    }

    fn measure_xx(&mut self, a: usize, b: usize, _forced: Option<i8>, _rng: &mut StreamRng) -> Result<Option<i8>> {
        self.apply_xx_pair(a, b).map(|_| None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Z,
    Xx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub step: u32,
    pub kind: OpKind,
    pub sites: (u32, u32),
    pub outcome: Option<i8>,
}

/// Bernoulli draw from one 32-bit word.
#[derive(Debug, Clone, Copy)]
struct Coin(u64);

impl Coin {
    fn new(p: f64) -> Self {
        Coin((p.clamp(0.0, 1.0) * 4_294_967_296.0).round() as u64)
    }

    #[inline]
    fn flip(self, rng: &mut StreamRng) -> bool {
        u64::from(rng.next_u32()) < self.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Coins {
    z: Coin,
    xx: Coin,
    u: Coin,
}

/// Drives one trajectory: owns the random streams and the outcome log.
pub struct Engine<'a> {
    spec: &'a CircuitSpec,
    circuit: StreamRng,
    measurement: StreamRng,
    coins: Coins,
    picked: Vec<u32>,
    log: Option<Vec<LogEntry>>,
    replay: Option<std::slice::Iter<'a, LogEntry>>,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a CircuitSpec, trajectory_index: u64) -> Self {
        Self {
            spec,
            circuit: stream(spec.master_seed, trajectory_index, Purpose::Circuit),
            measurement: stream(spec.master_seed, trajectory_index, Purpose::Measurement),
            coins: Coins { z: Coin::new(spec.p_z), xx: Coin::new(spec.p_xx), u: Coin::new(spec.p_u) },
            picked: Vec::new(),
            log: None,
            replay: None,
        }
    }

    pub fn recording(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    /// Forces measurement outcomes from a previously recorded log.
    pub fn replaying(mut self, log: &'a [LogEntry]) -> Self {
        self.replay = Some(log.iter());
        self
    }

    pub fn into_log(self) -> Vec<LogEntry> {
        self.log.unwrap_or_default()
    }

    fn measure<S: Simulator + ?Sized>(&mut self, sim: &mut S, step: usize, kind: OpKind, a: usize, b: usize) -> Result<()> {
        let sites = (a as u32, b as u32);
        let forced = match self.replay.as_mut() {
            Some(it) => {
                let entry = it.next().ok_or_else(|| Error::Internal("replay log exhausted".into()))?;
                if entry.kind != kind || entry.sites != sites || entry.step != step as u32 {
                    return Err(Error::Internal(format!("replay log diverged at step {step}")));
                }
                entry.outcome
            }
            None => None,
        };
        let outcome = match kind {
            OpKind::Z => sim.measure_z(a, forced, &mut self.measurement)?,
            OpKind::Xx => sim.measure_xx(a, b, forced, &mut self.measurement)?,
        };
        if let Some(log) = self.log.as_mut() {
            log.push(LogEntry { step: step as u32, kind, sites, outcome });
        }
        Ok(())
    }

    fn sample_gate(&mut self) -> Result<Gate> {
        let rng = &mut self.circuit;
        Ok(match self.spec.model {
            Model::UnstructuredHaar => Gate::Unitary(sample_haar_gate(rng)),
            Model::StructuredHaar => Gate::Unitary(sample_symmetric_gate(rng)),
            Model::UnstructuredClifford | Model::StructuredNosymClifford => Gate::Clifford(sample_clifford_two_qubit(rng)),
            Model::StructuredClifford => Gate::Clifford(sample_symmetric_clifford(rng)),
            Model::ProjectiveIsing => return Err(Error::Config("projective-ising has no unitary gates".into())),
        })
    }

    fn gate<S: Simulator + ?Sized>(&mut self, sim: &mut S, i: usize, j: usize) -> Result<()> {
        let gate = self.sample_gate()?;
        sim.apply_gate(i, j, &gate)
    }

    /// Indices in `0..n` that pass independent coin flips, in order. The
    /// flips are drawn branch-free so that `p ≈ 1/2` costs no mispredictions.
    fn pick(&mut self, coin: Coin, n: usize) -> Vec<u32> {
        let mut picked = std::mem::take(&mut self.picked);
        picked.clear();
        picked.resize(n, 0);
        let mut len = 0;
        for k in 0..n {
            picked[len] = k as u32;
            len += coin.flip(&mut self.circuit) as usize;
        }
        picked.truncate(len);
        picked
    }

    /// Runs step `step_index` of whichever model the spec describes.
    pub fn step<S: Simulator + ?Sized>(&mut self, sim: &mut S, step_index: usize) -> Result<()> {
        match self.spec.model {
            m if m.is_unstructured() => self.step_unstructured(sim, step_index),
            Model::ProjectiveIsing => self.step_projective_ising(sim, step_index),
            _ => self.step_structured(sim, step_index),
        }
    }

    /// `Z` on every site with probability `p_z`, then one brickwork layer.
    pub fn step_unstructured<S: Simulator + ?Sized>(&mut self, sim: &mut S, step_index: usize) -> Result<()> {
        let spec = self.spec;
        self.z_layer(sim, step_index)?;
        for (i, j) in brickwork_bonds(spec.num_qubits, step_index % 2, spec.boundary) {
            self.gate(sim, i, j)?;
        }
        Ok(())
    }

    /// `XX` on every bond with probability `p_xx`, then `Z` on every site
    /// with probability `p_z`.
    pub fn step_projective_ising<S: Simulator + ?Sized>(&mut self, sim: &mut S, step_index: usize) -> Result<()> {
        let spec = self.spec;
        let n = spec.num_qubits;
        let bonds = if spec.boundary == Boundary::Periodic && n > 2 { n } else { n - 1 };
        let picked = self.pick(self.coins.xx, bonds);
        for &k in &picked {
            let k = k as usize;
            self.measure(sim, step_index, OpKind::Xx, k, (k + 1) % n)?;
        }
        self.picked = picked;
        self.z_layer(sim, step_index)
    }

    fn z_layer<S: Simulator + ?Sized>(&mut self, sim: &mut S, step_index: usize) -> Result<()> {
        let picked = self.pick(self.coins.z, self.spec.num_qubits);
        for &q in &picked {
            self.measure(sim, step_index, OpKind::Z, q as usize, q as usize)?;
        }
        self.picked = picked;
        Ok(())
    }

    pub fn step_structured<S: Simulator + ?Sized>(&mut self, sim: &mut S, step_index: usize) -> Result<()> {
        let spec = self.spec;
        let bonds = brickwork_bonds(spec.num_qubits, step_index % 2, spec.boundary);
        match spec.layout {
            StructuredLayout::PerBondExclusive => {
                for (i, j) in bonds {
                    let u: f64 = self.circuit.random();
                    if u < spec.p_u {
                        self.gate(sim, i, j)?;
                    } else if u < spec.p_u + spec.p_xx {
                        self.measure(sim, step_index, OpKind::Xx, i, j)?;
                    } else {
                        self.measure(sim, step_index, OpKind::Z, i, i)?;
                        if spec.z_mode == StructuredZ::BothSites {
                            self.measure(sim, step_index, OpKind::Z, j, j)?;
                        }
                    }
                }
            }
            StructuredLayout::IndependentSublayers => {
                for &(i, j) in &bonds {
                    if self.coins.u.flip(&mut self.circuit) {
                        self.gate(sim, i, j)?;
                    }
                }
                for &(i, j) in &bonds {
                    if self.coins.xx.flip(&mut self.circuit) {
                        self.measure(sim, step_index, OpKind::Xx, i, j)?;
                    }
                }
                self.z_layer(sim, step_index)?;
            }
        }
        Ok(())
    }

    pub fn run<S: Simulator + ?Sized>(&mut self, sim: &mut S) -> Result<()> {
        for step in 0..self.spec.depth {
            self.step(sim, step)?;
        }
        Ok(())
    }
}

/// Bonds of one brickwork layer: `(k, k+1)` for `k ≡ parity (mod 2)`, plus
/// the wrap-around bond `(L−1, 0)` on odd layers of a periodic chain.
pub fn brickwork_bonds(num_qubits: usize, parity: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (parity..num_qubits.saturating_sub(1)).step_by(2).map(|k| (k, k + 1)).collect();
    if boundary == Boundary::Periodic && num_qubits > 2 && num_qubits.is_multiple_of(2) && (num_qubits - 1) % 2 == parity {
        bonds.push((num_qubits - 1, 0));
    }
    bonds
}

/// Every nearest-neighbour bond of the chain.
pub fn all_bonds(num_qubits: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..num_qubits.saturating_sub(1)).map(|k| (k, k + 1)).collect();
    if boundary == Boundary::Periodic && num_qubits > 2 {
        bonds.push((num_qubits - 1, 0));
    }
    bonds
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Statevector(PureState),
    Stabilizer(Tableau),
    Cluster(ClusterLabeling),
}

impl FinalState {
    pub fn fresh(backend: Backend, num_qubits: usize) -> Result<Self> {
        Ok(match backend {
            Backend::Statevector => FinalState::Statevector(PureState::with_cap(num_qubits, DEFAULT_QUBIT_CAP)?),
            Backend::Stabilizer => FinalState::Stabilizer(Tableau::new(num_qubits)?),
            Backend::Cluster => FinalState::Cluster(ClusterLabeling::new(num_qubits)?),
        })
    }

    pub fn simulator(&mut self) -> &mut dyn Simulator {
        match self {
            FinalState::Statevector(s) => s,
            FinalState::Stabilizer(t) => t,
            FinalState::Cluster(c) => c,
        }
    }

    /// Runs the whole circuit with a backend-specialised engine.
    fn run_with(&mut self, engine: &mut Engine<'_>) -> Result<()> {
        match self {
            FinalState::Statevector(s) => engine.run(s),
            FinalState::Stabilizer(t) => engine.run(t),
            FinalState::Cluster(c) => engine.run(c),
        }
    }

    pub fn entropy_source(&self) -> &dyn EntropySource {
        match self {
            FinalState::Statevector(s) => s,
            FinalState::Stabilizer(t) => t,
            FinalState::Cluster(c) => c,
        }
    }

    /// Pauli access for the exact backends; `None` for cluster labels.
    pub fn pauli_source(&self) -> Option<&dyn PauliExpectation> {
        match self {
            FinalState::Statevector(s) => Some(s),
            FinalState::Stabilizer(t) => Some(t),
            FinalState::Cluster(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub spec: CircuitSpec,
    pub trajectory_index: u64,
    pub backend: Backend,
    /// Measurement log; empty unless recording was requested.
    pub log: Vec<LogEntry>,
    pub final_state: FinalState,
    pub wall_time: Duration,
}

fn check_backend(spec: &CircuitSpec, backend: Backend) -> Result<()> {
    spec.validate()?;
    if !spec.model.supports(backend) {
        return Err(Error::Config(format!("model {} cannot run on the {backend:?} backend", spec.model)));
    }
    Ok(())
}

/// Runs a trajectory on the model's default backend without recording.
pub fn run_trajectory(spec: &CircuitSpec, trajectory_index: u64) -> Result<TrajectoryRecord> {
    run_trajectory_with(spec, trajectory_index, spec.model.default_backend(), false)
}

pub fn run_trajectory_with(spec: &CircuitSpec, trajectory_index: u64, backend: Backend, record: bool) -> Result<TrajectoryRecord> {
    check_backend(spec, backend)?;
    let start = Instant::now();
    let mut state = FinalState::fresh(backend, spec.num_qubits)?;
    let mut engine = Engine::new(spec, trajectory_index);
    if record {
        engine = engine.recording();
    }
    state.run_with(&mut engine)?;
    Ok(TrajectoryRecord {
        spec: spec.clone(),
        trajectory_index,
        backend,
        log: engine.into_log(),
        final_state: state,
        wall_time: start.elapsed(),
    })
}

/// Re-executes a recorded trajectory on `backend`, forcing every logged
/// outcome. Circuit randomness is regenerated from the same stream.
pub fn replay(record: &TrajectoryRecord, backend: Backend) -> Result<FinalState> {
    check_backend(&record.spec, backend)?;
    let mut state = FinalState::fresh(backend, record.spec.num_qubits)?;
    let mut engine = Engine::new(&record.spec, record.trajectory_index).replaying(&record.log);
    state.run_with(&mut engine)?;
    Ok(state)
}
