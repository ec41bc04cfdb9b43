//! Maximisation of the quantum Fisher information over local directions.
//!
//! For a pure state and the collective operator `O = ½ Σ_i n_i·σ_i` the
//! Fisher information is `Σ_{ij,αβ} n_i^α n_j^β C_ij^{αβ}`, so maximising it
//! is a ground-state search for classical Heisenberg-like spins `n_i` with
//! couplings `-C`. The search is Metropolis simulated annealing on the
//! angles `(θ_k, φ_k)` of each spin.

use std::f64::consts::PI;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

const SYMMETRY_TOL: f64 = 1e-10;

/// One-point expectations and connected two-point correlations of a single
/// pure state. On-site blocks use `C_ii^{αβ} = δ_{αβ} − ⟨σ^α⟩⟨σ^β⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor {
    #[serde(rename = "L")]
    num_sites: usize,
    /// `3L` values, site-major, axes `(x, y, z)`.
    one_point: Vec<f64>,
    /// `9L²` values, row-major over `(site, axis)` pairs.
    connected: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(num_sites: usize, one_point: Vec<f64>, connected: Vec<f64>) -> Result<Self> {
        let t = Self { num_sites, one_point, connected };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_sites;
        if n == 0 || self.one_point.len() != 3 * n || self.connected.len() != 9 * n * n {
            return Err(Error::Dimension(format!(
                "tensor for L={n} needs {} one-point and {} connected entries, got {} and {}",
                3 * n,
                9 * n * n,
                self.one_point.len(),
                self.connected.len()
            )));
        }
        let dim = 3 * n;
        for a in 0..dim {
            for b in 0..dim {
                let v = self.connected[a * dim + b];
                if !v.is_finite() || v.abs() > 2.0 + SYMMETRY_TOL {
                    return Err(Error::Dimension(format!("connected entry {v} outside [-2, 2]")));
                }
                if (v - self.connected[b * dim + a]).abs() > SYMMETRY_TOL {
                    return Err(Error::Dimension("connected correlations are not symmetric".into()));
                }
            }
        }
        if self.one_point.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + SYMMETRY_TOL) {
            return Err(Error::Dimension("one-point value outside [-1, 1]".into()));
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn one_point(&self) -> &[f64] {
        &self.one_point
    }

    pub fn connected(&self) -> &[f64] {
        &self.connected
    }

    /// `C_ij^{αβ}` with axes indexed `0, 1, 2 = x, y, z`.
    pub fn get(&self, i: usize, a: usize, j: usize, b: usize) -> f64 {
        self.connected[(3 * i + a) * 3 * self.num_sites + 3 * j + b]
    }

    fn block(&self, i: usize, j: usize) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.get(i, a, j, b)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }
}

/// Unit vectors `n_k = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionField {
    angles: Vec<(f64, f64)>,
}

impl DirectionField {
    /// Angles are wrapped into `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn from_angles(angles: Vec<(f64, f64)>) -> Self {
        Self { angles: angles.into_iter().map(|(t, p)| wrap(t, p)).collect() }
    }

    pub fn uniform(num_sites: usize, theta: f64, phi: f64) -> Self {
        Self::from_angles(vec![(theta, phi); num_sites])
    }

    /// Independent directions, uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(num_sites: usize, rng: &mut R) -> Self {
        let angles = (0..num_sites)
            .map(|_| {
                let cos_theta: f64 = rng.random_range(-1.0..=1.0);
                (cos_theta.acos(), rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { angles }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn vector(&self, k: usize) -> [f64; 3] {
        let (t, p) = self.angles[k];
        unit(t, p)
    }

    pub fn vectors(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|k| self.vector(k)).collect()
    }
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn wrap(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(2.0 * PI);
    let mut p = phi;
    if t > PI {
        t = 2.0 * PI - t;
        p += PI;
    }
    (t, p.rem_euclid(2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub temperature: f64,
    pub iterations: usize,
    /// Half-width of the uniform angle increments, in radians.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    rungs: Vec<Rung>,
}

pub const DEFAULT_RUNGS: usize = 12;
pub const DEFAULT_ITERATIONS_PER_RUNG: usize = 2000;
pub const DEFAULT_RESTARTS: usize = 3;

impl AnnealSchedule {
    pub fn new(rungs: Vec<Rung>) -> Result<Self> {
        if rungs.is_empty() {
            return Err(Error::Config("annealing schedule has no rungs".into()));
        }
        if rungs.windows(2).any(|w| w[1].temperature >= w[0].temperature) {
            return Err(Error::Config("temperatures must strictly decrease".into()));
        }
        if rungs.iter().any(|r| r.iterations == 0 || !(r.amplitude > 0.0) || !(r.temperature > 0.0)) {
            return Err(Error::Config("rungs need T > 0, iterations ≥ 1 and δ > 0".into()));
        }
        Ok(Self { rungs })
    }

    /// Geometric temperatures from `t_start` to `t_end` with the move
    /// amplitude interpolated linearly between `d_start` and `d_end`.
    pub fn geometric(
        count: usize,
        (t_start, t_end): (f64, f64),
        (d_start, d_end): (f64, f64),
        iterations: usize,
    ) -> Result<Self> {
        if count < 2 {
            return Err(Error::Config("geometric schedule needs at least two rungs".into()));
        }
        let ratio = (t_end / t_start).powf(1.0 / (count - 1) as f64);
        let rungs = (0..count)
            .map(|k| {
                let frac = k as f64 / (count - 1) as f64;
                Rung {
                    temperature: if k == count - 1 { t_end } else { t_start * ratio.powi(k as i32) },
                    iterations,
                    amplitude: d_start + (d_end - d_start) * frac,
                }
            })
            .collect();
        Self::new(rungs)
    }

    /// Twelve rungs from `T = 1` to `T = 0.02` with `δ` from `3π/2` to `π/4`.
    pub fn with_iterations(iterations: usize) -> Result<Self> {
        Self::geometric(DEFAULT_RUNGS, (1.0, 0.02), (1.5 * PI, 0.25 * PI), iterations)
    }

    pub fn rungs(&self) -> &[Rung] {
        &self.rungs
    }
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self::with_iterations(DEFAULT_ITERATIONS_PER_RUNG).expect("default schedule is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    /// Fisher density `F / L`.
    pub density: f64,
    pub fisher: f64,
    pub directions: DirectionField,
    /// Largest `m` with `density > m`: at least `m + 1` parties are entangled.
    pub multipartiteness: usize,
    pub restarts_used: usize,
}

/// Classical energy `-Σ n_i^α n_j^β C_ij^{αβ}`.
pub fn cost(directions: &DirectionField, tensor: &CorrelationTensor) -> Result<f64> {
    check_dims(directions, tensor)?;
    let n = directions.vectors();
    let mut total = 0.0;
    for i in 0..n.len() {
        for j in 0..n.len() {
            let c = tensor.block(i, j);
            for a in 0..3 {
                for b in 0..3 {
                    total += n[i][a] * n[j][b] * c[a][b];
                }
            }
        }
    }
    Ok(-total)
}

fn check_dims(directions: &DirectionField, tensor: &CorrelationTensor) -> Result<()> {
    if directions.len() != tensor.num_sites() {
        return Err(Error::Dimension(format!(
            "{} directions for a tensor over {} sites",
            directions.len(),
            tensor.num_sites()
        )));
    }
    Ok(())
}

/// Perturbs `(θ_k, φ_k)` of a single uniformly chosen site by independent
/// uniform increments in `[-δ, δ]`; returns the site that moved.
pub fn propose_move<R: Rng + ?Sized>(directions: &mut DirectionField, amplitude: f64, rng: &mut R) -> usize {
    let k = rng.random_range(0..directions.len());
    let (dt, dp) = if amplitude > 0.0 {
        (rng.random_range(-amplitude..=amplitude), rng.random_range(-amplitude..=amplitude))
    } else {
        (0.0, 0.0)
    };
    let (t, p) = directions.angles[k];
    directions.angles[k] = wrap(t + dt, p + dp);
    k
}

/// Metropolis walker with cached local fields `h_k = Σ_j C_kj n_j`, so that
/// a single-site move costs `O(1)` to evaluate and `O(L)` to accept.
struct Walker<'a> {
    tensor: &'a CorrelationTensor,
    directions: DirectionField,
    spins: Vec<[f64; 3]>,
    fields: Vec<[f64; 3]>,
    energy: f64,
}

impl<'a> Walker<'a> {
    fn new(tensor: &'a CorrelationTensor, directions: DirectionField) -> Self {
        let spins = directions.vectors();
        let mut w = Self { tensor, directions, spins, fields: Vec::new(), energy: 0.0 };
        w.refresh();
        w
    }

    fn refresh(&mut self) {
        let n = self.spins.len();
        let dim = 3 * n;
        let c = self.tensor.connected();
        self.fields = (0..n)
            .map(|k| {
                std::array::from_fn(|a| {
                    let row = &c[(3 * k + a) * dim..(3 * k + a + 1) * dim];
                    self.spins.iter().enumerate().map(|(j, s)| row[3 * j] * s[0] + row[3 * j + 1] * s[1] + row[3 * j + 2] * s[2]).sum()
                })
            })
            .collect();
        self.energy = -self.spins.iter().zip(&self.fields).map(|(s, h)| dot(s, h)).sum::<f64>();
    }

    fn delta(&self, k: usize, new: &[f64; 3]) -> f64 {
        let old = &self.spins[k];
        let d = [new[0] - old[0], new[1] - old[1], new[2] - old[2]];
        let c = self.tensor.block(k, k);
        let cd: [f64; 3] = std::array::from_fn(|a| c[a][0] * d[0] + c[a][1] * d[1] + c[a][2] * d[2]);
        -(2.0 * dot(&d, &self.fields[k]) + dot(&d, &cd))
    }

    fn accept(&mut self, k: usize, angles: (f64, f64), new: [f64; 3], delta: f64) {
        let old = self.spins[k];
        let d = [new[0] - old[0], new[1] - old[1], new[2] - old[2]];
        let n = self.spins.len();
        let dim = 3 * n;
        let c = self.tensor.connected();
        for (k_col, a) in (0..3).map(|a| (3 * k + a, a)) {
            if d[a] == 0.0 {
                continue;
            }
            // C is symmetric, so column 3k+a equals row 3k+a.
            let row = &c[k_col * dim..(k_col + 1) * dim];
            for (j, h) in self.fields.iter_mut().enumerate() {
                h[0] += row[3 * j] * d[a];
                h[1] += row[3 * j + 1] * d[a];
                h[2] += row[3 * j + 2] * d[a];
            }
        }
        self.spins[k] = new;
        self.directions.angles[k] = angles;
        self.energy += delta;
    }

    fn run_rung<R: Rng + ?Sized>(&mut self, temperature: f64, iterations: usize, amplitude: f64, rng: &mut R) -> (DirectionField, f64) {
        let mut best = (self.directions.clone(), self.energy);
        let n = self.spins.len();
        for _ in 0..iterations {
            let k = rng.random_range(0..n);
            let (t, p) = self.directions.angles[k];
            let dt = rng.random_range(-amplitude..=amplitude);
            let dp = rng.random_range(-amplitude..=amplitude);
            let angles = wrap(t + dt, p + dp);
            let new = unit(angles.0, angles.1);
            let delta = self.delta(k, &new);
            if delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp() {
                self.accept(k, angles, new, delta);
                if self.energy < best.1 {
                    best = (self.directions.clone(), self.energy);
                }
            }
        }
        best
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Runs `iterations` single-site Metropolis steps at `temperature` and
/// returns the lowest-energy configuration visited.
pub fn metropolis_rung<R: Rng + ?Sized>(
    directions: &DirectionField,
    tensor: &CorrelationTensor,
    temperature: f64,
    iterations: usize,
    amplitude: f64,
    rng: &mut R,
) -> Result<DirectionField> {
    check_dims(directions, tensor)?;
    if !(temperature > 0.0) {
        return Err(Error::Config("rung temperature must be positive".into()));
    }
    let mut walker = Walker::new(tensor, directions.clone());
    if amplitude <= 0.0 {
        return Ok(walker.directions);
    }
    Ok(walker.run_rung(temperature, iterations, amplitude, rng).0)
}

/// Best-of-`restarts` simulated annealing. One seed per restart is drawn
/// from `rng` up front, so the first `r` restarts are identical whatever the
/// total count.
pub fn anneal<R: RngCore + ?Sized>(
    tensor: &CorrelationTensor,
    schedule: &AnnealSchedule,
    restarts: usize,
    rng: &mut R,
) -> Result<QfiResult> {
    if restarts == 0 {
        return Err(Error::Config("annealing needs at least one restart".into()));
    }
    let n = tensor.num_sites();
    let seeds: Vec<u64> = (0..restarts).map(|_| rng.next_u64()).collect();
    let mut best: Option<(DirectionField, f64)> = None;
    for seed in seeds {
        let mut local = seeded(seed);
        let start = DirectionField::random(n, &mut local);
        let mut walker = Walker::new(tensor, start);
        for rung in schedule.rungs() {
            let (dirs, _) = walker.run_rung(rung.temperature, rung.iterations, rung.amplitude, &mut local);
            walker = Walker::new(tensor, dirs);
        }
        let energy = cost(&walker.directions, tensor)?;
        if best.as_ref().is_none_or(|b| energy < b.1) {
            best = Some((walker.directions, energy));
        }
    }
    let (directions, energy) = best.expect("at least one restart");
    let max = (n * n) as f64;
    let fisher = (-energy).clamp(0.0, max);
    let density = fisher / n as f64;
    Ok(QfiResult { density, fisher, directions, multipartiteness: multipartiteness(density, n), restarts_used: restarts })
}

/// Largest integer `m < L` with `density > m`, with a small tolerance so
/// round-off on integer densities does not certify an extra party.
pub fn multipartiteness(density: f64, num_sites: usize) -> usize {
    let m = (density - 1e-9).ceil() - 1.0;
    (m.max(0.0) as usize).min(num_sites.saturating_sub(1))
}
