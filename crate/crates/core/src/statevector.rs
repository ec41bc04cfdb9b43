//! Dense state-vector simulation.
//!
//! Qubit `q` is bit `q` of the basis index. Two-qubit gate matrices are
//! indexed by `2 * b_i + b_j`, so `A ⊗ B` applied on `(i, j)` acts with `A`
//! on qubit `i`.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString};

pub const DEFAULT_QUBIT_CAP: usize = 20;
/// Absolute ceiling regardless of the configured cap.
pub const MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
const DEGENERATE_PROB: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateSymmetry {
    Generic,
    /// Commutes with `Z ⊗ Z`.
    ParitySymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate {
    matrix: Matrix4<Complex64>,
    symmetry: GateSymmetry,
}

impl TwoQubitGate {
    pub fn new(matrix: Matrix4<Complex64>, symmetry: GateSymmetry) -> Result<Self> {
        let defect = (matrix.adjoint() * matrix - Matrix4::identity()).camax();
        if defect > UNITARY_TOL {
            return Err(Error::Config(format!("gate is not unitary (defect {defect:e})")));
        }
        if symmetry == GateSymmetry::ParitySymmetric {
            let off_block = [(0, 1), (0, 2), (3, 1), (3, 2), (1, 0), (2, 0), (1, 3), (2, 3)];
            if off_block.iter().any(|&(r, c)| matrix[(r, c)] != ZERO) {
                return Err(Error::Config("gate does not commute with Z⊗Z".into()));
            }
        }
        Ok(Self { matrix, symmetry })
    }

    pub fn identity() -> Self {
        Self { matrix: Matrix4::identity(), symmetry: GateSymmetry::ParitySymmetric }
    }

    pub fn swap() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m[(3, 3)] = ONE;
        Self { matrix: m, symmetry: GateSymmetry::ParitySymmetric }
    }

    /// `a ⊗ b`, `a` acting on the first qubit.
    pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Result<Self> {
        Self::new(a.kronecker(b), GateSymmetry::Generic)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn symmetry(&self) -> GateSymmetry {
        self.symmetry
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix4<Complex64>, symmetry: GateSymmetry) -> Self {
        Self { matrix, symmetry }
    }
}

pub fn hadamard() -> Matrix2<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(h.into(), h.into(), h.into(), (-h).into())
}

/// Haar-random `d × d` unitary: Ginibre matrix, QR, and the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let ginibre = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { ONE };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    q
}

pub fn sample_haar_gate<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let u = haar_unitary(4, rng);
    TwoQubitGate::from_matrix_unchecked(Matrix4::from_fn(|r, c| u[(r, c)]), GateSymmetry::Generic)
}

/// Independent Haar `U(2)` blocks on `span{|00⟩,|11⟩}` and `span{|01⟩,|10⟩}`.
pub fn sample_symmetric_gate<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let even = haar_unitary(2, rng);
    let odd = haar_unitary(2, rng);
    let mut m = Matrix4::zeros();
    for (block, idx) in [(&even, [0usize, 3]), (&odd, [1, 2])] {
        for r in 0..2 {
            for c in 0..2 {
                m[(idx[r], idx[c])] = block[(r, c)];
            }
        }
    }
    TwoQubitGate::from_matrix_unchecked(m, GateSymmetry::ParitySymmetric)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// `|0…0⟩` under the default qubit cap.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(MAX_QUBITS);
        if num_qubits == 0 || num_qubits > cap {
            return Err(Error::Capacity(format!(
                "dense backend supports 1..={cap} qubits, requested {num_qubits}"
            )));
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_QUBITS {
            return Err(Error::Dimension(format!("{len} amplitudes is not 2^L for 1 ≤ L ≤ {MAX_QUBITS}")));
        }
        let state = Self { num_qubits: len.trailing_zeros() as usize, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Dimension(format!("amplitudes have squared norm {norm}")));
        }
        Ok(state)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(num_qubits: usize) -> Result<Self> {
        let mut state = Self::new(num_qubits)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        state.amplitudes[0] = h.into();
        *state.amplitudes.last_mut().unwrap() = h.into();
        Ok(state)
    }

    /// Product state with qubit `q` in `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn product(angles: &[(f64, f64)]) -> Result<Self> {
        let mut state = Self::new(angles.len())?;
        for (b, amp) in state.amplitudes.iter_mut().enumerate() {
            *amp = angles.iter().enumerate().fold(ONE, |acc, (q, &(theta, phi))| {
                if b >> q & 1 == 1 {
                    acc * Complex64::from_polar((theta / 2.0).sin(), phi)
                } else {
                    acc * (theta / 2.0).cos()
                }
            });
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension("fidelity between registers of different size".into()));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes).norm_sqr())
    }

    fn check_site(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Index(format!("qubit {q} outside register of {}", self.num_qubits)));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, i: usize, j: usize, gate: &TwoQubitGate) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Index(format!("two-qubit gate on repeated qubit {i}")));
        }
        let (bi, bj) = (1usize << i, 1usize << j);
        let m = &gate.matrix;
        for base in 0..self.amplitudes.len() {
            if base & (bi | bj) != 0 {
                continue;
            }
            let idx = [base, base | bj, base | bi, base | bi | bj];
            let old = idx.map(|k| self.amplitudes[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = (0..4).map(|c| m[(r, c)] * old[c]).sum();
            }
        }
        Ok(())
    }

    /// Single-qubit unitary on qubit `q`.
    pub fn apply_single(&mut self, q: usize, u: &Matrix2<Complex64>) -> Result<()> {
        self.check_site(q)?;
        let bq = 1usize << q;
        for base in 0..self.amplitudes.len() {
            if base & bq != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[base], self.amplitudes[base | bq]);
            self.amplitudes[base] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            self.amplitudes[base | bq] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
        Ok(())
    }

    /// `P|ψ⟩` as a fresh amplitude vector.
    fn pauli_image(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        p.validate(self.num_qubits)?;
        let (mut flip, mut phase_mask, mut n_y) = (0usize, 0usize, 0u32);
        for &(site, axis) in p.support() {
            let (x, z) = axis.bits();
            if x {
                flip |= 1 << site;
            }
            if z {
                phase_mask |= 1 << site;
            }
            if axis == Axis::Y {
                n_y += 1;
            }
        }
        // Y|b⟩ = i(-1)^b |b̄⟩, Z|b⟩ = (-1)^b |b⟩
        let global = Complex64::i().powu(n_y % 4) * p.sign();
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (b, &amp) in self.amplitudes.iter().enumerate() {
            let odd = (b & phase_mask).count_ones() & 1 == 1;
            let coeff = if odd { -global } else { global };
            out[b ^ flip] = coeff * amp;
        }
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩`, which is real for Hermitian `P`.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        let image = self.pauli_image(p)?;
        let value = inner(&self.amplitudes, &image);
        if value.im.abs() > IMAG_TOL {
            return Err(Error::Internal(format!("pauli expectation has imaginary part {}", value.im)));
        }
        Ok(value.re)
    }

    /// Projective measurement of `P`, returning `±1` sampled by the Born rule.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        self.measure_inner(p, |p_plus| if rng.random::<f64>() < p_plus { 1 } else { -1 })
    }

    /// Projects onto the `outcome` eigenspace of `P`; fails if that outcome
    /// has (numerically) zero probability.
    pub fn postselect_pauli(&mut self, p: &PauliString, outcome: i8) -> Result<()> {
        let image = self.pauli_image(p)?;
        let p_plus = born_plus(&self.amplitudes, &image);
        let prob = if outcome > 0 { p_plus } else { 1.0 - p_plus };
        if prob < DEGENERATE_PROB {
            return Err(Error::Internal(format!("postselected outcome {outcome} has probability {prob:e}")));
        }
        self.project(&image, outcome, prob);
        Ok(())
    }

    fn measure_inner(&mut self, p: &PauliString, choose: impl FnOnce(f64) -> i8) -> Result<i8> {
        let image = self.pauli_image(p)?;
        let p_plus = born_plus(&self.amplitudes, &image);
        let outcome = if p_plus < DEGENERATE_PROB {
            -1
        } else if 1.0 - p_plus < DEGENERATE_PROB {
            1
        } else {
            choose(p_plus)
        };
        let prob = if outcome > 0 { p_plus } else { 1.0 - p_plus };
        self.project(&image, outcome, prob);
        Ok(outcome)
    }

    fn project(&mut self, image: &[Complex64], outcome: i8, prob: f64) {
        let s = f64::from(outcome);
        for (a, &pa) in self.amplitudes.iter_mut().zip(image) {
            *a = (*a + pa * s) * 0.5;
        }
        let norm = self.norm_sqr().sqrt();
        debug_assert!((norm * norm - prob).abs() < 1e-8);
        for a in &mut self.amplitudes {
            *a /= norm;
        }
    }

    /// Von Neumann entropy of the reduced state on `region`, in bits.
    pub fn reduced_entropy(&self, region: &[usize]) -> Result<f64> {
        let mut inside = vec![false; self.num_qubits];
        for &q in region {
            self.check_site(q)?;
            inside[q] = true;
        }
        let kept: Vec<usize> = (0..self.num_qubits).filter(|&q| inside[q]).collect();
        let rest: Vec<usize> = (0..self.num_qubits).filter(|&q| !inside[q]).collect();
        if kept.is_empty() || rest.is_empty() {
            return Ok(0.0);
        }
        // Work with the smaller side; both reduced spectra coincide.
        let (rows, cols) = if kept.len() <= rest.len() { (kept, rest) } else { (rest, kept) };
        let (dr, dc) = (1usize << rows.len(), 1usize << cols.len());
        let spread = |bits: usize, sites: &[usize]| {
            sites.iter().enumerate().fold(0usize, |acc, (k, &q)| acc | ((bits >> k & 1) << q))
        };
        let row_offsets: Vec<usize> = (0..dr).map(|r| spread(r, &rows)).collect();
        let col_offsets: Vec<usize> = (0..dc).map(|c| spread(c, &cols)).collect();
        let m = DMatrix::from_fn(dr, dc, |r, c| self.amplitudes[row_offsets[r] | col_offsets[c]]);
        let rho = &m * m.adjoint();
        let eig = rho.symmetric_eigenvalues();
        Ok(eig.iter().filter(|&&l| l > DEGENERATE_PROB).map(|&l| -l * l.log2()).sum())
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn born_plus(state: &[Complex64], image: &[Complex64]) -> f64 {
    ((1.0 + inner(state, image).re) / 2.0).clamp(0.0, 1.0)
}
