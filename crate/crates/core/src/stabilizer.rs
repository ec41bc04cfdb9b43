//! Stabilizer tableau simulation.
//!
//! The tableau keeps `L` destabilizer rows alongside the `L` stabilizer
//! generators (Aaronson–Gottesman layout), which makes both measurement
//! outcomes and Pauli expectation values `O(L)` row operations. Pauli rows
//! use the Hermitian convention: bits `(x, z)` denote `i^{xz} X^x Z^z` on
//! each site, so `(1, 1)` is `Y`, with an explicit sign bit.

use rand::Rng;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString};
use crate::statevector::{GateSymmetry, TwoQubitGate};

/// A signed Pauli on two qubits. Bits: `x0 | z0 << 1 | x1 << 2 | z1 << 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalPauli {
    pub bits: u8,
    pub negative: bool,
}

impl LocalPauli {
    pub const fn new(bits: u8, negative: bool) -> Self {
        Self { bits: bits & 0xF, negative }
    }

    pub const fn positive(bits: u8) -> Self {
        Self::new(bits, false)
    }

    fn x_part(bits: u8) -> u8 {
        bits & 0b0101
    }

    fn z_part(bits: u8) -> u8 {
        (bits >> 1) & 0b0101
    }
}

pub const X0: u8 = 0b0001;
pub const Z0: u8 = 0b0010;
pub const X1: u8 = 0b0100;
pub const Z1: u8 = 0b1000;
pub const ZZ: u8 = Z0 | Z1;

/// Symplectic inner product of two local Pauli patterns.
pub fn symplectic(a: u8, b: u8) -> bool {
    let (ax, az) = (LocalPauli::x_part(a), LocalPauli::z_part(a));
    let (bx, bz) = (LocalPauli::x_part(b), LocalPauli::z_part(b));
    ((ax & bz) ^ (az & bx)).count_ones() & 1 == 1
}

/// Power of `i` in `P1 · P2 = i^k P3` summed over word-packed sites.
#[inline]
fn phase_exponent(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
    let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
    let plus = (px & qy) | (py & qz) | (pz & qx);
    let minus = (px & qz) | (py & qx) | (pz & qy);
    plus.count_ones() as i32 - minus.count_ones() as i32
}

/// Product of two-qubit Paulis in Hermitian form, tracking the power of `i`.
fn local_mul(a: u8, b: u8) -> (u8, i32) {
    let (ax, az) = (u64::from(LocalPauli::x_part(a)), u64::from(LocalPauli::z_part(a)));
    let (bx, bz) = (u64::from(LocalPauli::x_part(b)), u64::from(LocalPauli::z_part(b)));
    (a ^ b, phase_exponent(ax, az, bx, bz))
}

/// A two-qubit Clifford gate given by its conjugation action on
/// `X0, Z0, X1, Z1`. Qubit 0 of the gate is the first site it is applied to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordGate {
    images: [LocalPauli; 4],
    symmetry: GateSymmetry,
    table: [LocalPauli; 16],
}

impl CliffordGate {
    pub fn from_images(images: [LocalPauli; 4], symmetry: GateSymmetry) -> Result<Self> {
        let expected = |a: usize, b: usize| (a / 2 == b / 2) && a != b;
        for a in 0..4 {
            if images[a].bits == 0 {
                return Err(Error::Config("clifford image is the identity".into()));
            }
            for b in 0..4 {
                if symplectic(images[a].bits, images[b].bits) != expected(a, b) {
                    return Err(Error::Config("clifford images violate commutation relations".into()));
                }
            }
        }
        let gate = Self::build(images, symmetry);
        if symmetry == GateSymmetry::ParitySymmetric && gate.image(ZZ) != LocalPauli::positive(ZZ) {
            return Err(Error::Config("gate marked parity-symmetric does not fix Z⊗Z".into()));
        }
        Ok(gate)
    }

    fn build(images: [LocalPauli; 4], symmetry: GateSymmetry) -> Self {
        let mut table = [LocalPauli::positive(0); 16];
        for (p, slot) in table.iter_mut().enumerate() {
            let p = p as u8;
            let mut exp = ((p & X0 != 0) && (p & Z0 != 0)) as i32 + ((p & X1 != 0) && (p & Z1 != 0)) as i32;
            let mut acc = 0u8;
            for (k, img) in images.iter().enumerate() {
                if p >> k & 1 == 1 {
                    let (bits, e) = local_mul(acc, img.bits);
                    acc = bits;
                    exp += e + if img.negative { 2 } else { 0 };
                }
            }
            let exp = exp.rem_euclid(4);
            debug_assert!(exp % 2 == 0, "image of a Hermitian Pauli must be Hermitian");
            *slot = LocalPauli::new(acc, exp == 2);
        }
        Self { images, symmetry, table }
    }

    pub fn identity() -> Self {
        Self::build([X0, Z0, X1, Z1].map(LocalPauli::positive), GateSymmetry::ParitySymmetric)
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self::build([X0 | X1, Z0, X1, Z0 | Z1].map(LocalPauli::positive), GateSymmetry::Generic)
    }

    pub fn cz() -> Self {
        Self::build([X0 | Z1, Z0, Z0 | X1, Z1].map(LocalPauli::positive), GateSymmetry::ParitySymmetric)
    }

    /// `H ⊗ I`.
    pub fn hadamard_first() -> Self {
        Self::build([Z0, X0, X1, Z1].map(LocalPauli::positive), GateSymmetry::Generic)
    }

    pub fn swap() -> Self {
        Self::build([X1, Z1, X0, Z0].map(LocalPauli::positive), GateSymmetry::ParitySymmetric)
    }

    pub fn images(&self) -> &[LocalPauli; 4] {
        &self.images
    }

    pub fn symmetry(&self) -> GateSymmetry {
        self.symmetry
    }

    /// Conjugated image `U P U†` of the Hermitian Pauli with pattern `bits`.
    pub fn image(&self, bits: u8) -> LocalPauli {
        self.table[usize::from(bits & 0xF)]
    }

    /// A unitary realising this Clifford (defined up to global phase).
    pub fn to_unitary(&self) -> TwoQubitGate {
        let mat = |p: LocalPauli| {
            let m = local_matrix(p.bits);
            if p.negative { -m } else { m }
        };
        let (a, b) = (mat(self.images[1]), mat(self.images[3]));
        let proj = (Matrix4::identity() + a) * (Matrix4::identity() + b);
        let mut v = (0..4)
            .map(|k| proj.column(k).into_owned())
            .find(|col| col.norm() > 0.5)
            .expect("stabilizer projector has rank one");
        v /= Complex64::from(v.norm());
        let (x0, x1) = (mat(self.images[0]), mat(self.images[2]));
        let cols = [v, x1 * v, x0 * v, x0 * x1 * v];
        let u = Matrix4::from_columns(&cols);
        TwoQubitGate::from_matrix_unchecked(u, self.symmetry)
    }
}

fn pauli_matrix(x: bool, z: bool) -> nalgebra::Matrix2<Complex64> {
    let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    match (x, z) {
        (false, false) => nalgebra::Matrix2::new(l, o, o, l),
        (true, false) => nalgebra::Matrix2::new(o, l, l, o),
        (true, true) => nalgebra::Matrix2::new(o, -i, i, o),
        (false, true) => nalgebra::Matrix2::new(l, o, o, -l),
    }
}

/// 4×4 matrix of a Hermitian two-qubit Pauli in gate index order.
pub fn local_matrix(bits: u8) -> Matrix4<Complex64> {
    let first = pauli_matrix(bits & X0 != 0, bits & Z0 != 0);
    let second = pauli_matrix(bits & X1 != 0, bits & Z1 != 0);
    first.kronecker(&second)
}

/// Uniform element of the two-qubit Clifford group modulo phase
/// (11520 elements): a uniformly random symplectic basis built image by
/// image, with independent random signs.
pub fn sample_clifford_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> CliffordGate {
    let pick = |rng: &mut R, pred: &dyn Fn(u8) -> bool| {
        let cands: Vec<u8> = (1u8..16).filter(|&v| pred(v)).collect();
        cands[rng.random_range(0..cands.len())]
    };
    let x0 = pick(rng, &|_| true);
    let z0 = pick(rng, &|v| symplectic(x0, v));
    let x1 = pick(rng, &|v| !symplectic(x0, v) && !symplectic(z0, v));
    let z1 = pick(rng, &|v| !symplectic(x0, v) && !symplectic(z0, v) && symplectic(x1, v));
    let signs: u8 = rng.random_range(0..16);
    let images = [x0, z0, x1, z1];
    let images = std::array::from_fn(|k| LocalPauli::new(images[k], signs >> k & 1 == 1));
    let mut gate = CliffordGate::build(images, GateSymmetry::Generic);
    if gate.image(ZZ) == LocalPauli::positive(ZZ) {
        gate.symmetry = GateSymmetry::ParitySymmetric;
    }
    gate
}

/// Uniform element of the subgroup fixing `Z ⊗ Z`, by rejection.
pub fn sample_symmetric_clifford<R: Rng + ?Sized>(rng: &mut R) -> CliffordGate {
    loop {
        let gate = sample_clifford_two_qubit(rng);
        if gate.symmetry == GateSymmetry::ParitySymmetric {
            return gate;
        }
    }
}

/// Word-packed symplectic form of a Pauli string.
#[derive(Debug, Clone)]
struct PackedPauli {
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PackedPauli {
    fn from_string(p: &PauliString, words: usize) -> Self {
        let mut x = vec![0u64; words];
        let mut z = vec![0u64; words];
        for &(site, axis) in p.support() {
            let (bx, bz) = axis.bits();
            if bx {
                x[site / 64] |= 1 << (site % 64);
            }
            if bz {
                z[site / 64] |= 1 << (site % 64);
            }
        }
        Self { x, z, negative: p.is_negative() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    num_qubits: usize,
    words: usize,
    /// Rows `0..L` are destabilizers, rows `L..2L` stabilizers.
    x: Vec<u64>,
    z: Vec<u64>,
    negative: Vec<bool>,
}

enum Outcome {
    Deterministic(i8),
    Random,
}

impl Tableau {
    /// `|0…0⟩`: stabilizers `Z_i`, destabilizers `X_i`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Capacity("tableau needs at least one qubit".into()));
        }
        let words = num_qubits.div_ceil(64);
        let mut t = Self {
            num_qubits,
            words,
            x: vec![0; 2 * num_qubits * words],
            z: vec![0; 2 * num_qubits * words],
            negative: vec![false; 2 * num_qubits],
        };
        for q in 0..num_qubits {
            t.x[q * words + q / 64] |= 1 << (q % 64);
            t.z[(num_qubits + q) * words + q / 64] |= 1 << (q % 64);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn row(&self, r: usize) -> (&[u64], &[u64]) {
        let w = self.words;
        (&self.x[r * w..(r + 1) * w], &self.z[r * w..(r + 1) * w])
    }

    fn row_to_string(&self, r: usize) -> PauliString {
        let (x, z) = self.row(r);
        let support = (0..self.num_qubits)
            .filter_map(|q| {
                let bx = x[q / 64] >> (q % 64) & 1 == 1;
                let bz = z[q / 64] >> (q % 64) & 1 == 1;
                match (bx, bz) {
                    (false, false) => None,
                    (true, false) => Some((q, Axis::X)),
                    (true, true) => Some((q, Axis::Y)),
                    (false, true) => Some((q, Axis::Z)),
                }
            })
            .collect();
        PauliString::new(support, self.negative[r]).expect("rows have distinct sites")
    }

    /// Current stabilizer generators with signs.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.num_qubits..2 * self.num_qubits).map(|r| self.row_to_string(r)).collect()
    }

    fn check_site(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Index(format!("qubit {q} outside register of {}", self.num_qubits)));
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, i: usize, j: usize, gate: &CliffordGate) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Index(format!("two-qubit gate on repeated qubit {i}")));
        }
        let (wi, si, wj, sj) = (i / 64, i % 64, j / 64, j % 64);
        for r in 0..2 * self.num_qubits {
            let base = r * self.words;
            let (xi, zi) = (self.x[base + wi] >> si & 1, self.z[base + wi] >> si & 1);
            let (xj, zj) = (self.x[base + wj] >> sj & 1, self.z[base + wj] >> sj & 1);
            let pattern = (xi | zi << 1 | xj << 2 | zj << 3) as u8;
            let img = gate.table[usize::from(pattern)];
            let b = u64::from(img.bits);
            self.x[base + wi] = (self.x[base + wi] & !(1 << si)) | ((b & 1) << si);
            self.z[base + wi] = (self.z[base + wi] & !(1 << si)) | ((b >> 1 & 1) << si);
            self.x[base + wj] = (self.x[base + wj] & !(1 << sj)) | ((b >> 2 & 1) << sj);
            self.z[base + wj] = (self.z[base + wj] & !(1 << sj)) | ((b >> 3 & 1) << sj);
            self.negative[r] ^= img.negative;
        }
        Ok(())
    }

    fn anticommutes(&self, r: usize, p: &PackedPauli) -> bool {
        let (x, z) = self.row(r);
        let mut acc = 0u64;
        for w in 0..self.words {
            acc ^= (x[w] & p.z[w]) ^ (z[w] & p.x[w]);
        }
        acc.count_ones() & 1 == 1
    }

    /// Row `target ← source · target`. Signs are tracked only for
    /// stabilizer targets; destabilizer signs carry no information.
    fn row_mul(&mut self, target: usize, source: usize) {
        let w = self.words;
        let (t, s) = (target * w, source * w);
        if target >= self.num_qubits {
            let mut exp = 0i32;
            for k in 0..w {
                exp += phase_exponent(self.x[s + k], self.z[s + k], self.x[t + k], self.z[t + k]);
            }
            exp += 2 * (self.negative[source] as i32 + self.negative[target] as i32);
            let exp = exp.rem_euclid(4);
            debug_assert!(exp % 2 == 0, "stabilizer product must stay Hermitian");
            self.negative[target] = exp == 2;
        }
        for k in 0..w {
            self.x[t + k] ^= self.x[s + k];
            self.z[t + k] ^= self.z[s + k];
        }
    }

    fn deterministic_sign(&self, p: &PackedPauli) -> Result<i8> {
        let n = self.num_qubits;
        let mut sx = vec![0u64; self.words];
        let mut sz = vec![0u64; self.words];
        let mut exp = 0i32;
        for k in 0..n {
            if self.anticommutes(k, p) {
                let (x, z) = self.row(n + k);
                for w in 0..self.words {
                    exp += phase_exponent(sx[w], sz[w], x[w], z[w]);
                    sx[w] ^= x[w];
                    sz[w] ^= z[w];
                }
                exp += 2 * self.negative[n + k] as i32;
            }
        }
        if sx != p.x || sz != p.z {
            return Err(Error::Internal("commuting pauli is not in the stabilizer group".into()));
        }
        let value = if exp.rem_euclid(4) == 2 { -1 } else { 1 };
        Ok(if p.negative { -value } else { value })
    }

    fn classify(&self, p: &PackedPauli) -> Result<(Outcome, Option<usize>)> {
        let n = self.num_qubits;
        match (n..2 * n).find(|&r| self.anticommutes(r, p)) {
            Some(pivot) => Ok((Outcome::Random, Some(pivot))),
            None => Ok((Outcome::Deterministic(self.deterministic_sign(p)?), None)),
        }
    }

    fn collapse(&mut self, p: &PackedPauli, pivot: usize, outcome: i8) {
        let n = self.num_qubits;
        for r in 0..2 * n {
            if r != pivot && self.anticommutes(r, p) {
                self.row_mul(r, pivot);
            }
        }
        let w = self.words;
        let (d, s) = ((pivot - n) * w, pivot * w);
        self.x.copy_within(s..s + w, d);
        self.z.copy_within(s..s + w, d);
        self.negative[pivot - n] = self.negative[pivot];
        self.x[s..s + w].copy_from_slice(&p.x);
        self.z[s..s + w].copy_from_slice(&p.z);
        self.negative[pivot] = (outcome < 0) != p.negative;
    }

    fn packed(&self, p: &PauliString) -> Result<PackedPauli> {
        p.validate(self.num_qubits)?;
        Ok(PackedPauli::from_string(p, self.words))
    }

    /// Projective measurement of `P`; random outcomes are uniform `±1`.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        let packed = self.packed(p)?;
        match self.classify(&packed)? {
            (Outcome::Deterministic(v), _) => Ok(v),
            (Outcome::Random, Some(pivot)) => {
                let outcome = if rng.random::<bool>() { 1 } else { -1 };
                self.collapse(&packed, pivot, outcome);
                Ok(outcome)
            }
            (Outcome::Random, None) => unreachable!(),
        }
    }

    /// Forces the measurement of `P` to yield `outcome`.
    pub fn postselect_pauli(&mut self, p: &PauliString, outcome: i8) -> Result<()> {
        let packed = self.packed(p)?;
        match self.classify(&packed)? {
            (Outcome::Deterministic(v), _) if v == outcome => Ok(()),
            (Outcome::Deterministic(v), _) => Err(Error::Internal(format!(
                "postselected outcome {outcome} but measurement is deterministic {v}"
            ))),
            (Outcome::Random, Some(pivot)) => {
                self.collapse(&packed, pivot, outcome);
                Ok(())
            }
            (Outcome::Random, None) => unreachable!(),
        }
    }

    /// `⟨P⟩ ∈ {-1, 0, +1}`.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<i8> {
        let packed = self.packed(p)?;
        match self.classify(&packed)? {
            (Outcome::Deterministic(v), _) => Ok(v),
            _ => Ok(0),
        }
    }

    /// Entanglement entropy of `region` in bits: GF(2) rank of the
    /// stabilizers restricted to the region minus its size.
    pub fn entropy(&self, region: &[usize]) -> Result<f64> {
        let mut inside = vec![false; self.num_qubits];
        for &q in region {
            self.check_site(q)?;
            inside[q] = true;
        }
        let count = inside.iter().filter(|&&b| b).count();
        let sites: Vec<usize> = if 2 * count <= self.num_qubits {
            (0..self.num_qubits).filter(|&q| inside[q]).collect()
        } else {
            (0..self.num_qubits).filter(|&q| !inside[q]).collect()
        };
        if sites.is_empty() {
            return Ok(0.0);
        }
        let width = (2 * sites.len()).div_ceil(64);
        let n = self.num_qubits;
        let mut rows: Vec<Vec<u64>> = (n..2 * n)
            .map(|r| {
                let (x, z) = self.row(r);
                let mut packed = vec![0u64; width];
                for (k, &q) in sites.iter().enumerate() {
                    let bx = x[q / 64] >> (q % 64) & 1;
                    let bz = z[q / 64] >> (q % 64) & 1;
                    packed[(2 * k) / 64] |= bx << ((2 * k) % 64);
                    packed[(2 * k + 1) / 64] |= bz << ((2 * k + 1) % 64);
                }
                packed
            })
            .collect();
        let rank = gf2_rank(&mut rows, 2 * sites.len());
        Ok((rank - sites.len()) as f64)
    }

    /// Checks pairwise commutation and full rank of the stabilizer rows,
    /// and the symplectic pairing with the destabilizers.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.num_qubits;
        for a in 0..2 * n {
            let (x, z) = self.row(a);
            let pa = PackedPauli { x: x.to_vec(), z: z.to_vec(), negative: false };
            for b in 0..2 * n {
                let want = a != b && (a % n == b % n);
                if self.anticommutes(b, &pa) != want {
                    return Err(Error::Internal(format!("rows {a} and {b} break the symplectic pairing")));
                }
            }
        }
        let mut rows: Vec<Vec<u64>> = (n..2 * n)
            .map(|r| {
                let (x, z) = self.row(r);
                x.iter().chain(z).copied().collect()
            })
            .collect();
        if gf2_rank(&mut rows, 2 * self.words * 64) != n {
            return Err(Error::Internal("stabilizer rows are not independent".into()));
        }
        Ok(())
    }
}

/// Rank over GF(2) of packed rows with `bits` meaningful columns; the rows
/// are overwritten during elimination.
pub fn gf2_rank(rows: &mut [Vec<u64>], bits: usize) -> usize {
    let mut rank = 0;
    for col in 0..bits {
        let (w, b) = (col / 64, col % 64);
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] >> b & 1 == 1 {
                for (a, &q) in row.iter_mut().zip(&pivot).skip(w) {
                    *a ^= q;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Every element of the two-qubit Clifford group modulo phase, enumerated
/// from all `2^16` candidate symplectic matrices and 16 sign patterns.
pub fn enumerate_clifford_group() -> &'static [CliffordGate] {
    static GROUP: OnceLock<Vec<CliffordGate>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut out = Vec::with_capacity(11520);
        for m in 0u32..1 << 16 {
            let images = [0, 1, 2, 3].map(|k| (m >> (4 * k) & 0xF) as u8);
            for signs in 0u8..16 {
                let imgs = std::array::from_fn(|k| LocalPauli::new(images[k], signs >> k & 1 == 1));
                if let Ok(g) = CliffordGate::from_images(imgs, GateSymmetry::Generic) {
                    out.push(g);
                }
            }
        }
        out
    })
}
