//! Correlation tensors and bipartite diagnostics of simulated states.

use crate::anneal::CorrelationTensor;
use crate::cluster::ClusterLabeling;
use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString};
use crate::stabilizer::Tableau;
use crate::statevector::PureState;

/// States that can report Pauli expectation values.
pub trait PauliExpectation {
    fn num_qubits(&self) -> usize;
    fn expectation(&self, p: &PauliString) -> Result<f64>;
}

/// States that can report entanglement entropies in bits.
pub trait EntropySource {
    fn num_qubits(&self) -> usize;
    fn entropy(&self, region: &[usize]) -> Result<f64>;
}

impl PauliExpectation for PureState {
    fn num_qubits(&self) -> usize {
        PureState::num_qubits(self)
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        self.expectation_pauli(p)
    }
}

impl PauliExpectation for Tableau {
    fn num_qubits(&self) -> usize {
        Tableau::num_qubits(self)
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(f64::from(self.expectation_pauli(p)?))
    }
}

impl EntropySource for PureState {
    fn num_qubits(&self) -> usize {
        PureState::num_qubits(self)
    }

    fn entropy(&self, region: &[usize]) -> Result<f64> {
        self.reduced_entropy(region)
    }
}

impl EntropySource for Tableau {
    fn num_qubits(&self) -> usize {
        Tableau::num_qubits(self)
    }

    fn entropy(&self, region: &[usize]) -> Result<f64> {
        Tableau::entropy(self, region)
    }
}

impl EntropySource for ClusterLabeling {
    fn num_qubits(&self) -> usize {
        self.num_sites()
    }

    fn entropy(&self, region: &[usize]) -> Result<f64> {
        ClusterLabeling::entropy(self, region)
    }
}

/// Builds `C_ij^{αβ} = ⟨σ_i^α σ_j^β⟩ − ⟨σ_i^α⟩⟨σ_j^β⟩` for `i ≠ j` and the
/// symmetrised on-site blocks `δ_{αβ} − ⟨σ_i^α⟩⟨σ_i^β⟩`.
pub fn correlation_tensor<S: PauliExpectation + ?Sized>(state: &S) -> Result<CorrelationTensor> {
    let n = state.num_qubits();
    let dim = 3 * n;
    let mut one = vec![0.0; dim];
    for i in 0..n {
        for a in Axis::ALL {
            one[3 * i + a.index()] = state.expectation(&PauliString::single(i, a))?;
        }
    }
    let mut conn = vec![0.0; dim * dim];
    for i in 0..n {
        for a in 0..3 {
            for b in 0..3 {
                let delta = if a == b { 1.0 } else { 0.0 };
                conn[(3 * i + a) * dim + 3 * i + b] = delta - one[3 * i + a] * one[3 * i + b];
            }
        }
        for j in i + 1..n {
            for a in Axis::ALL {
                for b in Axis::ALL {
                    let both = state.expectation(&PauliString::pair(i, a, j, b)?)?;
                    let v = both - one[3 * i + a.index()] * one[3 * j + b.index()];
                    conn[(3 * i + a.index()) * dim + 3 * j + b.index()] = v;
                    conn[(3 * j + b.index()) * dim + 3 * i + a.index()] = v;
                }
            }
        }
    }
    CorrelationTensor::new(n, one, conn)
}

/// Three consecutive quarters `A, B, C` of a chain whose length is a
/// multiple of four; the remaining quarter is traced out. `offset` rotates
/// the blocks around the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TmiPartition {
    num_sites: usize,
    offset: usize,
}

impl TmiPartition {
    pub fn new(num_sites: usize) -> Result<Self> {
        Self::with_offset(num_sites, 0)
    }

    pub fn with_offset(num_sites: usize, offset: usize) -> Result<Self> {
        if num_sites == 0 || !num_sites.is_multiple_of(4) {
            return Err(Error::Partition(format!("L = {num_sites} is not a positive multiple of 4")));
        }
        Ok(Self { num_sites, offset: offset % num_sites })
    }

    /// Sites of quarter `q ∈ 0..4` (quarter 3 is the traced-out one).
    pub fn quarter(&self, q: usize) -> Vec<usize> {
        let len = self.num_sites / 4;
        (0..len).map(|k| (self.offset + q * len + k) % self.num_sites).collect()
    }
}

/// `I₃ = S_A + S_B + S_C − S_AB − S_AC − S_BC + S_ABC` in bits.
pub fn tmi<S: EntropySource + ?Sized>(state: &S, partition: &TmiPartition) -> Result<f64> {
    if state.num_qubits() != partition.num_sites {
        return Err(Error::Partition(format!(
            "partition over {} sites applied to {} qubits",
            partition.num_sites,
            state.num_qubits()
        )));
    }
    let [a, b, c] = [0, 1, 2].map(|q| partition.quarter(q));
    let join = |parts: &[&Vec<usize>]| parts.iter().flat_map(|p| p.iter().copied()).collect::<Vec<_>>();
    let s = |region: Vec<usize>| state.entropy(&region);
    Ok(s(a.clone())? + s(b.clone())? + s(c.clone())?
        - s(join(&[&a, &b]))?
        - s(join(&[&a, &c]))?
        - s(join(&[&b, &c]))?
        + s(join(&[&a, &b, &c]))?)
}

/// Entropy of the left half `[0, L/2)`.
pub fn half_chain_entropy<S: EntropySource + ?Sized>(state: &S) -> Result<f64> {
    let half: Vec<usize> = (0..state.num_qubits() / 2).collect();
    state.entropy(&half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::CliffordGate;

    fn ghz_tableau(n: usize) -> Tableau {
        let mut t = Tableau::new(n).unwrap();
        t.apply_clifford(0, 1, &CliffordGate::hadamard_first()).unwrap();
        for q in 0..n - 1 {
            t.apply_clifford(q, q + 1, &CliffordGate::cnot()).unwrap();
        }
        t
    }

    #[test]
    fn product_state_tensor() {
        let t = correlation_tensor(&PureState::new(2).unwrap()).unwrap();
        for i in 0..2 {
            assert_eq!(t.get(i, 0, i, 0), 1.0);
            assert_eq!(t.get(i, 1, i, 1), 1.0);
            assert!(t.get(i, 2, i, 2).abs() < 1e-15);
            for a in 0..3 {
                for b in 0..3 {
                    assert!(t.get(0, a, 1, b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn bell_tensor() {
        let t = correlation_tensor(&PureState::ghz(2).unwrap()).unwrap();
        assert!((t.get(0, 0, 1, 0) - 1.0).abs() < 1e-12);
        assert!((t.get(0, 1, 1, 1) + 1.0).abs() < 1e-12);
        assert!((t.get(0, 2, 1, 2) - 1.0).abs() < 1e-12);
        let s = correlation_tensor(&ghz_tableau(2)).unwrap();
        for (x, y) in s.connected().iter().zip(t.connected()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tmi_of_cat_and_product() {
        for n in [4, 8] {
            let p = TmiPartition::new(n).unwrap();
            assert!((tmi(&ghz_tableau(n), &p).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(tmi(&Tableau::new(n).unwrap(), &p).unwrap(), 0.0);
        }
        let p = TmiPartition::new(8).unwrap();
        assert!((tmi(&PureState::ghz(8).unwrap(), &p).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tmi_of_aligned_bell_chain() {
        // Bell pairs (1,2), (3,4), (5,6), (7,0) straddle every quarter boundary
        let n = 8;
        let mut t = Tableau::new(n).unwrap();
        for (a, b) in [(1, 2), (3, 4), (5, 6), (7, 0)] {
            t.apply_clifford(a, b, &CliffordGate::hadamard_first()).unwrap();
            t.apply_clifford(a, b, &CliffordGate::cnot()).unwrap();
        }
        let p = TmiPartition::new(n).unwrap();
        assert_eq!(t.entropy(&p.quarter(0)).unwrap(), 2.0);
        assert_eq!(tmi(&t, &p).unwrap(), 0.0);
    }

    #[test]
    fn partition_errors() {
        assert!(matches!(TmiPartition::new(6), Err(Error::Partition(_))));
        let p = TmiPartition::new(8).unwrap();
        assert!(matches!(tmi(&Tableau::new(4).unwrap(), &p), Err(Error::Partition(_))));
        let shifted = TmiPartition::with_offset(8, 6).unwrap();
        assert_eq!(shifted.quarter(0), vec![6, 7]);
        assert_eq!(shifted.quarter(1), vec![0, 1]);
    }
}
