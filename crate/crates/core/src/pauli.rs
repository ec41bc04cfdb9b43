use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Symplectic `(x, z)` bits, with Y represented as `(1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }
}

/// A signed tensor product of single-site Pauli matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    support: Vec<(usize, Axis)>,
    negative: bool,
}

impl PauliString {
    /// Builds a Pauli string, rejecting repeated sites.
    pub fn new(mut support: Vec<(usize, Axis)>, negative: bool) -> Result<Self> {
        support.sort_by_key(|&(site, _)| site);
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Index("pauli string repeats a site".into()));
        }
        Ok(Self { support, negative })
    }

    pub fn single(site: usize, axis: Axis) -> Self {
        Self { support: vec![(site, axis)], negative: false }
    }

    pub fn pair(i: usize, a: Axis, j: usize, b: Axis) -> Result<Self> {
        Self::new(vec![(i, a), (j, b)], false)
    }

    pub fn z(site: usize) -> Self {
        Self::single(site, Axis::Z)
    }

    pub fn xx(i: usize, j: usize) -> Result<Self> {
        Self::pair(i, Axis::X, j, Axis::X)
    }

    /// Global parity `Z ⊗ Z ⊗ … ⊗ Z` on `num_qubits` sites.
    pub fn parity(num_qubits: usize) -> Self {
        Self { support: (0..num_qubits).map(|q| (q, Axis::Z)).collect(), negative: false }
    }

    pub fn support(&self) -> &[(usize, Axis)] {
        &self.support
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative { -1.0 } else { 1.0 }
    }

    pub fn negated(&self) -> Self {
        Self { support: self.support.clone(), negative: !self.negative }
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        match self.support.iter().find(|&&(site, _)| site >= num_qubits) {
            Some(&(site, _)) => Err(Error::Index(format!(
                "pauli site {site} outside register of {num_qubits} qubits"
            ))),
            None => Ok(()),
        }
    }
}
