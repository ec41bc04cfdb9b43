//! Measurement-only dynamics of the projective Ising model as integer
//! cluster labels.
//!
//! Every nonzero label marks a GHZ cluster of at least two sites; label `0`
//! marks a site in a product state. `XX` bond measurements create, grow or
//! merge clusters and `Z` measurements remove sites. Clusters are stored as
//! member lists behind an indirection so that a merge relabels only the
//! smaller cluster while the visible label follows the minimum of the two.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const FREE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Cluster {
    label: u32,
    members: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct ClusterLabeling {
    /// Cluster slot per site, `FREE` for unentangled sites.
    slot: Vec<u32>,
    /// Index of each site inside its cluster's member list.
    position: Vec<u32>,
    clusters: Vec<Cluster>,
    free_slots: Vec<u32>,
    released_labels: BinaryHeap<Reverse<u32>>,
    next_fresh: u32,
}

impl PartialEq for ClusterLabeling {
    fn eq(&self, other: &Self) -> bool {
        self.labels() == other.labels()
    }
}

impl ClusterLabeling {
    /// All sites unentangled.
    pub fn new(num_sites: usize) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::Capacity("labeling needs at least one site".into()));
        }
        Ok(Self {
            slot: vec![FREE; num_sites],
            position: vec![0; num_sites],
            clusters: Vec::new(),
            free_slots: Vec::new(),
            released_labels: BinaryHeap::new(),
            next_fresh: 1,
        })
    }

    /// Rebuilds a labeling from an explicit label vector.
    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        let mut out = Self::new(labels.len())?;
        let mut by_label: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for (site, &l) in labels.iter().enumerate() {
            if l != 0 {
                by_label.entry(l).or_default().push(site as u32);
            }
        }
        for (&label, members) in &by_label {
            if members.len() < 2 {
                return Err(Error::Config(format!("label {label} occurs at a single site")));
            }
            out.insert_cluster(label, members);
        }
        let max = by_label.keys().next_back().copied().unwrap_or(0);
        out.next_fresh = max + 1;
        for l in 1..max {
            if !by_label.contains_key(&l) {
                out.released_labels.push(Reverse(l));
            }
        }
        Ok(out)
    }

    fn insert_cluster(&mut self, label: u32, members: &[u32]) -> u32 {
        let slot = match self.free_slots.pop() {
            Some(s) => s,
            None => {
                self.clusters.push(Cluster { label: 0, members: Vec::new() });
                (self.clusters.len() - 1) as u32
            }
        };
        for (k, &site) in members.iter().enumerate() {
            self.slot[site as usize] = slot;
            self.position[site as usize] = k as u32;
        }
        let cluster = &mut self.clusters[slot as usize];
        cluster.label = label;
        cluster.members.clear();
        cluster.members.extend_from_slice(members);
        slot
    }

    fn take_label(&mut self) -> u32 {
        match self.released_labels.pop() {
            Some(Reverse(l)) => l,
            None => {
                self.next_fresh += 1;
                self.next_fresh - 1
            }
        }
    }

    fn retire(&mut self, slot: u32) {
        let cluster = &mut self.clusters[slot as usize];
        self.released_labels.push(Reverse(cluster.label));
        cluster.members.clear();
        cluster.label = 0;
        self.free_slots.push(slot);
    }

    pub fn num_sites(&self) -> usize {
        self.slot.len()
    }

    /// Label of one site, `0` when unentangled.
    pub fn label(&self, site: usize) -> u32 {
        match self.slot[site] {
            FREE => 0,
            s => self.clusters[s as usize].label,
        }
    }

    /// The label vector `s`.
    pub fn labels(&self) -> Vec<u32> {
        (0..self.num_sites()).map(|q| self.label(q)).collect()
    }

    fn check_site(&self, q: usize) -> Result<()> {
        if q >= self.num_sites() {
            return Err(Error::Index(format!("site {q} outside chain of {}", self.num_sites())));
        }
        Ok(())
    }

    /// `XX` measurement on the open-chain bond `(k, k+1)`.
    pub fn apply_xx(&mut self, k: usize) -> Result<()> {
        if k + 1 >= self.num_sites() {
            return Err(Error::Index(format!("bond {k} outside open chain of {}", self.num_sites())));
        }
        self.apply_xx_pair(k, k + 1)
    }

    /// `XX` measurement on an arbitrary pair of distinct sites.
    pub fn apply_xx_pair(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_site(a)?;
        self.check_site(b)?;
        if a == b {
            return Err(Error::Index(format!("xx measurement on repeated site {a}")));
        }
        match (self.slot[a], self.slot[b]) {
            (FREE, FREE) => {
                let label = self.take_label();
                self.insert_cluster(label, &[a as u32, b as u32]);
            }
            (s, FREE) => self.absorb(s, b),
            (FREE, s) => self.absorb(s, a),
            (sa, sb) if sa == sb => {}
            (sa, sb) => self.merge(sa, sb),
        }
        Ok(())
    }

    fn absorb(&mut self, slot: u32, site: usize) {
        let members = &mut self.clusters[slot as usize].members;
        self.position[site] = members.len() as u32;
        members.push(site as u32);
        self.slot[site] = slot;
    }

    fn merge(&mut self, sa: u32, sb: u32) {
        let (la, lb) = (self.clusters[sa as usize].label, self.clusters[sb as usize].label);
        let (big, small) = if self.clusters[sa as usize].members.len() >= self.clusters[sb as usize].members.len() {
            (sa, sb)
        } else {
            (sb, sa)
        };
        let mut moved = std::mem::take(&mut self.clusters[small as usize].members);
        for &site in &moved {
            self.absorb(big, site as usize);
        }
        moved.clear();
        self.clusters[small as usize].members = moved;
        self.clusters[small as usize].label = la.max(lb);
        self.clusters[big as usize].label = la.min(lb);
        self.retire(small);
    }

    /// `Z` measurement on site `k`. A cluster left with a single member
    /// releases it as well, since that site is then in a product state.
    pub fn apply_z(&mut self, k: usize) -> Result<()> {
        self.check_site(k)?;
        let slot = self.slot[k];
        if slot == FREE {
            return Ok(());
        }
        self.detach(k);
        if self.clusters[slot as usize].members.len() == 1 {
            let orphan = self.clusters[slot as usize].members[0] as usize;
            self.detach(orphan);
            self.retire(slot);
        }
        Ok(())
    }

    fn detach(&mut self, site: usize) {
        let slot = self.slot[site] as usize;
        let pos = self.position[site] as usize;
        let members = &mut self.clusters[slot].members;
        members.swap_remove(pos);
        if let Some(&moved) = members.get(pos) {
            self.position[moved as usize] = pos as u32;
        }
        self.slot[site] = FREE;
    }

    /// Sizes of all clusters (each at least two).
    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.clusters.iter().filter(|c| !c.members.is_empty()).map(|c| c.members.len()).collect()
    }

    pub fn unentangled_count(&self) -> usize {
        self.slot.iter().filter(|&&s| s == FREE).count()
    }

    /// Quantum Fisher information of the cluster state: unentangled sites
    /// count once, each GHZ cluster of size `l` contributes `l²`.
    pub fn cluster_qfi(&self) -> f64 {
        let squares: usize = self.cluster_sizes().iter().map(|l| l * l).sum();
        (self.unentangled_count() + squares) as f64
    }

    /// Entanglement entropy of `region` in bits: each cluster with members
    /// on both sides of the cut contributes one bit.
    pub fn entropy(&self, region: &[usize]) -> Result<f64> {
        let mut inside = vec![false; self.num_sites()];
        for &q in region {
            self.check_site(q)?;
            inside[q] = true;
        }
        let split = self
            .clusters
            .iter()
            .filter(|c| !c.members.is_empty())
            .filter(|c| {
                let first = inside[c.members[0] as usize];
                c.members.iter().any(|&m| inside[m as usize] != first)
            })
            .count();
        Ok(split as f64)
    }

    /// Checks that every nonzero label occurs at two or more sites.
    pub fn check_invariants(&self) -> Result<()> {
        let mut counts = std::collections::HashMap::new();
        for l in self.labels() {
            if l != 0 {
                *counts.entry(l).or_insert(0usize) += 1;
            }
        }
        match counts.iter().find(|&(_, &c)| c < 2) {
            Some((l, _)) => Err(Error::Internal(format!("label {l} occurs once"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: &[u32]) -> ClusterLabeling {
        ClusterLabeling::from_labels(v).unwrap()
    }

    #[test]
    fn starts_separable() {
        assert_eq!(ClusterLabeling::new(4).unwrap().labels(), vec![0, 0, 0, 0]);
        assert_eq!(ClusterLabeling::new(1).unwrap().labels(), vec![0]);
        ClusterLabeling::new(4).unwrap().check_invariants().unwrap();
    }

    #[test]
    fn xx_cases() {
        let mut s = ClusterLabeling::new(4).unwrap();
        s.apply_xx(0).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 0, 0]);
        s.apply_xx(1).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 1, 0]);
        let mut s = lab(&[0, 0, 1, 1]);
        s.apply_xx(1).unwrap();
        assert_eq!(s.labels(), vec![0, 1, 1, 1]);
        let mut s = lab(&[1, 1, 2, 2]);
        s.apply_xx(1).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 1, 1]);
        let mut s = lab(&[2, 2, 2, 1, 1]);
        s.apply_xx(2).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 1, 1, 1]);
        assert!(matches!(s.apply_xx(4), Err(Error::Index(_))));
    }

    #[test]
    fn next_label_reuses_smallest() {
        let mut s = lab(&[1, 1, 2, 2, 3, 3, 0, 0]);
        s.apply_z(2).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 0, 0, 3, 3, 0, 0]);
        s.apply_xx(6).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 0, 0, 3, 3, 2, 2]);
        s.apply_xx(2).unwrap();
        assert_eq!(s.labels(), vec![1, 1, 4, 4, 3, 3, 2, 2]);
    }

    #[test]
    fn z_cases() {
        let mut s = lab(&[1, 1, 1, 0]);
        s.apply_z(1).unwrap();
        assert_eq!(s.labels(), vec![1, 0, 1, 0]);
        let mut s = lab(&[1, 1, 0, 0]);
        s.apply_z(0).unwrap();
        assert_eq!(s.labels(), vec![0, 0, 0, 0]);
        let mut s = lab(&[0, 0]);
        s.apply_z(0).unwrap();
        assert_eq!(s.labels(), vec![0, 0]);
        assert!(matches!(s.apply_z(2), Err(Error::Index(_))));
    }

    #[test]
    fn qfi_values() {
        assert_eq!(lab(&[0, 0, 0]).cluster_qfi(), 3.0);
        assert_eq!(lab(&[1, 1, 0, 2, 2, 2]).cluster_qfi(), 14.0);
        assert_eq!(lab(&[5; 8]).cluster_qfi(), 64.0);
    }

    #[test]
    fn entropy_counts_cut_clusters() {
        let s = lab(&[1, 1, 0, 2, 2, 2]);
        assert_eq!(s.entropy(&[0]).unwrap(), 1.0);
        assert_eq!(s.entropy(&[0, 1]).unwrap(), 0.0);
        assert_eq!(s.entropy(&[1, 3]).unwrap(), 2.0);
        assert_eq!(s.entropy(&[2]).unwrap(), 0.0);
    }

    #[test]
    fn from_labels_rejects_singletons() {
        assert!(ClusterLabeling::from_labels(&[1, 0, 2, 2]).is_err());
    }
}
