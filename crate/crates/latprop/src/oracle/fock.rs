//! Exact evolution of H = Σ h_ij a†_i a_j in a fixed-N occupation basis.

use super::TruncatedLattice;
use crate::manybody::{OccupationState, Statistics};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockLimits {
    pub max_bosons: u32,
    pub max_fermions: u32,
    pub max_sites: usize,
}

impl Default for FockLimits {
    fn default() -> Self {
        Self { max_bosons: 4, max_fermions: 3, max_sites: 8 }
    }
}

/// Factorized N-particle Hamiltonian on a small truncation. Basis states are
/// occupation vectors over the truncation's site enumeration, listed in
/// lexicographic order; fermionic states are built as ordered products of
/// creation operators along `order`.
#[derive(Debug, Clone)]
pub struct FockOracle {
    stats: Statistics,
    particles: u32,
    site_index: HashMap<crate::lattice::SiteIndex, usize>,
    basis: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn enumerate(sites: usize, particles: u32, cap: u32) -> Vec<Vec<u8>> {
    fn rec(pos: usize, left: u32, cap: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left.min(cap) {
            cur[pos] = k as u8;
            rec(pos + 1, left - k, cap, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(0, particles, cap, &mut vec![0; sites], &mut out);
    out
}

impl FockOracle {
    pub fn new(trunc: &TruncatedLattice, stats: Statistics, particles: u32, limits: FockLimits) -> Result<Self> {
        let order: Vec<usize> = (0..trunc.len()).collect();
        Self::with_order(trunc, stats, particles, limits, &order)
    }

    /// `order[r]` is the site occupying position r of the Jordan–Wigner string.
    pub fn with_order(
        trunc: &TruncatedLattice,
        stats: Statistics,
        particles: u32,
        limits: FockLimits,
        order: &[usize],
    ) -> Result<Self> {
        let m = trunc.len();
        let ceiling = match stats {
            Statistics::Boson => limits.max_bosons,
            Statistics::Fermion => limits.max_fermions,
        };
        if m > limits.max_sites || particles > ceiling {
            return Err(Error::Resource(format!(
                "{particles} particles on {m} sites exceed the Fock ceiling ({ceiling} on {})",
                limits.max_sites
            )));
        }
        let cap = if stats == Statistics::Fermion { 1 } else { particles };
        let basis = enumerate(m, particles, cap);
        let lookup: HashMap<Vec<u8>, usize> = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let mut pos = vec![0usize; m];
        for (r, &s) in order.iter().enumerate() {
            pos[s] = r;
        }
        let dim = basis.len();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for (col, state) in basis.iter().enumerate() {
            for (i, row) in trunc.rows().iter().enumerate() {
                for &(j, hij) in row {
                    // a†_i a_j
                    if state[j] == 0 {
                        continue;
                    }
                    if i == j {
                        h[(col, col)] += hij * state[j] as f64;
                        continue;
                    }
                    let mut next = state.clone();
                    next[j] -= 1;
                    if stats == Statistics::Fermion && next[i] == 1 {
                        continue;
                    }
                    let amp = match stats {
                        Statistics::Boson => ((state[j] as f64) * (state[i] as f64 + 1.0)).sqrt(),
                        Statistics::Fermion => {
                            let before = |p: usize, occ: &[u8]| {
                                (0..m).filter(|&k| pos[k] < p && occ[k] == 1).count()
                            };
                            let s1 = before(pos[j], state);
                            let s2 = before(pos[i], &next);
                            if (s1 + s2) % 2 == 0 {
                                1.0
                            } else {
                                -1.0
                            }
                        }
                    };
                    next[i] += 1;
                    let r = lookup[&next];
                    h[(r, col)] += hij * amp;
                }
            }
        }
        let eig = SymmetricEigen::new(h);
        let site_index = trunc.sites().iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Self {
            stats,
            particles,
            site_index,
            basis,
            lookup,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn state_index(&self, s: &OccupationState) -> Result<usize> {
        let mut v = vec![0u8; self.site_index.len()];
        for (site, n) in s.occupied() {
            let i = self
                .site_index
                .get(&site)
                .ok_or_else(|| Error::Domain(format!("{site} is outside the Fock truncation")))?;
            v[*i] = n as u8;
        }
        self.lookup
            .get(&v)
            .copied()
            .ok_or_else(|| Error::Domain("occupation not in the basis".into()))
    }

    /// ⟨final| e^{-iHt} |initial⟩; exactly zero when particle numbers differ.
    pub fn amplitude(&self, initial: &OccupationState, final_: &OccupationState, t: f64) -> Result<C64> {
        crate::error::ensure_forward(t)?;
        if initial.stats != self.stats || final_.stats != self.stats {
            return Err(Error::Domain("statistics mismatch".into()));
        }
        if initial.total() != final_.total() || initial.total() != self.particles {
            return Ok(C64::new(0.0, 0.0));
        }
        let a = self.state_index(initial)?;
        let b = self.state_index(final_)?;
        let v = &self.vectors;
        Ok((0..self.dimension())
            .map(|k| C64::from_polar(v[(b, k)] * v[(a, k)], -self.energies[k] * t))
            .sum())
    }
}

/// One-shot Fock amplitude with the default ceilings.
pub fn fock_oracle(
    trunc: &TruncatedLattice,
    stats: Statistics,
    initial: &OccupationState,
    final_: &OccupationState,
    t: f64,
) -> Result<C64> {
    if initial.total() != final_.total() {
        return Ok(C64::new(0.0, 0.0));
    }
    FockOracle::new(trunc, stats, initial.total(), FockLimits::default())?.amplitude(initial, final_, t)
}
