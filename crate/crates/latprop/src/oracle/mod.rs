//! Brute-force ground truth: single-particle evolution on truncated lattices
//! and exact few-body evolution in small Fock spaces.

mod fock;
mod single;

pub use fock::{fock_oracle, FockLimits, FockOracle};
pub use single::{single_particle_oracle, SpectralOracle};

use crate::lattice::{neighbors, onsite, LatticeSpec, SiteIndex, Window};
use crate::{Error, Result};
use std::collections::HashMap;

/// Finite box of a lattice with a fixed site enumeration (lexicographic).
#[derive(Debug, Clone)]
pub struct TruncatedLattice {
    pub spec: LatticeSpec,
    pub window: Window,
    sites: Vec<SiteIndex>,
    index: HashMap<SiteIndex, usize>,
    /// Sparse rows: (column, matrix element).
    rows: Vec<Vec<(usize, f64)>>,
}

/// Light-cone certificate for comparing against an infinite-lattice kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeMargin {
    pub t: f64,
    /// 2·c·Δ, a deliberate overestimate of the maximal group velocity.
    pub speed_bound: f64,
    /// Cells between the reference site and the nearest box face.
    pub margin: i64,
    pub valid: bool,
}

impl TruncatedLattice {
    /// Box of half-width `half_width` around the origin.
    pub fn new(spec: LatticeSpec, half_width: i64) -> Result<Self> {
        Self::from_window(spec, Window::centered(spec.kind, half_width))
    }

    pub fn from_window(spec: LatticeSpec, window: Window) -> Result<Self> {
        let sites = window.sites(spec.kind);
        if sites.is_empty() {
            return Err(Error::Domain("empty truncation window".into()));
        }
        let index: HashMap<SiteIndex, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut rows = Vec::with_capacity(sites.len());
        for s in &sites {
            let mut row = vec![(index[s], onsite(&spec, *s))];
            for nb in neighbors(&spec, *s)? {
                if let Some(&j) = index.get(&nb) {
                    row.push((j, spec.delta));
                }
            }
            rows.push(row);
        }
        Ok(Self { spec, window, sites, index, rows })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[SiteIndex] {
        &self.sites
    }

    pub fn index_of(&self, s: &SiteIndex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Hamiltonian rows as (column, element) pairs in site order.
    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Dense Hamiltonian; symmetric by construction.
    pub fn hamiltonian(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut h = nalgebra::DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                h[(i, j)] += v;
            }
        }
        h
    }

    pub fn cone_margin(&self, t: f64, reference: SiteIndex) -> ConeMargin {
        let speed_bound = 2.0 * self.spec.kind.coordination() as f64 * self.spec.delta;
        let w = &self.window;
        let mut margin = (reference.n1 - w.n1.0).min(w.n1.1 - reference.n1);
        if self.spec.kind.dim() == 2 {
            margin = margin.min(reference.n2 - w.n2.0).min(w.n2.1 - reference.n2);
        }
        let need = (speed_bound * t).ceil() as i64 + 20;
        ConeMargin { t, speed_bound, margin, valid: margin >= need }
    }

    pub(crate) fn require_cone(&self, t: f64, reference: SiteIndex) -> Result<()> {
        let c = self.cone_margin(t, reference);
        if c.valid {
            Ok(())
        } else {
            Err(Error::Cone(format!(
                "margin {} cells around {reference} is below ceil({}·{t})+20",
                c.margin, c.speed_bound
            )))
        }
    }

    /// Column of e^{-iHt} for `source`, propagated with Taylor steps of the
    /// sparse Hamiltonian. Cheap for boxes too large for dense factorization.
    pub fn propagate_column(&self, source: SiteIndex, t: f64) -> Result<Vec<crate::C64>> {
        crate::error::ensure_forward(t)?;
        self.require_cone(t, source)?;
        let j = self
            .index_of(&source)
            .ok_or_else(|| Error::Domain(format!("{source} is outside the truncation")))?;
        Ok(single::taylor_propagate(&self.rows, j, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;

    #[test]
    fn hamiltonian_is_symmetric() {
        for kind in LatticeKind::ALL {
            let spec = if kind.single_species() {
                LatticeSpec::homogeneous(kind, 1.0)
            } else {
                LatticeSpec::new(kind, 1.0, 0.7, -0.4).unwrap()
            };
            let tl = TruncatedLattice::new(spec, 4).unwrap();
            let h = tl.hamiltonian();
            assert_eq!((&h - h.transpose()).abs().max(), 0.0, "{kind}");
        }
    }

    #[test]
    fn cone_rule() {
        let spec = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let tl = TruncatedLattice::new(spec, 32).unwrap();
        let origin = SiteIndex::at(LatticeKind::Monomer, 0, 0);
        assert!(tl.cone_margin(3.0, origin).valid);
        assert!(!tl.cone_margin(3.1, origin).valid);
        assert!(tl.propagate_column(origin, 3.5).is_err());
    }
}
