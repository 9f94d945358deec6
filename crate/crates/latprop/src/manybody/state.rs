use crate::error::domain;
use crate::lattice::SiteIndex;
use crate::Result;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

/// Occupation numbers on lattice sites; zero counts are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationState {
    pub stats: Statistics,
    occ: BTreeMap<SiteIndex, u32>,
}

impl OccupationState {
    pub fn new(stats: Statistics, entries: impl IntoIterator<Item = (SiteIndex, u32)>) -> Result<Self> {
        let mut occ = BTreeMap::new();
        for (s, n) in entries {
            *occ.entry(s).or_insert(0) += n;
        }
        occ.retain(|_, n| *n > 0);
        if stats == Statistics::Fermion {
            if let Some((s, n)) = occ.iter().find(|(_, n)| **n > 1) {
                return domain(format!("fermionic occupation {n} at {s}"));
            }
        }
        Ok(Self { stats, occ })
    }

    pub fn total(&self) -> u32 {
        self.occ.values().sum()
    }

    pub fn count(&self, s: &SiteIndex) -> u32 {
        self.occ.get(s).copied().unwrap_or(0)
    }

    /// Occupied sites in ascending order with their counts.
    pub fn occupied(&self) -> impl Iterator<Item = (SiteIndex, u32)> + '_ {
        self.occ.iter().map(|(s, n)| (*s, *n))
    }

    pub fn sites(&self) -> Vec<SiteIndex> {
        self.occ.keys().copied().collect()
    }
}
