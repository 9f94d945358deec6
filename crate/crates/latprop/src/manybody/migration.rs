//! Two-particle migration curves on lattices of coordination 2, 3, 4 and 6.

use super::amplitude::{boson_amplitude, fermion_amplitude, FermionVariant};
use super::state::{OccupationState, Statistics};
use crate::error::Error;
use crate::kernels::{KernelMethod, Propagator};
use crate::lattice::{LatticeKind, LatticeSpec, SiteIndex, Sublattice};
use crate::{Result, C64};
use rayon::prelude::*;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Fermions on two neighbouring sites 1, 2 move to the next pair 3, 4
    /// along the same primitive direction.
    FermionPairShift,
    /// Bosons (3, 1) on neighbouring sites equalise to (2, 2).
    Boson31To22,
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "fermion_pair_shift" | "fermion" => Ok(Scenario::FermionPairShift),
            "boson_3_1_to_2_2" | "boson" => Ok(Scenario::Boson31To22),
            other => Err(Error::Domain(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Lattices in order of coordination number.
pub const MIGRATION_LATTICES: [LatticeKind; 4] =
    [LatticeKind::Monomer, LatticeKind::Hexagonal, LatticeKind::Square, LatticeKind::Triangular];

#[derive(Debug, Clone, PartialEq)]
pub struct MigrationCurve {
    pub kind: LatticeKind,
    pub coordination: usize,
    /// (t, probability)
    pub samples: Vec<(f64, f64)>,
    /// probabilities divided by their maximum over the grid
    pub normalized: Vec<f64>,
    /// grid time of the largest probability, refined by a parabola through
    /// the neighbouring samples
    pub t_peak: f64,
    pub peak: f64,
}

/// Sites 1..4: a neighbouring pair and the translate that starts one bond
/// beyond it. On the honeycomb the pair is A, B of one cell and the
/// translate is the next cell along a1.
pub fn scenario_sites(kind: LatticeKind) -> [SiteIndex; 4] {
    match kind {
        LatticeKind::Hexagonal => [
            SiteIndex::hex(0, 0, Sublattice::A),
            SiteIndex::hex(0, 0, Sublattice::B),
            SiteIndex::hex(1, 0, Sublattice::A),
            SiteIndex::hex(1, 0, Sublattice::B),
        ],
        k => [0, 1, 2, 3].map(|n| SiteIndex::at(k, n, 0)),
    }
}

fn probability(spec: &LatticeSpec, scenario: Scenario, t: f64) -> Result<f64> {
    let prop = Propagator::new(*spec, t, KernelMethod::default_for(spec))?;
    let kernel = |a: &SiteIndex, b: &SiteIndex, _t: f64| -> Result<C64> { prop.amplitude(a, b) };
    let s = scenario_sites(spec.kind);
    let amp = match scenario {
        Scenario::FermionPairShift => {
            let i = OccupationState::new(Statistics::Fermion, [(s[0], 1), (s[1], 1)])?;
            let f = OccupationState::new(Statistics::Fermion, [(s[2], 1), (s[3], 1)])?;
            fermion_amplitude(&i, &f, &kernel, t, FermionVariant::Determinant)?
        }
        Scenario::Boson31To22 => {
            let i = OccupationState::new(Statistics::Boson, [(s[0], 3), (s[1], 1)])?;
            let f = OccupationState::new(Statistics::Boson, [(s[0], 2), (s[1], 2)])?;
            boson_amplitude(&i, &f, &kernel, t)?
        }
    };
    Ok(amp.norm_sqr())
}

/// |amplitude|² over the time grid for every coordination number, using
/// the determinant formula for fermions.
pub fn migration_experiment(delta: f64, scenario: Scenario, t_grid: &[f64]) -> Result<Vec<MigrationCurve>> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    MIGRATION_LATTICES
        .iter()
        .map(|&kind| {
            let spec = LatticeSpec::homogeneous(kind, delta);
            let probs: Vec<f64> =
                t_grid.par_iter().map(|&t| probability(&spec, scenario, t)).collect::<Result<_>>()?;
            let (imax, &peak) = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty grid");
            let t_peak = refine_peak(t_grid, &probs, imax);
            let normalized = probs.iter().map(|p| if peak > 0.0 { p / peak } else { 0.0 }).collect();
            Ok(MigrationCurve {
                kind,
                coordination: kind.coordination(),
                samples: t_grid.iter().copied().zip(probs).collect(),
                normalized,
                t_peak,
                peak,
            })
        })
        .collect()
}

fn refine_peak(t: &[f64], p: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= t.len() {
        return t[i];
    }
    let (x0, x1, x2) = (t[i - 1], t[i], t[i + 1]);
    let (y0, y1, y2) = (p[i - 1], p[i], p[i + 1]);
    let den = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
    if a >= 0.0 {
        return x1;
    }
    (-b / (2.0 * a)).clamp(x0, x2)
}
