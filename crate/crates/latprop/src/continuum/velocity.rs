//! Physical embedding of the lattices and band group velocities.

use crate::lattice::dispersion::{dispersion, Dispersion};
use crate::lattice::{LatticeKind, LatticeSpec, SiteIndex, Sublattice};
use crate::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Primitive vectors with unit nearest-neighbour distance (rows a₁, a₂).
/// Chains use a₁ = (1, 0) per site.
pub fn lattice_vectors(kind: LatticeKind) -> [[f64; 2]; 2] {
    match kind {
        LatticeKind::Triangular => [[1.0, 0.0], [-0.5, 0.5 * SQRT3]],
        LatticeKind::Hexagonal => [[SQRT3, 0.0], [-0.5 * SQRT3, 1.5]],
        _ => [[1.0, 0.0], [0.0, 1.0]],
    }
}

/// Honeycomb B offset inside a cell; makes the three A→B bonds unit length.
pub const HEX_B_OFFSET: [f64; 2] = [0.5 * SQRT3, 0.5];

pub fn site_position(kind: LatticeKind, s: &SiteIndex) -> [f64; 2] {
    let [a1, a2] = lattice_vectors(kind);
    let (n1, n2) = (s.n1 as f64, s.n2 as f64);
    let mut p = [n1 * a1[0] + n2 * a2[0], n1 * a1[1] + n2 * a2[1]];
    if kind == LatticeKind::Hexagonal && s.sub == Some(Sublattice::B) {
        p[0] += HEX_B_OFFSET[0];
        p[1] += HEX_B_OFFSET[1];
    }
    p
}

/// Reduced coordinates k_i = k·a_i of a Cartesian momentum.
pub fn reduced_momentum(kind: LatticeKind, k: [f64; 2]) -> Vec<f64> {
    let a = lattice_vectors(kind);
    let r: Vec<f64> = a.iter().map(|ai| k[0] * ai[0] + k[1] * ai[1]).collect();
    if kind.dim() == 1 {
        vec![r[0]]
    } else {
        r
    }
}

/// Cartesian momentum from reduced coordinates.
pub fn cartesian_momentum(kind: LatticeKind, k: &[f64]) -> [f64; 2] {
    if kind.dim() == 1 {
        return [k[0], 0.0];
    }
    let [a1, a2] = lattice_vectors(kind);
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    [(k[0] * a2[1] - k[1] * a1[1]) / det, (a1[0] * k[1] - a2[0] * k[0]) / det]
}

/// Conical point of the honeycomb in reduced coordinates.
pub const HEX_CONE: [f64; 2] = [2.0 * std::f64::consts::PI / 3.0, 2.0 * std::f64::consts::PI / 3.0];

#[derive(Debug, Clone, PartialEq)]
pub struct GroupVelocity {
    /// Cartesian velocity (second component 0 for chains).
    pub velocity: [f64; 2],
    pub speed: f64,
    /// At a gapless conical point the gradient is undefined; `speed` then
    /// holds the limiting value and `velocity` is zero.
    pub degenerate: bool,
}

fn reduced_gradient(d: &Dispersion, k: &[f64]) -> Vec<f64> {
    let dl = d.delta;
    match d.kind {
        LatticeKind::Monomer => vec![-2.0 * dl * k[0].sin()],
        LatticeKind::Square => vec![-2.0 * dl * k[0].sin(), -2.0 * dl * k[1].sin()],
        LatticeKind::Triangular => vec![
            -2.0 * dl * (k[0].sin() + (k[0] + k[1]).sin()),
            -2.0 * dl * (k[1].sin() + (k[0] + k[1]).sin()),
        ],
        _ => d.lambda_gradient(k),
    }
}

/// ∇_k of the band in Cartesian units, with `k` in reduced coordinates.
/// One-species lattices use the signed band, two-species ones the upper
/// band E0 + λ_k.
pub fn group_velocity(spec: &LatticeSpec, k: &[f64]) -> Result<GroupVelocity> {
    let kind = spec.kind;
    if k.len() != kind.dim() {
        return Err(Error::Domain(format!("{kind} needs a {}-component momentum", kind.dim())));
    }
    let d = dispersion(spec)?;
    if !kind.single_species() && d.lambda(k) < 1e-12 * spec.delta {
        let limit = if kind == LatticeKind::Dimer { 2.0 } else { 1.5 } * spec.delta;
        return Ok(GroupVelocity { velocity: [0.0, 0.0], speed: limit, degenerate: true });
    }
    let g = reduced_gradient(&d, k);
    // k_i = k·a_i, so ∇_k = Σ_i (∂/∂k_i) a_i.
    let a = lattice_vectors(kind);
    let mut v = [0.0; 2];
    for (gi, ai) in g.iter().zip(&a) {
        v[0] += gi * ai[0];
        v[1] += gi * ai[1];
    }
    Ok(GroupVelocity { velocity: v, speed: v[0].hypot(v[1]), degenerate: false })
}

/// Largest |∂λ/∂k_i| over the zone, i.e. the top speed in cells (sites for
/// chains) per unit time along any lattice axis.
pub fn max_component_speed(spec: &LatticeSpec) -> Result<f64> {
    let kind = spec.kind;
    if kind == LatticeKind::SquareRowAlternating {
        // chain along n1, dimer chain along n2; both are bounded by 2Δ
        let dimer = LatticeSpec::new(LatticeKind::Dimer, spec.delta, spec.e1, spec.e2)?;
        return Ok(max_component_speed(&dimer)?.max(2.0 * spec.delta));
    }
    let d = dispersion(spec)?;
    let tau = 2.0 * std::f64::consts::PI;
    let mut best: f64 = 0.0;
    if kind.dim() == 1 {
        let n = 8192;
        for i in 0..n {
            let k = [tau * (i as f64 + 0.5) / n as f64];
            best = best.max(reduced_gradient(&d, &k)[0].abs());
        }
    } else {
        let n = 512;
        for i in 0..n {
            for j in 0..n {
                let k = [tau * (i as f64 + 0.5) / n as f64, tau * (j as f64 + 0.5) / n as f64];
                for g in reduced_gradient(&d, &k) {
                    best = best.max(g.abs());
                }
            }
        }
    }
    Ok(best)
}
