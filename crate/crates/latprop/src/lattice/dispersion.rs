use super::{LatticeKind, LatticeSpec};
use crate::error::Error;
use crate::Result;

/// Band structure in reduced coordinates k_i = k·a_i on [0, 2π)^d.
///
/// For the two-species lattices ε²_k is the eigenvalue of p₊p₋ and the bands
/// are E0 ± λ_k with λ_k = √(ε²_k + μ²). For one-species lattices ε_k is the
/// band itself (relative to E0) and λ_k = |ε_k|.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion {
    pub kind: LatticeKind,
    pub delta: f64,
    pub mu: f64,
    /// k-independent part of ε²_k: 2Δ² (dimer), 3Δ² (honeycomb), 0 otherwise.
    pub gamma: f64,
}

pub fn dispersion(spec: &LatticeSpec) -> Result<Dispersion> {
    let d2 = spec.delta * spec.delta;
    let gamma = match spec.kind {
        LatticeKind::Dimer => 2.0 * d2,
        LatticeKind::Hexagonal => 3.0 * d2,
        LatticeKind::SquareRowAlternating => {
            return Err(Error::Unsupported("no single dispersion for alternating square rows".into()))
        }
        _ => 0.0,
    };
    Ok(Dispersion { kind: spec.kind, delta: spec.delta, mu: spec.mu(), gamma })
}

/// cos k1 + cos k2 + cos(k1 + k2)
#[inline]
pub(crate) fn tri_sum(k1: f64, k2: f64) -> f64 {
    k1.cos() + k2.cos() + (k1 + k2).cos()
}

impl Dispersion {
    /// Signed band relative to E0 for one-species lattices.
    pub fn band(&self, k: &[f64]) -> f64 {
        let d = self.delta;
        match self.kind {
            LatticeKind::Monomer | LatticeKind::Dimer => 2.0 * d * k[0].cos(),
            LatticeKind::Square | LatticeKind::SquareRowAlternating => 2.0 * d * (k[0].cos() + k[1].cos()),
            LatticeKind::Triangular => 2.0 * d * tri_sum(k[0], k[1]),
            LatticeKind::Hexagonal => self.lambda(k),
        }
    }

    pub fn epsilon_sq(&self, k: &[f64]) -> f64 {
        match self.kind {
            LatticeKind::Hexagonal => {
                (self.delta * self.delta * (3.0 + 2.0 * tri_sum(k[0], k[1]))).max(0.0)
            }
            _ => {
                let b = self.band(k);
                b * b
            }
        }
    }

    pub fn lambda(&self, k: &[f64]) -> f64 {
        (self.epsilon_sq(k) + self.mu * self.mu).sqrt()
    }

    /// Gradient of the upper band λ_k in reduced coordinates.
    pub fn lambda_gradient(&self, k: &[f64]) -> Vec<f64> {
        let d2 = self.delta * self.delta;
        let lam = self.lambda(k);
        // ∂λ = ∂(ε²) / (2λ)
        let de2: Vec<f64> = match self.kind {
            LatticeKind::Monomer | LatticeKind::Dimer => {
                vec![-8.0 * d2 * k[0].cos() * k[0].sin()]
            }
            LatticeKind::Hexagonal => vec![
                -2.0 * d2 * (k[0].sin() + (k[0] + k[1]).sin()),
                -2.0 * d2 * (k[1].sin() + (k[0] + k[1]).sin()),
            ],
            LatticeKind::Square | LatticeKind::SquareRowAlternating => {
                let b = self.band(k);
                vec![-4.0 * self.delta * b * k[0].sin(), -4.0 * self.delta * b * k[1].sin()]
            }
            LatticeKind::Triangular => {
                let b = self.band(k);
                vec![
                    -4.0 * self.delta * b * (k[0].sin() + (k[0] + k[1]).sin()),
                    -4.0 * self.delta * b * (k[1].sin() + (k[0] + k[1]).sin()),
                ]
            }
        };
        de2.into_iter().map(|g| if lam > 0.0 { g / (2.0 * lam) } else { 0.0 }).collect()
    }

    /// Brillouin-zone edges of |band - E0| for the energy Green's function.
    pub fn band_range(&self) -> (f64, f64) {
        let d = self.delta;
        match self.kind {
            LatticeKind::Monomer => (-2.0 * d, 2.0 * d),
            LatticeKind::Square | LatticeKind::SquareRowAlternating => (-4.0 * d, 4.0 * d),
            LatticeKind::Triangular => (-3.0 * d, 6.0 * d),
            LatticeKind::Dimer => (self.mu.abs(), (self.mu * self.mu + 4.0 * d * d).sqrt()),
            LatticeKind::Hexagonal => (self.mu.abs(), (self.mu * self.mu + 9.0 * d * d).sqrt()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn documented_values() {
        let h = dispersion(&LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0)).unwrap();
        assert!((h.epsilon_sq(&[0.0, 0.0]) - 9.0).abs() < 1e-15);
        assert!(h.epsilon_sq(&[2.0 * PI / 3.0, -4.0 * PI / 3.0]) < 1e-14);
        let d = dispersion(&LatticeSpec::homogeneous(LatticeKind::Dimer, 1.0)).unwrap();
        assert!(d.epsilon_sq(&[FRAC_PI_2]) < 1e-15);
        assert_eq!(d.gamma, 2.0);
        assert_eq!(h.gamma, 3.0);
    }

    #[test]
    fn gap_property() {
        let spec = LatticeSpec::with_gap(LatticeKind::Hexagonal, 1.0, 0.7).unwrap();
        let h = dispersion(&spec).unwrap();
        let mut lo = f64::INFINITY;
        for i in 0..300 {
            for j in 0..300 {
                let k = [2.0 * PI * i as f64 / 300.0, 2.0 * PI * j as f64 / 300.0];
                let l = h.lambda(&k);
                assert!(l >= 0.7 - 1e-15);
                lo = lo.min(l);
            }
        }
        assert!((lo - 0.7).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_difference() {
        for kind in [LatticeKind::Dimer, LatticeKind::Hexagonal, LatticeKind::Triangular, LatticeKind::Square] {
            let spec = if kind.single_species() {
                LatticeSpec::homogeneous(kind, 1.3)
            } else {
                LatticeSpec::with_gap(kind, 1.3, 0.4).unwrap()
            };
            let d = dispersion(&spec).unwrap();
            let k = [0.37, 1.91];
            let g = d.lambda_gradient(&k[..kind.dim()]);
            for (i, gi) in g.iter().enumerate() {
                let h = 1e-6;
                let mut kp = k;
                let mut km = k;
                kp[i] += h;
                km[i] -= h;
                let fd = (d.lambda(&kp[..kind.dim()]) - d.lambda(&km[..kind.dim()])) / (2.0 * h);
                assert!((fd - gi).abs() < 1e-8, "{kind}: {fd} vs {gi}");
            }
        }
    }
}
