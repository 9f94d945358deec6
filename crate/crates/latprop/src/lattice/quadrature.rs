//! Periodic trapezoid quadrature over the reduced Brillouin zone [0, 2π)^d.
//!
//! For two-species lattices the scalar kernel is
//! K_S(d; t) = ⟨e^{ik·d} sin(λ_k t)/(iλ_k)⟩ and its companion is
//! i∂_t K_S = ⟨e^{ik·d} cos(λ_k t)⟩. For one-species lattices the plain
//! kernel ⟨e^{ik·d} e^{-iE_k t}⟩ is returned instead.

use super::dispersion::{dispersion, Dispersion};
use super::{LatticeKind, LatticeSpec};
use crate::error::{domain, ensure_forward, Error};
use crate::{Result, C64};
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const DEFAULT_POINTS_1D: usize = 4096;
pub const DEFAULT_POINTS_2D: usize = 1024;

fn check_points(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return domain(format!("quadrature points must be a power of two, got {n}"));
    }
    Ok(())
}

fn check_kind(spec: &LatticeSpec) -> Result<Dispersion> {
    if spec.kind == LatticeKind::SquareRowAlternating {
        return Err(Error::Unsupported(
            "quadrature is not provided for alternating square rows; use the product form".into(),
        ));
    }
    dispersion(spec)
}

#[inline]
fn sinc_t(lam: f64, t: f64) -> f64 {
    let x = lam * t;
    if x.abs() < 1e-8 {
        t * (1.0 - x * x / 6.0)
    } else {
        (x).sin() / lam
    }
}

/// Integrand and its i∂_t companion at reduced momentum k.
fn integrand(spec: &LatticeSpec, disp: &Dispersion, k: &[f64], t: f64) -> (C64, C64) {
    if spec.kind.single_species() {
        let e = spec.e0() + disp.band(k);
        let v = C64::from_polar(1.0, -e * t);
        (v, v * e)
    } else {
        let lam = disp.lambda(k);
        // sin(λt)/(iλ) = -i sin(λt)/λ
        (C64::new(0.0, -sinc_t(lam, t)), C64::new((lam * t).cos(), 0.0))
    }
}

/// (value, i∂_t value) at offset d by direct summation.
pub fn bz_quadrature_pair(spec: &LatticeSpec, dn: (i64, i64), t: f64, n_points: usize) -> Result<(C64, C64)> {
    ensure_forward(t)?;
    check_points(n_points)?;
    let disp = check_kind(spec)?;
    let h = 2.0 * PI / n_points as f64;
    let np = n_points as i64;
    let phase = |j: usize, d: i64| C64::from_polar(1.0, ((j as i64 * d).rem_euclid(np)) as f64 * h);
    if spec.kind.dim() == 1 {
        let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for j in 0..n_points {
            let (v, w) = integrand(spec, &disp, &[j as f64 * h], t);
            let p = phase(j, dn.0);
            acc.0 += p * v;
            acc.1 += p * w;
        }
        let s = 1.0 / n_points as f64;
        return Ok((acc.0 * s, acc.1 * s));
    }
    let rows: Vec<(C64, C64)> = (0..n_points)
        .into_par_iter()
        .map(|a| {
            let k1 = a as f64 * h;
            let pa = phase(a, dn.0);
            let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for b in 0..n_points {
                let (v, w) = integrand(spec, &disp, &[k1, b as f64 * h], t);
                let p = pa * phase(b, dn.1);
                acc.0 += p * v;
                acc.1 += p * w;
            }
            acc
        })
        .collect();
    let s = 1.0 / (n_points * n_points) as f64;
    let (v, w) = rows
        .iter()
        .fold((C64::new(0.0, 0.0), C64::new(0.0, 0.0)), |a, r| (a.0 + r.0, a.1 + r.1));
    Ok((v * s, w * s))
}

/// Scalar kernel (two species) or plain kernel (one species) at offset d.
pub fn bz_quadrature_kernel(spec: &LatticeSpec, dn: (i64, i64), t: f64, n_points: usize) -> Result<C64> {
    Ok(bz_quadrature_pair(spec, dn, t, n_points)?.0)
}

/// All offsets at once through an inverse FFT of the sampled integrand.
#[derive(Debug, Clone)]
pub struct QuadratureField {
    n: usize,
    dim: usize,
    value: Vec<C64>,
    idt: Vec<C64>,
}

impl QuadratureField {
    pub fn points(&self) -> usize {
        self.n
    }

    /// Offsets with |d_i| < n/2 are alias-free.
    pub fn get(&self, d: (i64, i64)) -> Option<(C64, C64)> {
        let half = (self.n / 2) as i64;
        if d.0.abs() >= half || (self.dim == 2 && d.1.abs() >= half) {
            return None;
        }
        let n = self.n as i64;
        let i = d.0.rem_euclid(n) as usize;
        let idx = if self.dim == 1 { i } else { i * self.n + d.1.rem_euclid(n) as usize };
        Some((self.value[idx], self.idt[idx]))
    }
}

pub fn quadrature_field(spec: &LatticeSpec, t: f64, n_points: usize) -> Result<QuadratureField> {
    ensure_forward(t)?;
    check_points(n_points)?;
    let disp = check_kind(spec)?;
    let dim = spec.kind.dim();
    let h = 2.0 * PI / n_points as f64;
    let total = n_points.pow(dim as u32);
    let samples: Vec<(C64, C64)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let k = if dim == 1 {
                vec![idx as f64 * h]
            } else {
                vec![(idx / n_points) as f64 * h, (idx % n_points) as f64 * h]
            };
            integrand(spec, &disp, &k, t)
        })
        .collect();
    let mut value: Vec<C64> = samples.iter().map(|p| p.0).collect();
    let mut idt: Vec<C64> = samples.iter().map(|p| p.1).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n_points);
    for buf in [&mut value, &mut idt] {
        // rows (second index), then columns (first index)
        for row in buf.chunks_mut(n_points) {
            fft.process(row);
        }
        if dim == 2 {
            let mut col = vec![C64::new(0.0, 0.0); n_points];
            for c in 0..n_points {
                for r in 0..n_points {
                    col[r] = buf[r * n_points + c];
                }
                fft.process(&mut col);
                for r in 0..n_points {
                    buf[r * n_points + c] = col[r];
                }
            }
        }
        let s = 1.0 / total as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }
    Ok(QuadratureField { n: n_points, dim, value, idt })
}

/// Energy-domain Green's function i⟨e^{ik·d}/(E - E_k)⟩ for one-species
/// lattices. Real E inside the band puts a pole on the contour.
pub fn energy_green(spec: &LatticeSpec, dn: (i64, i64), e: C64, n_points: usize) -> Result<C64> {
    check_points(n_points)?;
    if !spec.kind.single_species() {
        return Err(Error::Unsupported(format!(
            "energy Green's function implemented for one-species lattices, not {}",
            spec.kind
        )));
    }
    let disp = dispersion(spec)?;
    let (lo, hi) = disp.band_range();
    let rel = e.re - spec.e0();
    if e.im == 0.0 && rel >= lo && rel <= hi {
        return domain(format!("real energy {} lies inside the band", e.re));
    }
    let h = 2.0 * PI / n_points as f64;
    let np = n_points as i64;
    let dim = spec.kind.dim();
    let rows: Vec<C64> = (0..n_points)
        .into_par_iter()
        .map(|a| {
            let k1 = a as f64 * h;
            if dim == 1 {
                let p = C64::from_polar(1.0, ((a as i64 * dn.0).rem_euclid(np)) as f64 * h);
                return p / (e - spec.e0() - disp.band(&[k1]));
            }
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n_points {
                let ph = ((a as i64 * dn.0 + b as i64 * dn.1).rem_euclid(np)) as f64 * h;
                acc += C64::from_polar(1.0, ph) / (e - spec.e0() - disp.band(&[k1, b as f64 * h]));
            }
            acc
        })
        .collect();
    let sum: C64 = rows.iter().sum();
    Ok(C64::i() * sum / n_points.pow(dim as u32) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    #[test]
    fn zero_time_and_monomer() {
        let d = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, 0.5).unwrap();
        assert!(bz_quadrature_kernel(&d, (2, 0), 0.0, 512).unwrap().norm() < 1e-15);
        let m = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let v = bz_quadrature_kernel(&m, (0, 0), 1.0, DEFAULT_POINTS_1D).unwrap();
        assert!((v - bessel_j(0, 2.0)).norm() < 1e-12);
        assert!(bz_quadrature_kernel(&m, (0, 0), -1.0, 512).is_err());
        assert!(bz_quadrature_kernel(&m, (0, 0), 1.0, 1000).is_err());
    }

    #[test]
    fn dimer_odd_offsets_vanish() {
        let d = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, 1.0).unwrap();
        for dn in [1, 3, -5] {
            assert!(bz_quadrature_kernel(&d, (dn, 0), 2.0, DEFAULT_POINTS_1D).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn field_matches_direct() {
        let h = LatticeSpec::with_gap(LatticeKind::Hexagonal, 1.0, 0.3).unwrap();
        let f = quadrature_field(&h, 2.0, 128).unwrap();
        for d in [(0, 0), (2, -1), (-3, 4)] {
            let (a, b) = f.get(d).unwrap();
            let (c, e) = bz_quadrature_pair(&h, d, 2.0, 128).unwrap();
            assert!((a - c).norm() < 1e-13 && (b - e).norm() < 1e-13);
        }
        assert!(f.get((64, 0)).is_none());
    }

    #[test]
    fn spectral_convergence() {
        let h = LatticeSpec::homogeneous(LatticeKind::Triangular, 1.0);
        let a = bz_quadrature_kernel(&h, (1, 2), 5.0, 512).unwrap();
        let b = bz_quadrature_kernel(&h, (1, 2), 5.0, 1024).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn energy_green_identity() {
        let m = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let e = C64::new(0.0, 5.0);
        let g = |d: i64| energy_green(&m, (d, 0), e, 1024).unwrap();
        // (Ĥ - E) 𝒦_E = -i δ
        let r0 = g(1) + g(-1) - e * g(0) + C64::i();
        let r3 = g(4) + g(2) - e * g(3);
        assert!(r0.norm() < 1e-8 && r3.norm() < 1e-8);
        assert!((g(3) - g(-3)).norm() < 1e-14);
        assert!(energy_green(&m, (0, 0), C64::new(1.5, 0.0), 1024).is_err());
        assert!(energy_green(&m, (0, 0), C64::new(2.5, 0.0), 1024).is_ok());
    }
}
