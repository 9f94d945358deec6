//! Alternating chain (dimer): auxiliary scalar kernel G and the kernel
//! K = e^{-iE0t}[Ĥ - E0 + i∂_t] G.

use super::chain::CHAIN_MARGIN;
use super::operational::{check_tail, scaled_mass_derivatives, KERNEL_TAIL_FLOOR};
use super::{KernelMethod, KernelOptions, Propagator};
use crate::error::{ensure_forward, Error};
use crate::lattice::{quadrature_field, LatticeKind, LatticeSpec, QuadratureField, SiteIndex, DEFAULT_POINTS_1D};
use crate::specfun::bessel::bessel_j_range_complex;
use crate::specfun::cq::i_pow;
use crate::specfun::{legendre_zero_column, spherical_j_range};
use crate::{Result, C64};
use std::f64::consts::PI;

/// μ± = (√(4Δ²+μ²) ± |μ|)/2, so that μ₊μ₋ = Δ² and μ₊² + μ₋² = μ² + 2Δ².
pub fn dimer_mu_pm(delta: f64, mu: f64) -> (f64, f64) {
    let root = (4.0 * delta * delta + mu * mu).sqrt();
    let m = mu.abs();
    // μ₋ through the product keeps precision when |μ| ≫ Δ
    let plus = 0.5 * (root + m);
    (plus, delta * delta / plus)
}

/// Smallest s with t (a t²)^s / (s! (2s+1)!!) below 1e-40 and s ≥ floor,
/// a bound on the s-th operational term.
pub(crate) fn operational_cutoff(t: f64, a: f64, floor: usize) -> usize {
    let target = -40.0 * std::f64::consts::LN_10;
    let base = (a * t * t).max(1e-300).ln();
    let mut log_term = t.max(1e-300).ln();
    let mut s = 0usize;
    loop {
        if s >= floor && log_term < target {
            return s;
        }
        s += 1;
        log_term += base - (s as f64).ln() - ((2 * s + 1) as f64).ln();
    }
}

#[derive(Debug, Clone)]
enum Data {
    Quadrature(QuadratureField),
    Spherical { a: Vec<f64>, b: Vec<f64>, za: f64, zb: f64, lmax: usize },
    Operational { deriv: Vec<C64>, deriv_t: Vec<C64>, inv_fact: Vec<f64>, s0: usize },
    StrongGap { r: f64, value: [Vec<C64>; 2], idt: [Vec<C64>; 2] },
}

/// Scalar G(d) and i∂_t G(d) for the dimer at fixed t.
#[derive(Debug, Clone)]
pub(crate) struct DimerScalar {
    t: f64,
    data: Data,
}

impl DimerScalar {
    pub(crate) fn new(spec: &LatticeSpec, t: f64, method: KernelMethod, opts: &KernelOptions) -> Result<Self> {
        ensure_forward(t)?;
        let delta = spec.delta;
        let mu = spec.mu();
        let data = match method {
            KernelMethod::Quadrature => {
                let dspec = LatticeSpec { kind: LatticeKind::Dimer, ..*spec };
                let n = opts.quadrature_points.unwrap_or(DEFAULT_POINTS_1D);
                Data::Quadrature(quadrature_field(&dspec, t, n)?)
            }
            KernelMethod::SphericalWave => {
                let (plus, minus) = dimer_mu_pm(delta, mu);
                let (za, zb) = (plus * t, minus * t);
                let lmax = za.ceil() as usize + 40;
                Data::Spherical { a: spherical_j_range(lmax + 1, za), b: spherical_j_range(lmax + 1, zb), za, zb, lmax }
            }
            KernelMethod::Operational | KernelMethod::ClosedForm => {
                let r = (mu * mu + 2.0 * delta * delta).sqrt();
                let s0 = operational_cutoff(t, delta * delta, (2.0 * delta * t).ceil() as usize);
                let smax = s0 + 40;
                let (d, dt) = scaled_mass_derivatives(smax, t, r, delta * delta);
                let mut inv_fact = vec![1.0; smax + 1];
                for k in 1..=smax {
                    inv_fact[k] = inv_fact[k - 1] / k as f64;
                }
                Data::Operational { deriv: d, deriv_t: dt, inv_fact, s0 }
            }
            KernelMethod::StrongGap => {
                let r = (mu * mu + 2.0 * delta * delta).sqrt();
                let d2 = delta * delta;
                let table = |zeta: C64| {
                    let arg = C64::new(0.0, 1.0) * zeta;
                    bessel_j_range_complex(arg.norm().ceil() as usize + CHAIN_MARGIN, arg)
                };
                let mk = |sigma: f64, damp: bool| {
                    let w = C64::new(if damp { -0.5 / (r * r) } else { 0.0 }, sigma * t / (2.0 * r));
                    table(2.0 * d2 * w)
                };
                Data::StrongGap {
                    r,
                    value: [mk(1.0, true), mk(-1.0, true)],
                    idt: [mk(1.0, false), mk(-1.0, false)],
                }
            }
            other => {
                return Err(Error::Unsupported(format!("method {other} is not available for the dimer")));
            }
        };
        Ok(Self { t, data })
    }

    /// (G(d), i∂_t G(d)) at site offset d.
    pub(crate) fn pair(&self, d: i64) -> Result<(C64, C64)> {
        let zero = C64::new(0.0, 0.0);
        if d.rem_euclid(2) == 1 {
            return Ok((zero, zero));
        }
        let j = d / 2;
        let ja = j.unsigned_abs() as usize;
        match &self.data {
            Data::Quadrature(field) => field
                .get((d, 0))
                .ok_or_else(|| Error::Resource(format!("offset {d} exceeds the quadrature alias-free range"))),
            Data::Spherical { a, b, za, zb, lmax } => {
                if ja > *lmax {
                    return Ok((zero, zero));
                }
                let p = legendre_zero_column(ja, *lmax);
                let (mut g, mut gt) = (0.0, 0.0);
                for l in (ja..=*lmax).step_by(2) {
                    let w = p[l - ja] * p[l - ja];
                    g += w * a[l] * b[l];
                    gt += w * ((2 * l + 1) as f64 * a[l] * b[l] - za * a[l + 1] * b[l] - zb * a[l] * b[l + 1]);
                }
                let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                Ok((C64::new(0.0, -4.0 * PI * self.t * sign * g), C64::new(4.0 * PI * sign * gt, 0.0)))
            }
            Data::Operational { deriv, deriv_t, inv_fact, s0 } => {
                if ja > *s0 {
                    return Ok((zero, zero));
                }
                let top = (*s0).max(ja + 40).min(deriv.len() - 1);
                let mut terms = Vec::with_capacity(top);
                let mut gt = zero;
                for s in (ja..=top).step_by(2) {
                    let c = inv_fact[(s + ja) / 2] * inv_fact[(s - ja) / 2];
                    terms.push(deriv[s] * c);
                    gt += deriv_t[s] * c;
                }
                let g: C64 = terms.iter().sum();
                check_tail(&terms, g, KERNEL_TAIL_FLOOR)?;
                Ok((g, gt))
            }
            Data::StrongGap { r, value, idt } => {
                // I_j(ζ) = i^{-j} J_j(iζ); tables hold J_n(iζ)
                let lookup = |tab: &Vec<C64>| tab.get(ja).copied().unwrap_or_default() * i_pow(-(ja as i64));
                let mut g = zero;
                let mut gt = zero;
                for (k, sigma) in [1.0, -1.0].into_iter().enumerate() {
                    let ph = C64::from_polar(1.0, sigma * r * self.t);
                    g += -sigma / (2.0 * r) * ph * lookup(&value[k]);
                    gt += 0.5 * ph * lookup(&idt[k]);
                }
                Ok((g, gt))
            }
        }
    }

    /// K(n, m) with the dimer Hamiltonian acting on the first index.
    pub(crate) fn kernel(&self, spec: &LatticeSpec, n: i64, m: i64) -> Result<C64> {
        let d = n - m;
        let (g, gt) = self.pair(d)?;
        let (gp, _) = self.pair(d + 1)?;
        let (gm, _) = self.pair(d - 1)?;
        let s = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let bracket = g * (s * spec.mu()) + (gp + gm) * spec.delta + gt;
        Ok(C64::from_polar(1.0, -spec.e0() * self.t) * bracket)
    }
}

/// Auxiliary scalar kernel G(n, m; t) of the dimer.
pub fn g_dimer(n: i64, m: i64, t: f64, spec: &LatticeSpec, method: KernelMethod) -> Result<C64> {
    let prop = Propagator::new(dimer_spec(spec)?, t, method)?;
    prop.scalar((n - m, 0)).map(|p| p.0)
}

/// Dimer kernel ⟨n| e^{-iHt} |m⟩.
pub fn k_dimer(n: i64, m: i64, t: f64, spec: &LatticeSpec, method: KernelMethod) -> Result<C64> {
    let spec = dimer_spec(spec)?;
    let prop = Propagator::new(spec, t, method)?;
    prop.amplitude(&SiteIndex::at(LatticeKind::Dimer, n, 0), &SiteIndex::at(LatticeKind::Dimer, m, 0))
}

fn dimer_spec(spec: &LatticeSpec) -> Result<LatticeSpec> {
    match spec.kind {
        LatticeKind::Dimer => Ok(*spec),
        other => Err(Error::Domain(format!("expected a dimer spec, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::k_monomer;
    use crate::lattice::bz_quadrature_pair;

    fn spec(mu: f64) -> LatticeSpec {
        LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, mu).unwrap()
    }

    #[test]
    fn mu_pm_product() {
        let (p, m) = dimer_mu_pm(1.3, 0.7);
        assert!((p * m - 1.69).abs() < 1e-14);
        assert!((p * p + m * m - (0.49 + 2.0 * 1.69)).abs() < 1e-13);
    }

    #[test]
    fn methods_match_quadrature() {
        let opts = KernelOptions::default();
        for (mu, t) in [(1.0, 2.0), (2.0, 1.0), (0.0, 3.0), (0.5, 0.7)] {
            let s = spec(mu);
            for method in [KernelMethod::SphericalWave, KernelMethod::Operational] {
                let sc = DimerScalar::new(&s, t, method, &opts).unwrap();
                for d in [-6i64, -2, 0, 2, 4, 8] {
                    let (q, qt) = bz_quadrature_pair(&s, (d, 0), t, 2048).unwrap();
                    let (g, gt) = sc.pair(d).unwrap();
                    assert!((q - g).norm() < 1e-11, "{method} mu={mu} t={t} d={d}: {q} vs {g}");
                    assert!((qt - gt).norm() < 1e-11, "{method} mu={mu} t={t} d={d}: dt {qt} vs {gt}");
                }
            }
        }
    }

    #[test]
    fn zero_time_and_odd_offsets() {
        let s = spec(1.0);
        for method in [KernelMethod::SphericalWave, KernelMethod::Operational, KernelMethod::Quadrature] {
            assert!(g_dimer(2, 0, 0.0, &s, method).unwrap().norm() < 1e-15);
            assert_eq!(g_dimer(3, 0, 1.2, &s, method).unwrap(), C64::new(0.0, 0.0));
            let k0 = k_dimer(1, 1, 0.0, &s, method).unwrap();
            assert!((k0 - 1.0).norm() < 1e-14, "{method}: {k0}");
        }
    }

    #[test]
    fn gapless_limit_is_the_chain() {
        let s = LatticeSpec::new(LatticeKind::Dimer, 1.0, 0.4, 0.4).unwrap();
        for d in -5..=5 {
            let k = k_dimer(d, 0, 2.0, &s, KernelMethod::SphericalWave).unwrap();
            let c = C64::from_polar(1.0, -0.4 * 2.0) * k_monomer(d, 0, 2.0, 1.0).unwrap();
            assert!((k - c).norm() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn strong_gap_error_scales_cubically() {
        let err = |mu: f64| {
            let s = spec(mu);
            // max error over max magnitude on a (t, offset) grid
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for i in 0..=10 {
                let t = 0.5 + 0.1 * i as f64;
                let sg = DimerScalar::new(&s, t, KernelMethod::StrongGap, &KernelOptions::default()).unwrap();
                let ex = DimerScalar::new(&s, t, KernelMethod::SphericalWave, &KernelOptions::default()).unwrap();
                for d in (-8..=8).step_by(2) {
                    let a = sg.pair(d).unwrap().0;
                    let b = ex.pair(d).unwrap().0;
                    num = num.max((a - b).norm());
                    den = den.max(b.norm());
                }
            }
            num / den
        };
        let (e10, e20) = (err(10.0), err(20.0));
        assert!(e10 < 1e-2, "{e10}");
        let ratio = e10 / e20;
        assert!((6.0..=10.0).contains(&ratio), "ratio {ratio}");
    }
}
