//! Honeycomb lattice: scalar G on the triangular sublattice lattice and the
//! 2×2 spinor kernel built from it.

use super::dimer::operational_cutoff;
use super::operational::{check_tail, scaled_mass_derivatives, KERNEL_TAIL_FLOOR};
use super::triangular::TriExpTable;
use super::{KernelMethod, KernelOptions, Propagator};
use crate::error::{ensure_forward, Error};
use crate::lattice::{
    quadrature_field, LatticeKind, LatticeSpec, QuadratureField, SiteIndex, Sublattice, DEFAULT_POINTS_2D, HEX_A_TO_B,
};
use crate::specfun::cq::{i_pow, MAX_TABLE_Q};
use crate::specfun::CoefficientTable;
use crate::{Result, C64};
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficient tables are expensive to build and read-only afterwards, so
/// the largest one built so far is shared.
fn shared_table(max_q: usize) -> Result<Arc<CoefficientTable>> {
    static CACHE: OnceLock<Mutex<Option<Arc<CoefficientTable>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        if t.max_q() >= max_q {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(CoefficientTable::from_walk(max_q)?);
    *guard = Some(Arc::clone(&table));
    Ok(table)
}

/// Default truncation of the gapless series: ceil(√3 Δt) + 40.
pub fn gapless_q_max(delta: f64, t: f64) -> usize {
    (3f64.sqrt() * delta * t).ceil() as usize + 40
}

#[derive(Clone)]
enum Data {
    Quadrature(QuadratureField),
    Series {
        table: Arc<CoefficientTable>,
        deriv: Vec<C64>,
        deriv_t: Vec<C64>,
        base_q: usize,
        gapless: bool,
    },
    StrongGap { r: f64, value: [Arc<TriExpTable>; 2], idt: [Arc<TriExpTable>; 2] },
}

#[derive(Clone)]
pub(crate) struct HexScalar {
    t: f64,
    data: Data,
}

impl HexScalar {
    pub(crate) fn new(spec: &LatticeSpec, t: f64, method: KernelMethod, opts: &KernelOptions) -> Result<Self> {
        ensure_forward(t)?;
        let delta = spec.delta;
        let mu = spec.mu();
        let data = match method {
            KernelMethod::Quadrature => {
                let n = opts.quadrature_points.unwrap_or(DEFAULT_POINTS_2D);
                Data::Quadrature(quadrature_field(spec, t, n)?)
            }
            KernelMethod::GaplessSeries | KernelMethod::Operational | KernelMethod::ClosedForm => {
                let gapless = method == KernelMethod::GaplessSeries;
                if gapless && mu != 0.0 {
                    return Err(Error::Unsupported(format!("the gapless series needs μ = 0, got μ = {mu}")));
                }
                let base_q = if gapless {
                    opts.q_max.unwrap_or_else(|| gapless_q_max(delta, t))
                } else {
                    operational_cutoff(t, 3.0 * delta * delta, (3f64.sqrt() * delta * t).ceil() as usize)
                };
                if base_q > MAX_TABLE_Q {
                    return Err(Error::Resource(format!(
                        "series needs {base_q} orders, above the table ceiling {MAX_TABLE_Q}; use quadrature"
                    )));
                }
                let top = (base_q + 40).min(MAX_TABLE_Q);
                let table = shared_table(top)?;
                let r = (mu * mu + 3.0 * delta * delta).sqrt();
                let (deriv, deriv_t) = scaled_mass_derivatives(top, t, r, 2.0 * delta * delta);
                Data::Series { table, deriv, deriv_t, base_q, gapless }
            }
            KernelMethod::StrongGap => {
                let r = (mu * mu + 3.0 * delta * delta).sqrt();
                let d2 = delta * delta;
                // ⟨e^{ik·d} e^{ζ S}⟩ uses x = -iζ in ⟨e^{ik·d} e^{ixS}⟩
                let mk = |sigma: f64, damp: bool| {
                    let w = C64::new(if damp { -0.5 / (r * r) } else { 0.0 }, sigma * t / (2.0 * r));
                    Arc::new(TriExpTable::new(C64::new(0.0, -1.0) * 2.0 * d2 * w))
                };
                Data::StrongGap {
                    r,
                    value: [mk(1.0, true), mk(-1.0, true)],
                    idt: [mk(1.0, false), mk(-1.0, false)],
                }
            }
            other => {
                return Err(Error::Unsupported(format!("method {other} is not available for the honeycomb")));
            }
        };
        Ok(Self { t, data })
    }

    /// (G(d), i∂_t G(d)) for cell offset d (same sublattice).
    pub(crate) fn pair(&self, d: (i64, i64)) -> Result<(C64, C64)> {
        let zero = C64::new(0.0, 0.0);
        match &self.data {
            Data::Quadrature(field) => field
                .get(d)
                .ok_or_else(|| Error::Resource(format!("offset {d:?} exceeds the quadrature alias-free range"))),
            Data::Series { table, deriv, deriv_t, base_q, gapless } => {
                let (m, n) = d;
                let qlo = m.abs().max(n.abs()).max((m - n).abs()) as usize;
                let want = if *gapless { (*base_q).max((m.abs() + n.abs()) as usize) } else { (*base_q).max(qlo + 30) };
                let top = want.min(table.max_q()).min(deriv.len() - 1);
                if qlo > top {
                    return Ok((zero, zero));
                }
                let mut terms = Vec::with_capacity(top + 1 - qlo);
                let mut gt = zero;
                for q in qlo..=top {
                    // (2Δ²)^q F_q/q! = (2Δ²)^q i^{m+n-q} C_q^{mn}; the power sits in deriv
                    let c = i_pow(m + n - q as i64) * table.get(q, m, n);
                    terms.push(c * deriv[q]);
                    gt += c * deriv_t[q];
                }
                let g: C64 = terms.iter().sum();
                if !*gapless {
                    check_tail(&terms, g, KERNEL_TAIL_FLOOR)?;
                }
                Ok((g, gt))
            }
            Data::StrongGap { r, value, idt } => {
                let mut g = zero;
                let mut gt = zero;
                for (k, sigma) in [1.0, -1.0].into_iter().enumerate() {
                    let ph = C64::from_polar(1.0, sigma * r * self.t);
                    g += -sigma / (2.0 * r) * ph * value[k].fourier(d);
                    gt += 0.5 * ph * idt[k].fourier(d);
                }
                Ok((g, gt))
            }
        }
    }

    /// Spinor entry K(a, b) with the honeycomb Hamiltonian on the first index.
    pub(crate) fn kernel(&self, spec: &LatticeSpec, a: &SiteIndex, b: &SiteIndex) -> Result<C64> {
        let d = (a.n1 - b.n1, a.n2 - b.n2);
        let mu = spec.mu();
        let bracket = match (a.sub, b.sub) {
            (Some(Sublattice::A), Some(Sublattice::A)) | (Some(Sublattice::B), Some(Sublattice::B)) => {
                let (g, gt) = self.pair(d)?;
                let s = if a.sub == Some(Sublattice::A) { 1.0 } else { -1.0 };
                g * (s * mu) + gt
            }
            (Some(Sublattice::A), Some(Sublattice::B)) => {
                let mut acc = C64::new(0.0, 0.0);
                for (b1, b2) in HEX_A_TO_B {
                    acc += self.pair((d.0 + b1, d.1 + b2))?.0;
                }
                acc * spec.delta
            }
            (Some(Sublattice::B), Some(Sublattice::A)) => {
                let mut acc = C64::new(0.0, 0.0);
                for (b1, b2) in HEX_A_TO_B {
                    acc += self.pair((d.0 - b1, d.1 - b2))?.0;
                }
                acc * spec.delta
            }
            _ => return Err(Error::Domain("honeycomb sites need sublattice tags".into())),
        };
        Ok(C64::from_polar(1.0, -spec.e0() * self.t) * bracket)
    }
}

/// Diagonal entry of the auxiliary scalar kernel G.
pub fn g_hex(da: (i64, i64), t: f64, spec: &LatticeSpec, method: KernelMethod) -> Result<C64> {
    let prop = Propagator::new(hex_spec(spec)?, t, method)?;
    prop.scalar(da).map(|p| p.0)
}

/// One entry of the honeycomb spinor kernel.
pub fn k_hex(a: &SiteIndex, b: &SiteIndex, t: f64, spec: &LatticeSpec, method: KernelMethod) -> Result<C64> {
    let prop = Propagator::new(hex_spec(spec)?, t, method)?;
    prop.amplitude(a, b)
}

fn hex_spec(spec: &LatticeSpec) -> Result<LatticeSpec> {
    match spec.kind {
        LatticeKind::Hexagonal => Ok(*spec),
        other => Err(Error::Domain(format!("expected a honeycomb spec, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::bz_quadrature_pair;

    #[test]
    fn series_matches_quadrature() {
        let s0 = LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0);
        let s1 = LatticeSpec::with_gap(LatticeKind::Hexagonal, 1.0, 1.0).unwrap();
        let opts = KernelOptions::default();
        let cases = [
            (s0, KernelMethod::GaplessSeries, 2.0),
            (s0, KernelMethod::Operational, 1.5),
            (s1, KernelMethod::Operational, 2.0),
        ];
        for (spec, method, t) in cases {
            let sc = HexScalar::new(&spec, t, method, &opts).unwrap();
            for d in [(0, 0), (1, 1), (2, -1), (-3, 1), (4, 4)] {
                let (q, qt) = bz_quadrature_pair(&spec, d, t, 128).unwrap();
                let (g, gt) = sc.pair(d).unwrap();
                assert!((q - g).norm() < 1e-10, "{method} t={t} {d:?}: {q} vs {g}");
                assert!((qt - gt).norm() < 1e-10, "{method} t={t} {d:?}: dt {qt} vs {gt}");
            }
        }
    }

    #[test]
    fn far_offsets_with_a_larger_shared_table() {
        let s = LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0);
        let opts = KernelOptions::default();
        HexScalar::new(&s, 40.0, KernelMethod::GaplessSeries, &opts).unwrap();
        let sc = HexScalar::new(&s, 0.5, KernelMethod::Operational, &opts).unwrap();
        let (g, _) = sc.pair((60, 0)).unwrap();
        assert!(g.norm() < 1e-30);
    }

    #[test]
    fn gapless_rejects_a_gap() {
        let s = LatticeSpec::with_gap(LatticeKind::Hexagonal, 1.0, 0.5).unwrap();
        assert!(matches!(g_hex((0, 0), 1.0, &s, KernelMethod::GaplessSeries), Err(Error::Unsupported(_))));
    }

    #[test]
    fn short_time_cross_entry() {
        let s = LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0);
        let t = 1e-4;
        let a = SiteIndex::hex(0, 0, Sublattice::A);
        for (b1, b2) in HEX_A_TO_B {
            let b = SiteIndex::hex(b1, b2, Sublattice::B);
            let k = k_hex(&a, &b, t, &s, KernelMethod::GaplessSeries).unwrap();
            assert!((k - C64::new(0.0, -t)).norm() < 1e-7, "{k}");
        }
        let k0 = k_hex(&a, &a, 0.0, &s, KernelMethod::GaplessSeries).unwrap();
        assert!((k0 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn strong_gap_error_scales_cubically() {
        let err = |mu: f64| {
            let s = LatticeSpec::with_gap(LatticeKind::Hexagonal, 1.0, mu).unwrap();
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for i in 0..=10 {
                let t = 0.5 + 0.1 * i as f64;
                let sg = HexScalar::new(&s, t, KernelMethod::StrongGap, &KernelOptions::default()).unwrap();
                for d in [(0, 0), (1, 0), (1, 1), (2, 1), (-2, 1)] {
                    let a = sg.pair(d).unwrap().0;
                    let b = bz_quadrature_pair(&s, d, t, 64).unwrap().0;
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
