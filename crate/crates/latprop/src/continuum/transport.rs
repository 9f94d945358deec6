//! Wave-packet transport with the lattice kernels.
//!
//! Packets are Gaussian superpositions of upper-band Bloch vectors, so each
//! one lives in a single band and its centre of mass moves at the
//! band-averaged group velocity.

use super::velocity::{cartesian_momentum, group_velocity, max_component_speed, site_position, GroupVelocity};
use crate::kernels::{KernelMethod, Propagator};
use crate::lattice::{LatticeKind, LatticeSpec, SiteIndex, Sublattice, HEX_A_TO_B};
use crate::{Error, Result, C64};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    /// Carrier in reduced coordinates (per site for chains).
    pub k0: Vec<f64>,
    /// Standard deviation of |ψ|² along each axis, in units of the
    /// nearest-neighbour distance.
    pub sigma: f64,
    pub center: SiteIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub times: Vec<f64>,
    pub center_of_mass: Vec<[f64; 2]>,
    /// Least-squares slope of the centre of mass.
    pub velocity: [f64; 2],
    pub speed: f64,
    pub expected: GroupVelocity,
    /// Overlap of |ψ(t)| with the initial envelope moved rigidly by the
    /// measured displacement, at the final time.
    pub fidelity: f64,
    /// Smallest retained norm over the samples.
    pub min_norm: f64,
}

const SOURCE_RADIUS: f64 = 7.5;

fn sublattice_count(kind: LatticeKind) -> Result<usize> {
    match kind {
        LatticeKind::Dimer | LatticeKind::Hexagonal => Ok(2),
        LatticeKind::SquareRowAlternating => Err(Error::Unsupported("packet transport needs a translation-invariant cell".into())),
        _ => Ok(1),
    }
}

/// Site of sublattice `s` in cell `c` (dimer cells hold sites 2c, 2c+1).
fn cell_site(kind: LatticeKind, c: (i64, i64), s: usize) -> SiteIndex {
    match kind {
        LatticeKind::Dimer => SiteIndex::at(kind, 2 * c.0 + s as i64, 0),
        LatticeKind::Hexagonal => SiteIndex::hex(c.0, c.1, if s == 0 { Sublattice::A } else { Sublattice::B }),
        _ => SiteIndex::new(c.0, if kind.dim() == 1 { 0 } else { c.1 }, None),
    }
}

fn site_cell(kind: LatticeKind, site: &SiteIndex) -> ((i64, i64), usize) {
    match kind {
        LatticeKind::Dimer => ((site.n1.div_euclid(2), 0), site.n1.rem_euclid(2) as usize),
        LatticeKind::Hexagonal => ((site.n1, site.n2), usize::from(site.sub == Some(Sublattice::B))),
        _ => ((site.n1, site.n2), 0),
    }
}

/// Upper eigenvector of [[μ, w], [w*, −μ]].
fn upper_spinor(mu: f64, w: C64) -> [C64; 2] {
    let lam = (mu * mu + w.norm_sqr()).sqrt();
    let a = [w, C64::new(lam - mu, 0.0)];
    let b = [C64::new(lam + mu, 0.0), w.conj()];
    let na = a[0].norm_sqr() + a[1].norm_sqr();
    let nb = b[0].norm_sqr() + b[1].norm_sqr();
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    if n == 0.0 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    let s = n.sqrt();
    [v[0] / s, v[1] / s]
}

/// Bloch amplitude of the upper band at `site` for reduced momentum `k`,
/// with phases measured from the cell `origin`.
fn bloch(spec: &LatticeSpec, k: &[f64], site: &SiteIndex, origin: &SiteIndex) -> C64 {
    let kind = spec.kind;
    match kind {
        LatticeKind::Dimer => {
            let u = upper_spinor(spec.mu(), C64::new(2.0 * spec.delta * k[0].cos(), 0.0));
            let s = site.n1.rem_euclid(2) as usize;
            u[s] * C64::from_polar(1.0, k[0] * (site.n1 - origin.n1) as f64)
        }
        LatticeKind::Hexagonal => {
            let f: C64 = HEX_A_TO_B.iter().map(|b| C64::from_polar(1.0, k[0] * b.0 as f64 + k[1] * b.1 as f64)).sum();
            let u = upper_spinor(spec.mu(), spec.delta * f);
            let s = usize::from(site.sub == Some(Sublattice::B));
            u[s] * C64::from_polar(1.0, k[0] * (site.n1 - origin.n1) as f64 + k[1] * (site.n2 - origin.n2) as f64)
        }
        _ => {
            let mut ph = k[0] * (site.n1 - origin.n1) as f64;
            if kind.dim() == 2 {
                ph += k[1] * (site.n2 - origin.n2) as f64;
            }
            C64::from_polar(1.0, ph)
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sites whose position lies within `radius` of `center`.
fn disc(kind: LatticeKind, center: &SiteIndex, radius: f64) -> Vec<SiteIndex> {
    let ns = sublattice_count(kind).unwrap_or(1);
    let c0 = site_position(kind, center);
    let (cc, _) = site_cell(kind, center);
    let shrink = if matches!(kind, LatticeKind::Triangular | LatticeKind::Hexagonal) { 0.5 * 3f64.sqrt() } else { 1.0 };
    let len = super::velocity::lattice_vectors(kind)[0][0].max(if kind == LatticeKind::Dimer { 2.0 } else { 1.0 });
    let half = (radius / (len * shrink)).ceil() as i64 + 2;
    let n2 = if kind.dim() == 1 { 0 } else { half };
    let mut out = Vec::new();
    for d1 in -half..=half {
        for d2 in -n2..=n2 {
            for s in 0..ns {
                let site = cell_site(kind, (cc.0 + d1, cc.1 + d2), s);
                if dist(site_position(kind, &site), c0) <= radius {
                    out.push(site);
                }
            }
        }
    }
    out
}

/// Initial packet on `sites`: Σ_k g(k) Bloch(k) with a Gaussian g around k₀
/// sampled finely enough that its periodic images lie beyond `reach`.
fn initial_packet(spec: &LatticeSpec, packet: &PacketSpec, sites: &[SiteIndex], reach: f64) -> Vec<C64> {
    let kind = spec.kind;
    let k0 = cartesian_momentum(kind, &packet.k0);
    let dk = std::f64::consts::PI / (1.2 * reach);
    let m = (4.8 / (packet.sigma * dk)).ceil() as i64;
    let m2 = if kind.dim() == 1 { 0 } else { m };
    let a = super::velocity::lattice_vectors(kind);
    let mut ks = Vec::new();
    for i in -m..=m {
        for j in -m2..=m2 {
            let q = [i as f64 * dk, j as f64 * dk];
            let g = (-(packet.sigma * packet.sigma) * (q[0] * q[0] + q[1] * q[1])).exp();
            let kc = [k0[0] + q[0], k0[1] + q[1]];
            let kr: Vec<f64> = if kind.dim() == 1 {
                vec![kc[0]]
            } else {
                a.iter().map(|ai| kc[0] * ai[0] + kc[1] * ai[1]).collect()
            };
            ks.push((g, kr));
        }
    }
    let mut psi: Vec<C64> = sites
        .par_iter()
        .map(|s| ks.iter().map(|(g, k)| *g * bloch(spec, k, s, &packet.center)).sum())
        .collect();
    let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);
    psi
}

/// Kernel entries T_{s s'}(d) = K(cell d sub s, cell 0 sub s') above a
/// negligible floor, over cell offsets |d_i| ≤ half.
fn kernel_table(prop: &Propagator, ns: usize, half: i64) -> Result<Vec<Vec<Vec<((i64, i64), C64)>>>> {
    let kind = prop.spec().kind;
    let h2 = if kind.dim() == 1 { 0 } else { half };
    let mut table = vec![vec![Vec::new(); ns]; ns];
    for (s, row) in table.iter_mut().enumerate() {
        for (sp, entries) in row.iter_mut().enumerate() {
            let src = cell_site(kind, (0, 0), sp);
            let offs: Vec<(i64, i64)> = (-half..=half).flat_map(|a| (-h2..=h2).map(move |b| (a, b))).collect();
            let vals: Result<Vec<_>> =
                offs.par_iter().map(|&d| prop.amplitude(&cell_site(kind, d, s), &src).map(|v| (d, v))).collect();
            *entries = vals?.into_iter().filter(|(_, v)| v.norm() > 1e-16).collect();
        }
    }
    Ok(table)
}

fn center_of_mass(kind: LatticeKind, sites: &[SiteIndex], psi: &[C64]) -> ([f64; 2], f64) {
    let mut w = 0.0;
    let mut c = [0.0; 2];
    for (s, v) in sites.iter().zip(psi) {
        let p = site_position(kind, s);
        let n = v.norm_sqr();
        w += n;
        c[0] += n * p[0];
        c[1] += n * p[1];
    }
    ([c[0] / w, c[1] / w], w)
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Evolves the packet to `t` with six equally spaced samples and the
/// default kernel method.
pub fn packet_transport_test(spec: &LatticeSpec, packet: &PacketSpec, t: f64) -> Result<TransportResult> {
    packet_transport_with(spec, packet, t, 6, KernelMethod::default_for(spec))
}

pub fn packet_transport_with(
    spec: &LatticeSpec,
    packet: &PacketSpec,
    t: f64,
    samples: usize,
    method: KernelMethod,
) -> Result<TransportResult> {
    let kind = spec.kind;
    crate::error::ensure_forward(t)?;
    let ns = sublattice_count(kind)?;
    packet.center.validate(kind)?;
    if packet.k0.len() != kind.dim() {
        return Err(Error::Domain(format!("{kind} needs a {}-component carrier", kind.dim())));
    }
    if !(packet.sigma >= 4.0) {
        return Err(Error::Domain(format!("packet width must be at least 4 sites, got {}", packet.sigma)));
    }
    if samples < 5 || !(t > 0.0) {
        return Err(Error::Domain("transport needs t > 0 and at least five samples".into()));
    }
    let expected = group_velocity(spec, &packet.k0)?;

    // vc counts sites per unit time for chains and cells for the rest
    let vc = max_component_speed(spec)?;
    let reach = vc * t + 10.0 * (vc * t).cbrt() + 10.0;
    let half = (if kind == LatticeKind::Dimer { reach / 2.0 } else { reach }).ceil() as i64 + 1;
    let a_len = super::velocity::lattice_vectors(kind)[0][0];
    let v_bound = vc * a_len * kind.dim() as f64;

    let r_src = SOURCE_RADIUS * packet.sigma;
    let r_out = r_src + v_bound * t + 15.0;
    let sources = disc(kind, &packet.center, r_src);
    let targets = disc(kind, &packet.center, r_out);
    let psi0 = initial_packet(spec, packet, &sources, r_out);

    // dense source array over the cell box
    let cells: Vec<(i64, i64)> = sources.iter().map(|s| site_cell(kind, s).0).collect();
    let lo = (cells.iter().map(|c| c.0).min().unwrap(), cells.iter().map(|c| c.1).min().unwrap());
    let hi = (cells.iter().map(|c| c.0).max().unwrap(), cells.iter().map(|c| c.1).max().unwrap());
    let w2 = (hi.1 - lo.1 + 1) as usize;
    let w1 = (hi.0 - lo.0 + 1) as usize;
    let mut dense = vec![C64::new(0.0, 0.0); w1 * w2 * ns];
    for (s, v) in sources.iter().zip(&psi0) {
        let (c, sub) = site_cell(kind, s);
        dense[(((c.0 - lo.0) as usize) * w2 + (c.1 - lo.1) as usize) * ns + sub] = *v;
    }
    let fetch = |c: (i64, i64), sub: usize| -> C64 {
        if c.0 < lo.0 || c.0 > hi.0 || c.1 < lo.1 || c.1 > hi.1 {
            return C64::new(0.0, 0.0);
        }
        dense[(((c.0 - lo.0) as usize) * w2 + (c.1 - lo.1) as usize) * ns + sub]
    };

    let times: Vec<f64> = (0..samples).map(|j| t * j as f64 / (samples - 1) as f64).collect();
    let (c0, _) = center_of_mass(kind, &sources, &psi0);
    let mut com = vec![c0];
    let mut min_norm: f64 = 1.0;
    let mut last = Vec::new();
    for &tj in &times[1..] {
        let prop = Propagator::new(*spec, tj, method)?;
        let table = kernel_table(&prop, ns, half)?;
        let psi: Vec<C64> = targets
            .par_iter()
            .map(|x| {
                let (c, s) = site_cell(kind, x);
                let mut acc = C64::new(0.0, 0.0);
                for (sp, entries) in table[s].iter().enumerate() {
                    for &(d, k) in entries {
                        acc += k * fetch((c.0 - d.0, c.1 - d.1), sp);
                    }
                }
                acc
            })
            .collect();
        let (c, norm) = center_of_mass(kind, &targets, &psi);
        com.push(c);
        min_norm = min_norm.min(norm);
        last = psi;
    }
    if (1.0 - min_norm).abs() > 1e-6 {
        return Err(Error::Cone(format!("packet window retains only {min_norm:.9} of the norm")));
    }
    let velocity = [
        slope(&times, &com.iter().map(|c| c[0]).collect::<Vec<_>>()),
        slope(&times, &com.iter().map(|c| c[1]).collect::<Vec<_>>()),
    ];

    let shift = [com[samples - 1][0] - c0[0], com[samples - 1][1] - c0[1]];
    let p0 = site_position(kind, &packet.center);
    let u0: Vec<f64> = (0..ns).map(|s| bloch(spec, &packet.k0, &cell_site(kind, (0, 0), s), &cell_site(kind, (0, 0), 0)).norm()).collect();
    let mut overlap = 0.0;
    let mut ref_norm = 0.0;
    let mut psi_norm = 0.0;
    for (x, v) in targets.iter().zip(&last) {
        let p = site_position(kind, x);
        let r2 = (p[0] - p0[0] - shift[0]).powi(2) + (p[1] - p0[1] - shift[1]).powi(2);
        let env = (-r2 / (4.0 * packet.sigma * packet.sigma)).exp() * u0[site_cell(kind, x).1];
        overlap += env * v.norm();
        ref_norm += env * env;
        psi_norm += v.norm_sqr();
    }
    let fidelity = overlap * overlap / (ref_norm * psi_norm);

    Ok(TransportResult {
        times,
        center_of_mass: com,
        velocity,
        speed: velocity[0].hypot(velocity[1]),
        expected,
        fidelity,
        min_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn mono(k0: f64) -> TransportResult {
        let spec = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let p = PacketSpec { k0: vec![k0], sigma: 8.0, center: SiteIndex::new(0, 0, None) };
        packet_transport_test(&spec, &p, 5.0).unwrap()
    }

    #[test]
    fn monomer_packet_moves_at_twice_the_hopping() {
        let r = mono(FRAC_PI_2);
        assert!((r.velocity[0] + 2.0).abs() < 0.02, "{:?}", r.velocity);
        assert!(r.fidelity >= 0.99, "{}", r.fidelity);
        assert!((r.min_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn carrier_reversal_and_gauge_shift() {
        // i^n multiplies a carrier-0 packet into a carrier-π/2 one
        let still = mono(0.0);
        let back = mono(-FRAC_PI_2);
        assert!(still.velocity[0].abs() < 1e-6);
        assert!((back.velocity[0] - 2.0).abs() < 0.02);
    }

    #[test]
    fn gapped_dimer_packets() {
        let spec = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, 1.0).unwrap();
        let at_cone = PacketSpec { k0: vec![FRAC_PI_2], sigma: 16.0, center: SiteIndex::at(LatticeKind::Dimer, 0, 0) };
        let r = packet_transport_test(&spec, &at_cone, 10.0).unwrap();
        assert!(r.velocity[0].abs() < 0.05, "{:?}", r.velocity);
        let off = PacketSpec { k0: vec![FRAC_PI_2 - 0.5], ..at_cone };
        let r = packet_transport_test(&spec, &off, 10.0).unwrap();
        let want = r.expected.velocity[0];
        assert!(((r.velocity[0] - want) / want).abs() < 0.02, "{:?} vs {want}", r.velocity);
    }

    #[test]
    fn rejects_narrow_packets() {
        let spec = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let p = PacketSpec { k0: vec![0.0], sigma: 2.0, center: SiteIndex::new(0, 0, None) };
        assert!(matches!(packet_transport_test(&spec, &p, 1.0), Err(Error::Domain(_))));
    }
}
