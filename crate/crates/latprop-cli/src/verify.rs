//! `verify`: invariant suites reported as JSON lines.

use crate::commands::{algebra_rows, migration_ordering, DEFAULT_MIGRATION_GRID};
use crate::config::RunConfig;
use crate::output::emit_lines;
use crate::{parse, Failure};
use latprop::algebra::{build_operator_suite, check_relations};
use latprop::continuum::light_cone_check;
use latprop::kernels::{density_from, supported_methods, KernelMethod, Propagator};
use latprop::lattice::{LatticeKind, LatticeSpec, SiteIndex, Window};
use latprop::manybody::{
    boson_amplitude, fermion_amplitude, migration_experiment, FermionVariant, OccupationState, Scenario, Statistics,
};
use latprop::oracle::{FockLimits, FockOracle, SpectralOracle, TruncatedLattice};
use latprop::specfun::cq::{cq_fourier, cq_multinomial};
use latprop::{Error, C64};
use serde_json::{json, Value};

pub const SUITES: [&str; 8] =
    ["algebra", "cq", "fermion-adjudication", "boson-fock", "unitarity", "oracle", "causality", "migration"];

/// `all` runs the invariant suites; `migration` checks figure orderings
/// and must be requested by name.
const ALL: usize = 7;

pub const DEFAULT_MAX_Q: usize = 12;
const AMPLITUDE_TOL: f64 = 1e-8;
const CQ_TOL: f64 = 1e-10;
const CAUSALITY_TOL: f64 = 1e-6;
const FOCK_TIMES: [f64; 3] = [0.3, 0.7, 1.5];
const UNITARITY_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const ORACLE_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

fn line(suite: &str, case: impl Into<String>, residual: f64, tolerance: f64) -> Value {
    json!({ "suite": suite, "case": case.into(), "residual": residual, "tolerance": tolerance, "pass": residual <= tolerance })
}

/// Specs exercised per kind: Δ=1, and μ ∈ {0, 1} on two-species lattices.
fn specs() -> Vec<LatticeSpec> {
    LatticeKind::ALL
        .into_iter()
        .flat_map(|k| {
            if k.single_species() {
                vec![LatticeSpec::homogeneous(k, 1.0)]
            } else {
                [0.0, 1.0].iter().map(|&mu| LatticeSpec::with_gap(k, 1.0, mu).expect("valid gap")).collect()
            }
        })
        .collect()
}

fn label(spec: &LatticeSpec, method: KernelMethod) -> String {
    if spec.kind.single_species() {
        format!("{} {}", spec.kind, method)
    } else {
        format!("{} mu={} {}", spec.kind, spec.mu(), method)
    }
}

/// `Ok(None)` when the method does not apply to this spec.
fn maybe<T>(r: latprop::Result<T>) -> Result<Option<T>, Failure> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn algebra_suite(out: &mut Vec<Value>, cfg: &RunConfig) -> Result<(), Failure> {
    let half = cfg.half_width.unwrap_or(crate::commands::DEFAULT_ALGEBRA_HALF_WIDTH);
    for (kind, mu) in [(LatticeKind::Dimer, 1.0), (LatticeKind::Hexagonal, 0.0), (LatticeKind::Hexagonal, 1.0)] {
        let suite = build_operator_suite(LatticeSpec::with_gap(kind, 1.0, mu)?, half)?;
        for row in algebra_rows(&check_relations(&suite), cfg.tolerance) {
            out.push(json!({
                "suite": "algebra",
                "case": format!("{kind} mu={mu} {}", row["relation"].as_str().unwrap_or("")),
                "residual": row["interior"],
                "tolerance": row["tolerance"],
                "pass": row["pass"],
            }));
        }
    }
    Ok(())
}

fn cq_suite(out: &mut Vec<Value>, cfg: &RunConfig) {
    let max_q = cfg.max_q.unwrap_or(DEFAULT_MAX_Q);
    for q in 0..=max_q {
        let qi = q as i64;
        let mut agree = 0.0f64;
        let mut outside = 0.0f64;
        for m in -qi - 2..=qi + 2 {
            for n in -qi - 2..=qi + 2 {
                let a = cq_multinomial(q, m, n);
                if m.abs() <= qi && n.abs() <= qi && (m - n).abs() <= qi {
                    agree = agree.max((a - cq_fourier(q, m, n)).norm());
                } else {
                    outside = outside.max(a.norm());
                }
            }
        }
        out.push(line("cq", format!("q={q} multinomial vs fourier"), agree, CQ_TOL));
        out.push(line("cq", format!("q={q} support outside |m|,|n|,|m-n|<=q"), outside, 0.0));
    }
}

fn monomer_box(sites: i64) -> Result<TruncatedLattice, Failure> {
    let spec = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
    Ok(TruncatedLattice::from_window(spec, Window::new((0, sites - 1), (0, 0)))?)
}

/// Occupation vectors with `n` particles on `m` sites, at most `cap` per site.
fn configurations(m: usize, n: u32, cap: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left.min(cap) {
            cur[i] = k;
            rec(i + 1, left - k, cap, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, n, cap, &mut vec![0; m], &mut out);
    out
}

fn state(stats: Statistics, occ: &[u32]) -> OccupationState {
    let sites = occ.iter().enumerate().map(|(i, &c)| (SiteIndex::at(LatticeKind::Monomer, i as i64, 0), c));
    OccupationState::new(stats, sites).expect("valid occupation")
}

/// Largest |formula − Fock| over all pairs of `n`-particle states.
fn fock_gap(
    trunc: &TruncatedLattice,
    stats: Statistics,
    n: u32,
    t: f64,
    amp: &dyn Fn(&OccupationState, &OccupationState, &latprop::manybody::KernelFn) -> latprop::Result<C64>,
) -> Result<f64, Failure> {
    let fock = FockOracle::new(trunc, stats, n, FockLimits::default())?;
    let spectral = SpectralOracle::new(trunc.clone())?;
    let u = spectral.evolution(t);
    let kernel = |j: &SiteIndex, i: &SiteIndex, _t: f64| -> latprop::Result<C64> {
        let (a, b) = (trunc.index_of(j), trunc.index_of(i));
        match (a, b) {
            (Some(a), Some(b)) => Ok(u[(a, b)]),
            _ => Err(Error::Domain("site outside the box".into())),
        }
    };
    let cap = if stats == Statistics::Fermion { 1 } else { n };
    let confs: Vec<OccupationState> = configurations(trunc.len(), n, cap).iter().map(|c| state(stats, c)).collect();
    let mut worst = 0.0f64;
    for i in &confs {
        for f in &confs {
            let diff = (amp(i, f, &kernel)? - fock.amplitude(i, f, t)?).norm();
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

fn fermion_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    let trunc = monomer_box(6)?;
    let mut worst = [0.0f64; 2];
    let variants = [(FermionVariant::Determinant, "determinant"), (FermionVariant::PairProduct, "product")];
    for t in FOCK_TIMES {
        for (v, (variant, name)) in variants.iter().enumerate() {
            let f = |i: &OccupationState, fin: &OccupationState, k: &latprop::manybody::KernelFn| {
                fermion_amplitude(i, fin, k, t, *variant)
            };
            let gap = fock_gap(&trunc, Statistics::Fermion, 2, t, &f)?;
            worst[v] = worst[v].max(gap);
            out.push(json!({
                "suite": "fermion-adjudication", "case": format!("{name} N=2 sites=6 t={t}"),
                "residual": gap, "tolerance": AMPLITUDE_TOL, "pass": true, "matches": gap <= AMPLITUDE_TOL,
            }));
        }
    }
    let matches: Vec<&str> =
        variants.iter().zip(worst).filter(|(_, w)| *w <= AMPLITUDE_TOL).map(|((_, n), _)| *n).collect();
    let winner = match matches.as_slice() {
        [one] => *one,
        [] => "neither",
        _ => "both",
    };
    out.push(json!({
        "suite": "fermion-adjudication", "case": "winner", "winner": winner,
        "residual": worst[0].min(worst[1]), "tolerance": AMPLITUDE_TOL,
        "pass": matches.len() <= 1,
        "max_residual": { "determinant": worst[0], "product": worst[1] },
    }));
    Ok(())
}

fn boson_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    for sites in [2i64, 4, 6] {
        let trunc = monomer_box(sites)?;
        for n in 1..=4u32 {
            for t in FOCK_TIMES {
                let f = |i: &OccupationState, fin: &OccupationState, k: &latprop::manybody::KernelFn| {
                    boson_amplitude(i, fin, k, t)
                };
                let gap = fock_gap(&trunc, Statistics::Boson, n, t, &f)?;
                out.push(line("boson-fock", format!("N={n} sites={sites} t={t}"), gap, AMPLITUDE_TOL));
            }
        }
    }
    Ok(())
}

fn cone_window(spec: &LatticeSpec, t: f64) -> Result<Window, Failure> {
    let v = latprop::continuum::max_component_speed(spec)?;
    let vt = v * t;
    let half = (vt + 10.0 * vt.cbrt() + 10.0).ceil() as i64;
    Ok(Window::centered(spec.kind, half))
}

fn unitarity_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    for spec in specs() {
        for &method in supported_methods(spec.kind) {
            if !method.is_exact() {
                continue;
            }
            for t in UNITARITY_TIMES {
                let Some(prop) = maybe(Propagator::new(spec, t, method))? else { break };
                let src = SiteIndex::at(spec.kind, 0, 0);
                let window = cone_window(&spec, t)?;
                let total: f64 = density_from(&prop, &src, &window)?.values().sum();
                out.push(line("unitarity", format!("{} t={t}", label(&spec, method)), (total - 1.0).abs(), AMPLITUDE_TOL));
            }
        }
    }
    Ok(())
}

fn oracle_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    for spec in specs() {
        let method = KernelMethod::default_for(&spec);
        for t in ORACLE_TIMES {
            let src = SiteIndex::at(spec.kind, 0, 0);
            let compare = cone_window(&spec, t)?;
            let margin = (2.0 * spec.kind.coordination() as f64 * spec.delta * t).ceil() as i64 + 20;
            let half = margin.max(compare.n1.1 + 2);
            let trunc = TruncatedLattice::from_window(spec, Window::centered(spec.kind, half))?;
            let col = trunc.propagate_column(src, t)?;
            let prop = Propagator::new(spec, t, method)?;
            let mut worst = 0.0f64;
            for (s, v) in prop.column(&src, &compare)? {
                let idx = trunc.index_of(&s).expect("comparison window inside the box");
                worst = worst.max((v - col[idx]).norm());
            }
            let tol = if method == KernelMethod::GaplessSeries { 1e-6 } else { AMPLITUDE_TOL };
            out.push(line("oracle", format!("{} t={t}", label(&spec, method)), worst, tol));
        }
    }
    Ok(())
}

fn causality_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    for spec in specs() {
        let method = KernelMethod::default_for(&spec);
        let r = light_cone_check(&spec, 10.0, method)?;
        out.push(line("causality", format!("{} t=10 radius={:.2}", label(&spec, method), r.radius), r.outside, CAUSALITY_TOL));
    }
    Ok(())
}

fn migration_suite(out: &mut Vec<Value>) -> Result<(), Failure> {
    let grid = parse::time_grid(DEFAULT_MIGRATION_GRID).expect("default grid parses");
    for (scenario, name) in [(Scenario::Boson31To22, "boson peak times"), (Scenario::FermionPairShift, "fermion peak heights")] {
        let curves = migration_experiment(1.0, scenario, &grid)?;
        let ok = migration_ordering(scenario, &curves);
        out.push(json!({
            "suite": "migration", "case": format!("{name} ordered by coordination"),
            "residual": if ok { 0.0 } else { 1.0 }, "tolerance": 0.0, "pass": ok,
            "t_peak": curves.iter().map(|c| (c.coordination, c.t_peak)).collect::<Vec<_>>(),
            "peak": curves.iter().map(|c| (c.coordination, c.peak)).collect::<Vec<_>>(),
        }));
    }
    Ok(())
}

fn run_suite(name: &str, out: &mut Vec<Value>, cfg: &RunConfig) -> Result<(), Failure> {
    match name {
        "algebra" => algebra_suite(out, cfg),
        "cq" => {
            cq_suite(out, cfg);
            Ok(())
        }
        "fermion-adjudication" => fermion_suite(out),
        "boson-fock" => boson_suite(out),
        "unitarity" => unitarity_suite(out),
        "oracle" => oracle_suite(out),
        "causality" => causality_suite(out),
        "migration" => migration_suite(out),
        other => Err(Failure::usage(format!("unknown suite '{other}'; expected all or one of {}", SUITES.join(", ")))),
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let which = cfg.suite.as_deref().unwrap_or("all");
    let names: Vec<&str> = if which == "all" { SUITES[..ALL].to_vec() } else { vec![which] };
    let mut out = Vec::new();
    for n in names {
        run_suite(n, &mut out, cfg)?;
    }
    emit_lines(cfg, &out)?;
    let failed = out.iter().filter(|l| l["pass"] != json!(true)).count();
    if failed > 0 {
        return Err(Failure::verification(format!("{failed} of {} checks failed", out.len())));
    }
    Ok(())
}
