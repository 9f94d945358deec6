//! Subcommand bodies other than `verify`.

use crate::config::RunConfig;
use crate::output::{self, complex_json, emit, header, io_failure, site_json};
use crate::{parse, Failure};
use latprop::algebra::{build_operator_suite_with, check_relations, AlgebraConfig};
use latprop::continuum::{cartesian_momentum, packet_transport_with, reduced_momentum, PacketSpec, HEX_CONE};
use latprop::kernels::{KernelOptions, Propagator, CONE_TOLERANCE};
use latprop::lattice::{LatticeKind, LatticeSpec, SiteIndex, Window};
use latprop::manybody::{
    boson_amplitude, count_s_matrices, fermion_amplitude, migration_experiment, FermionVariant, MigrationCurve,
    OccupationState, Scenario, Statistics,
};
use latprop::oracle::TruncatedLattice;
use latprop::C64;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub const DEFAULT_GRID_HALF_WIDTH: i64 = 20;
pub const DEFAULT_ALGEBRA_HALF_WIDTH: i64 = 32;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;
pub const BLOCH_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SIGMA: f64 = 8.0;
pub const DEFAULT_SAMPLES: usize = 6;
pub const DEFAULT_MIGRATION_GRID: &str = "0:0.025:3";

fn options(cfg: &RunConfig) -> KernelOptions {
    KernelOptions { q_max: cfg.q_max, quadrature_points: cfg.quadrature_points }
}

fn propagator(cfg: &RunConfig, spec: &LatticeSpec, t: f64) -> Result<Propagator, Failure> {
    Ok(Propagator::with_options(*spec, t, cfg.method(spec)?, options(cfg))?)
}

fn source(cfg: &RunConfig, kind: LatticeKind) -> Result<SiteIndex, Failure> {
    match &cfg.source {
        Some(s) => parse::site(kind, s),
        None => Ok(SiteIndex::at(kind, 0, 0)),
    }
}

fn validity(prop: &Propagator) -> Value {
    json!({ "within_validity": prop.within_validity(), "warnings": prop.warnings() })
}

pub fn kernel(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.spec()?;
    let kind = spec.kind;
    let t = cfg.time()?;
    let src = source(cfg, kind)?;
    let dst = match (&cfg.target, &cfg.dn) {
        (Some(_), Some(_)) => return Err(Failure::usage("give either --target or --dn, not both")),
        (Some(s), None) => parse::site(kind, s)?,
        (None, Some(d)) => parse::offset(kind, &src, d)?,
        (None, None) => src,
    };
    let prop = propagator(cfg, &spec, t)?;
    let k = prop.amplitude(&dst, &src)?;

    let mut rec = header("kernel", &spec);
    rec.insert("method".into(), json!(prop.method().name()));
    rec.insert("t".into(), json!(t));
    rec.insert("source".into(), site_json(&src));
    rec.insert("target".into(), site_json(&dst));
    rec.insert("re".into(), json!(k.re));
    rec.insert("im".into(), json!(k.im));
    rec.insert("abs2".into(), json!(k.norm_sqr()));
    rec.insert("validity_flags".into(), validity(&prop));

    let mut oracle_fail = None;
    if RunConfig::flag(cfg.check_oracle) {
        let tol = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        let reach = (dst.n1 - src.n1).abs().max((dst.n2 - src.n2).abs());
        let half = (2.0 * kind.coordination() as f64 * spec.delta * t).ceil() as i64 + 22 + reach;
        let trunc = TruncatedLattice::from_window(spec, Window::around(kind, src, half))?;
        let col = trunc.propagate_column(src, t)?;
        let idx = trunc.index_of(&dst).expect("target lies inside the oracle box");
        let diff = (col[idx] - k).norm();
        rec.insert("oracle".into(), json!({ "re": col[idx].re, "im": col[idx].im, "diff": diff, "tolerance": tol, "half_width": half }));
        if !(diff <= tol) {
            oracle_fail = Some(format!("kernel differs from the oracle by {diff:.3e} (tolerance {tol:.0e})"));
        }
    }
    emit(cfg, &Value::Object(rec))?;
    match oracle_fail {
        Some(msg) => Err(Failure::accuracy(msg)),
        None => Ok(()),
    }
}

/// `dir/stem-t{t}.ext` for multi-time grids.
fn per_time_path(base: &Path, t: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-t{t}.{ext}"),
        None => format!("{stem}-t{t}"),
    };
    base.with_file_name(name)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
    csv.with_file_name(format!("{stem}.summary.json"))
}

pub fn grid(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.spec()?;
    let kind = spec.kind;
    let times = cfg.times()?;
    let src = source(cfg, kind)?;
    let half = cfg.half_width.unwrap_or(DEFAULT_GRID_HALF_WIDTH);
    if half < 1 {
        return Err(Failure::usage("--half-width must be positive"));
    }
    let window = Window::around(kind, src, half);
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if times.len() > 1 && cfg.output.is_none() {
        return Err(Failure::usage("several grid times need --output"));
    }

    let mut failure = None;
    for &t in &times {
        let prop = propagator(cfg, &spec, t)?;
        let mut rows = prop.column(&src, &window)?;
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let edge = rows
            .iter()
            .filter(|(s, _)| window.on_boundary(s, kind))
            .map(|(_, v)| v.norm_sqr())
            .fold(0.0, f64::max);
        if edge > CONE_TOLERANCE {
            return Err(Failure::accuracy(format!(
                "boundary density {edge:.3e} at t={t} exceeds {CONE_TOLERANCE:.0e}; enlarge --half-width"
            )));
        }
        let total: f64 = rows.iter().map(|(_, v)| v.norm_sqr()).sum();

        let mut summary = header("grid", &spec);
        summary.insert("method".into(), json!(prop.method().name()));
        summary.insert("t".into(), json!(t));
        summary.insert("source".into(), site_json(&src));
        summary.insert("half_width".into(), json!(half));
        summary.insert("rows".into(), json!(rows.len()));
        summary.insert("total_probability".into(), json!(total));
        summary.insert("boundary_max".into(), json!(edge));
        summary.insert("tolerance".into(), json!(tol));
        summary.insert("validity_flags".into(), validity(&prop));
        let summary = serde_json::to_string_pretty(&Value::Object(summary)).expect("record serializes");

        match &cfg.output {
            Some(p) => {
                let base = PathBuf::from(p);
                let path = if times.len() > 1 { per_time_path(&base, t) } else { base };
                let mut csv = Vec::new();
                output::grid_csv(&mut csv, &rows).map_err(|e| io_failure(&path, e))?;
                output::write_file(&path, csv)?;
                output::write_file(&sidecar_path(&path), summary + "\n")?;
            }
            None => {
                output::grid_csv(std::io::stdout().lock(), &rows).map_err(|e| io_failure(Path::new("<stdout>"), e))?;
                eprintln!("{summary}");
            }
        }
        if !((total - 1.0).abs() <= tol) && failure.is_none() {
            failure = Some(format!("total probability {total} at t={t} deviates from 1 by more than {tol:.0e}"));
        }
    }
    match failure {
        Some(msg) => Err(Failure::accuracy(msg)),
        None => Ok(()),
    }
}

fn statistics(cfg: &RunConfig) -> Result<Statistics, Failure> {
    match cfg.statistics.as_deref().unwrap_or("boson").to_ascii_lowercase().as_str() {
        "boson" | "bosons" => Ok(Statistics::Boson),
        "fermion" | "fermions" => Ok(Statistics::Fermion),
        other => Err(Failure::usage(format!("unknown statistics '{other}'"))),
    }
}

fn variant(cfg: &RunConfig) -> Result<FermionVariant, Failure> {
    match cfg.variant.as_deref().unwrap_or("determinant").to_ascii_lowercase().as_str() {
        "determinant" | "det" => Ok(FermionVariant::Determinant),
        "product" => Ok(FermionVariant::PairProduct),
        other => Err(Failure::usage(format!("unknown fermion variant '{other}'"))),
    }
}

fn occupation_json(o: &OccupationState) -> Value {
    Value::Array(
        o.occupied()
            .map(|(s, n)| {
                let mut v = site_json(&s);
                v["count"] = json!(n);
                v
            })
            .collect(),
    )
}

pub fn amplitude(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.spec()?;
    let kind = spec.kind;
    let t = cfg.time()?;
    let stats = statistics(cfg)?;
    let initial = parse::occupations(kind, stats, cfg.initial.as_deref().ok_or_else(|| Failure::usage("--initial is required"))?)?;
    let final_ = parse::occupations(kind, stats, cfg.final_.as_deref().ok_or_else(|| Failure::usage("--final is required"))?)?;
    let mismatch = initial.total() != final_.total();
    if mismatch && RunConfig::flag(cfg.strict) {
        return Err(Failure::usage(format!(
            "particle numbers differ: {} initial, {} final",
            initial.total(),
            final_.total()
        )));
    }
    let prop = propagator(cfg, &spec, t)?;
    let kernel = |a: &SiteIndex, b: &SiteIndex, _t: f64| prop.amplitude(a, b);
    let (amp, variant_name, count): (C64, &str, u128) = match stats {
        Statistics::Boson => {
            let n: Vec<u32> = initial.occupied().map(|(_, c)| c).collect();
            let m: Vec<u32> = final_.occupied().map(|(_, c)| c).collect();
            let count = if mismatch { 0 } else { count_s_matrices(&n, &m) };
            (boson_amplitude(&initial, &final_, &kernel, t)?, "s-matrix-sum", count)
        }
        Statistics::Fermion => {
            let v = variant(cfg)?;
            let n = initial.total() as u128;
            let count = match (mismatch, v) {
                (true, _) => 0,
                (false, FermionVariant::PairProduct) => 1,
                (false, FermionVariant::Determinant) => (1..=n).product(),
            };
            let name = if v == FermionVariant::PairProduct { "product" } else { "determinant" };
            (fermion_amplitude(&initial, &final_, &kernel, t, v)?, name, count)
        }
    };

    let mut rec = header("amplitude", &spec);
    rec.insert("method".into(), json!(prop.method().name()));
    rec.insert("t".into(), json!(t));
    rec.insert("statistics".into(), json!(if stats == Statistics::Boson { "boson" } else { "fermion" }));
    rec.insert("variant".into(), json!(variant_name));
    rec.insert("initial".into(), occupation_json(&initial));
    rec.insert("final".into(), occupation_json(&final_));
    rec.insert("amplitude".into(), complex_json(amp));
    rec.insert("abs2".into(), json!(amp.norm_sqr()));
    rec.insert("enumeration_count".into(), json!(count));
    if mismatch {
        rec.insert("note".into(), json!("particle numbers differ; the amplitude vanishes"));
    }
    rec.insert("validity_flags".into(), validity(&prop));
    emit(cfg, &Value::Object(rec))
}

/// Peak times must fall with coordination for bosons; peak probabilities
/// must fall with coordination for fermions.
pub fn migration_ordering(scenario: Scenario, curves: &[MigrationCurve]) -> bool {
    let mut by_c: Vec<&MigrationCurve> = curves.iter().collect();
    by_c.sort_by_key(|c| c.coordination);
    by_c.windows(2).all(|w| match scenario {
        Scenario::Boson31To22 => w[1].t_peak < w[0].t_peak,
        Scenario::FermionPairShift => w[1].peak < w[0].peak,
    })
}

pub fn migrate(cfg: &RunConfig) -> Result<(), Failure> {
    let scenario: Scenario = cfg.scenario.as_deref().unwrap_or("boson").parse()?;
    let delta = cfg.delta.unwrap_or(1.0);
    let grid = match &cfg.t_grid {
        Some(g) => g.0.clone(),
        None => parse::time_grid(DEFAULT_MIGRATION_GRID).expect("default grid parses"),
    };
    let curves = migration_experiment(delta, scenario, &grid)?;
    let ordered = migration_ordering(scenario, &curves);
    let scenario_name = match scenario {
        Scenario::Boson31To22 => "boson-3-1-to-2-2",
        Scenario::FermionPairShift => "fermion-pair-shift",
    };

    if cfg.format.as_deref() == Some("csv") {
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let csv_err = |e: csv::Error| Failure::usage(format!("csv: {e}"));
            w.write_record(["lattice", "coordination", "t", "probability", "normalized"]).map_err(csv_err)?;
            for c in &curves {
                for ((t, p), q) in c.samples.iter().zip(&c.normalized) {
                    w.write_record([
                        c.kind.name().to_string(),
                        c.coordination.to_string(),
                        output::num(*t),
                        output::num(*p),
                        output::num(*q),
                    ])
                    .map_err(csv_err)?;
                }
            }
            w.flush().map_err(|e| Failure::usage(format!("csv: {e}")))?;
        }
        return match &cfg.output {
            Some(p) => output::write_file(Path::new(p), buf),
            None => {
                print!("{}", String::from_utf8(buf).expect("csv is utf-8"));
                Ok(())
            }
        };
    }

    let curves_json: Vec<Value> = curves
        .iter()
        .map(|c| {
            json!({
                "lattice": c.kind.name(),
                "coordination": c.coordination,
                "t_peak": c.t_peak,
                "peak": c.peak,
                "t": c.samples.iter().map(|s| s.0).collect::<Vec<_>>(),
                "probability": c.samples.iter().map(|s| s.1).collect::<Vec<_>>(),
                "normalized": c.normalized,
            })
        })
        .collect();
    let rec = json!({
        "schema_version": crate::config::SCHEMA_VERSION,
        "command": "migrate",
        "scenario": scenario_name,
        "delta": delta,
        "ordering_holds": ordered,
        "ordering": match scenario {
            Scenario::Boson31To22 => "t_peak decreases with coordination",
            Scenario::FermionPairShift => "peak probability decreases with coordination",
        },
        "curves": curves_json,
    });
    emit(cfg, &rec)
}

pub fn algebra(cfg: &RunConfig) -> Result<(), Failure> {
    let mut cfg = cfg.clone();
    if cfg.lattice.is_none() {
        cfg.lattice = Some("dimer".into());
    }
    let spec = cfg.spec()?;
    let half = cfg.half_width.unwrap_or(DEFAULT_ALGEBRA_HALF_WIDTH);
    let suite = build_operator_suite_with(spec, half, AlgebraConfig { alpha1: cfg.alpha1.unwrap_or(0) })?;
    let report = check_relations(&suite);
    let rows = algebra_rows(&report, cfg.tolerance);
    let failed = rows.iter().filter(|r| r["pass"] == json!(false)).count();

    let mut rec = header("algebra", &spec);
    rec.insert("half_width".into(), json!(half));
    rec.insert("alpha1".into(), json!(suite.config.alpha1));
    rec.insert("dimension".into(), json!(suite.dim()));
    rec.insert("interior_rows".into(), json!(report.interior_rows));
    rec.insert("edge_rows".into(), json!(report.edge_rows));
    rec.insert("max_interior".into(), json!(report.max_interior()));
    rec.insert("relations".into(), Value::Array(rows));
    rec.insert("pass".into(), json!(failed == 0));
    emit(&cfg, &Value::Object(rec))?;
    if failed > 0 {
        return Err(Failure::verification(format!("{failed} relations exceed tolerance")));
    }
    Ok(())
}

/// Per-relation rows; Bloch checks carry no edge residual and get the
/// looser plane-wave tolerance.
pub fn algebra_rows(report: &latprop::algebra::RelationReport, tol: Option<f64>) -> Vec<Value> {
    report
        .relations
        .iter()
        .map(|r| {
            let bloch = r.edge.is_nan();
            let tol = tol.unwrap_or(if bloch { BLOCH_TOLERANCE } else { ALGEBRA_TOLERANCE });
            json!({
                "relation": r.name,
                "interior": r.interior,
                "edge": if bloch { Value::Null } else { json!(r.edge) },
                "tolerance": tol,
                "pass": r.interior <= tol,
            })
        })
        .collect()
}

/// Carrier from --k0, or from --cone-offset around the conical point.
fn carrier(cfg: &RunConfig, spec: &LatticeSpec) -> Result<Vec<f64>, Failure> {
    let kind = spec.kind;
    match (&cfg.k0, &cfg.cone_offset) {
        (Some(_), Some(_)) => Err(Failure::usage("give either --k0 or --cone-offset, not both")),
        (Some(k), None) => Ok(k.clone()),
        (None, Some(off)) => match (kind, off.as_slice()) {
            (LatticeKind::Dimer, [q]) => Ok(vec![std::f64::consts::FRAC_PI_2 + q]),
            (LatticeKind::Hexagonal, [q, deg]) => {
                let c = cartesian_momentum(kind, &HEX_CONE);
                let th = deg.to_radians();
                Ok(reduced_momentum(kind, [c[0] + q * th.cos(), c[1] + q * th.sin()]))
            }
            (LatticeKind::Dimer | LatticeKind::Hexagonal, _) => {
                Err(Failure::usage("--cone-offset is 'q' on the dimer and 'q,degrees' on the honeycomb"))
            }
            _ => Err(Failure { code: 3, msg: format!("{kind} has no conical point") }),
        },
        (None, None) => Err(Failure::usage("--k0 or --cone-offset is required")),
    }
}

pub fn transport(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.spec()?;
    let t = cfg.time()?;
    let k0 = carrier(cfg, &spec)?;
    let packet = PacketSpec {
        k0: k0.clone(),
        sigma: cfg.sigma.unwrap_or(DEFAULT_SIGMA),
        center: source(cfg, spec.kind)?,
    };
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let method = cfg.method(&spec)?;
    let r = packet_transport_with(&spec, &packet, t, samples, method)?;
    let rel = if r.expected.speed > 0.0 { (r.speed - r.expected.speed).abs() / r.expected.speed } else { f64::NAN };

    let mut rec = header("transport", &spec);
    rec.insert("method".into(), json!(method.name()));
    rec.insert("t".into(), json!(t));
    rec.insert("k0".into(), json!(k0));
    rec.insert("sigma".into(), json!(packet.sigma));
    rec.insert("times".into(), json!(r.times));
    rec.insert("center_of_mass".into(), json!(r.center_of_mass));
    rec.insert("velocity".into(), json!(r.velocity));
    rec.insert("speed".into(), json!(r.speed));
    rec.insert("expected_velocity".into(), json!(r.expected.velocity));
    rec.insert("expected_speed".into(), json!(r.expected.speed));
    rec.insert("degenerate_cone".into(), json!(r.expected.degenerate));
    rec.insert("relative_error".into(), if rel.is_nan() { Value::Null } else { json!(rel) });
    rec.insert("fidelity".into(), json!(r.fidelity));
    rec.insert("min_norm".into(), json!(r.min_norm));
    if let Some(tol) = cfg.tolerance {
        rec.insert("tolerance".into(), json!(tol));
    }
    emit(cfg, &Value::Object(rec))?;
    match cfg.tolerance {
        Some(tol) if !(rel <= tol) => Err(Failure::verification(format!("speed error {rel:.3e} exceeds {tol}"))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_time_names() {
        assert_eq!(per_time_path(Path::new("out/g.csv"), 1.5), PathBuf::from("out/g-t1.5.csv"));
        assert_eq!(sidecar_path(Path::new("out/g-t2.csv")), PathBuf::from("out/g-t2.summary.json"));
    }

    #[test]
    fn hex_cone_offset_lands_near_the_cone() {
        let cfg = RunConfig { lattice: Some("hexagonal".into()), cone_offset: Some(vec![0.0, 30.0]), ..Default::default() };
        let spec = cfg.spec().unwrap();
        let k = carrier(&cfg, &spec).unwrap();
        assert!((k[0] - HEX_CONE[0]).abs() < 1e-12 && (k[1] - HEX_CONE[1]).abs() < 1e-12);
    }
}
