//! Ladder operators, sublattice shifts, supercharges and lattice Dirac
//! matrices on a truncated two-sublattice box, with residual checks of
//! their algebra.
//!
//! With α_i the A→B displacements and α₁ a chosen one of them:
//! τ₊ = Σ_A |A⟩⟨A+α₁|, τ₋ = τ₊†, τ₃ = P_A − P_B,
//! p₋ = Σ_s Σ_i |s⟩⟨s+α_i−α₁| (same sublattice), p₊ = p₋†,
//! Q₊ = Δτ₊p₋, Q₋ = Δτ₋p₊, and H = Q₊ + Q₋ + μτ₃ + E0.

mod sparse;

pub use sparse::SparseOp;

use crate::lattice::{LatticeKind, LatticeSpec, SiteIndex, Sublattice, HEX_A_TO_B};
use crate::oracle::TruncatedLattice;
use crate::{Error, Result, C64};
use std::collections::BTreeMap;

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraConfig {
    /// Index of α₁ among the A→B displacements (see [`inter_sublattice_vectors`]).
    pub alpha1: usize,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        Self { alpha1: 0 }
    }
}

/// A→B displacements in cell units: the dimer uses site units along the
/// chain ordered (−1, +1), the honeycomb uses [`HEX_A_TO_B`].
pub fn inter_sublattice_vectors(kind: LatticeKind) -> Result<Vec<(i64, i64)>> {
    match kind {
        LatticeKind::Dimer => Ok(vec![(-1, 0), (1, 0)]),
        LatticeKind::Hexagonal => Ok(HEX_A_TO_B.to_vec()),
        other => Err(Error::Domain(format!("operator algebra needs a two-sublattice lattice, got {other}"))),
    }
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub label: &'static str,
    pub matrix: SparseOp,
}

#[derive(Debug, Clone)]
pub struct OperatorSuite {
    pub spec: LatticeSpec,
    pub half_width: i64,
    pub config: AlgebraConfig,
    sites: Vec<SiteIndex>,
    interior: Vec<bool>,
    operators: Vec<OperatorMatrix>,
    lattice_h: SparseOp,
}

impl OperatorSuite {
    pub fn get(&self, label: &str) -> &SparseOp {
        self.operators
            .iter()
            .find(|o| o.label == label)
            .map(|o| &o.matrix)
            .unwrap_or_else(|| panic!("no operator labelled {label}"))
    }

    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }

    pub fn sites(&self) -> &[SiteIndex] {
        &self.sites
    }

    /// Rows far enough from the box faces for every product in the checks
    /// to see complete neighbourhoods.
    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }
}

fn displace(kind: LatticeKind, s: &SiteIndex, d: (i64, i64), sub: Sublattice) -> SiteIndex {
    match kind {
        LatticeKind::Dimer => SiteIndex::at(kind, s.n1 + d.0, 0),
        _ => SiteIndex::hex(s.n1 + d.0, s.n2 + d.1, sub),
    }
}

/// Margin (in cells along each axis) that keeps the longest product used
/// by [`check_relations`] inside the box.
fn interior_margin(kind: LatticeKind) -> i64 {
    match kind {
        LatticeKind::Dimer => 6,
        _ => 3,
    }
}

pub fn build_operator_suite(spec: LatticeSpec, half_width: i64) -> Result<OperatorSuite> {
    build_operator_suite_with(spec, half_width, AlgebraConfig::default())
}

pub fn build_operator_suite_with(spec: LatticeSpec, half_width: i64, config: AlgebraConfig) -> Result<OperatorSuite> {
    let kind = spec.kind;
    let alphas = inter_sublattice_vectors(kind)?;
    if half_width < 8 {
        return Err(Error::Domain(format!("half_width must be at least 8, got {half_width}")));
    }
    if config.alpha1 >= alphas.len() {
        return Err(Error::Domain(format!("alpha1 index {} out of range for {kind}", config.alpha1)));
    }
    let trunc = TruncatedLattice::new(spec, half_width)?;
    let sites = trunc.sites().to_vec();
    let n = sites.len();
    let idx = |s: &SiteIndex| trunc.index_of(s);
    let a1 = alphas[config.alpha1];
    let shifts: Vec<(i64, i64)> = alphas.iter().map(|a| (a.0 - a1.0, a.1 - a1.1)).collect();

    let margin = interior_margin(kind);
    let interior = sites
        .iter()
        .map(|s| {
            let inside1 = s.n1.abs() + margin <= half_width;
            let inside2 = kind.dim() == 1 || s.n2.abs() + margin <= half_width;
            inside1 && inside2
        })
        .collect();

    let is_a = |s: &SiteIndex| s.sub == Some(Sublattice::A);
    let mut tp = Vec::new();
    let mut pm = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        let sub = s.sub.expect("two-sublattice site");
        if is_a(s) {
            if let Some(j) = idx(&displace(kind, s, a1, Sublattice::B)) {
                tp.push((i, j, ONE));
            }
        }
        for &d in &shifts {
            if let Some(j) = idx(&displace(kind, s, d, sub)) {
                pm.push((i, j, ONE));
            }
        }
    }
    let tau_p = SparseOp::from_triplets(n, tp);
    let tau_m = tau_p.adjoint();
    let tau3 = SparseOp::diagonal(&sites.iter().map(|s| if is_a(s) { ONE } else { -ONE }).collect::<Vec<_>>());
    let tau1 = tau_m.add(&tau_p);
    let tau2 = tau_m.combine(I, &tau_p, -I);
    let p_m = SparseOp::from_triplets(n, pm);
    let p_p = p_m.adjoint();
    let delta = C64::new(spec.delta, 0.0);
    let q_p = tau_p.mul(&p_m).scale(delta);
    let q_m = tau_m.mul(&p_p).scale(delta);
    let q1 = q_p.add(&q_m);
    let q2 = q_p.combine(I, &q_m, -I);
    let id = SparseOp::identity(n);
    let mu = spec.mu();
    let h_shift = q1.combine(ONE, &tau3, C64::new(mu, 0.0));
    let h = h_shift.combine(ONE, &id, C64::new(spec.e0(), 0.0));
    let c = h_shift.mul(&h_shift).combine(ONE, &id, C64::new(-mu * mu, 0.0));
    let gamma0 = tau3.clone();
    let gamma1 = tau_p.add(&tau_m).mul(&tau3);
    let gamma2 = tau_p.sub(&tau_m).mul(&tau3).scale(I);

    let mut operators = vec![
        OperatorMatrix { label: "tau+", matrix: tau_p },
        OperatorMatrix { label: "tau-", matrix: tau_m },
        OperatorMatrix { label: "tau1", matrix: tau1 },
        OperatorMatrix { label: "tau2", matrix: tau2 },
        OperatorMatrix { label: "tau3", matrix: tau3 },
        OperatorMatrix { label: "p+", matrix: p_p },
        OperatorMatrix { label: "p-", matrix: p_m },
        OperatorMatrix { label: "Q1", matrix: q1 },
        OperatorMatrix { label: "Q2", matrix: q2 },
        OperatorMatrix { label: "C", matrix: c },
        OperatorMatrix { label: "gamma0", matrix: gamma0 },
        OperatorMatrix { label: "gamma1", matrix: gamma1 },
        OperatorMatrix { label: "gamma2", matrix: gamma2 },
        OperatorMatrix { label: "H", matrix: h },
    ];
    if kind == LatticeKind::Dimer {
        operators.extend(explicit_dimer_gammas(&sites, &idx));
    }
    let lattice_h = SparseOp::from_triplets(
        n,
        trunc
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, C64::new(v, 0.0)))),
    );
    Ok(OperatorSuite { spec, half_width, config, sites, interior, operators, lattice_h })
}

/// Dirac matrices of the chain written out on (even n, n+1) pairs.
fn explicit_dimer_gammas(sites: &[SiteIndex], idx: &dyn Fn(&SiteIndex) -> Option<usize>) -> Vec<OperatorMatrix> {
    let n = sites.len();
    let (mut g0, mut g1, mut g2) = (Vec::new(), Vec::new(), Vec::new());
    for (i, s) in sites.iter().enumerate() {
        if s.n1.rem_euclid(2) != 0 {
            continue;
        }
        let Some(j) = idx(&SiteIndex::at(LatticeKind::Dimer, s.n1 + 1, 0)) else {
            continue;
        };
        g0.push((i, i, ONE));
        g0.push((j, j, -ONE));
        g1.push((j, i, ONE));
        g1.push((i, j, -ONE));
        g2.push((j, i, I));
        g2.push((i, j, I));
    }
    vec![
        OperatorMatrix { label: "gamma0-explicit", matrix: SparseOp::from_triplets(n, g0) },
        OperatorMatrix { label: "gamma1-explicit", matrix: SparseOp::from_triplets(n, g1) },
        OperatorMatrix { label: "gamma2-explicit", matrix: SparseOp::from_triplets(n, g2) },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationResidual {
    pub name: String,
    /// Max |entry| of (lhs − rhs) over interior rows.
    pub interior: f64,
    /// Same over the excluded rows near the faces.
    pub edge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub kind: LatticeKind,
    pub half_width: i64,
    pub interior_rows: usize,
    pub edge_rows: usize,
    pub relations: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn max_interior(&self) -> f64 {
        self.relations.iter().map(|r| r.interior).fold(0.0, f64::max)
    }

    pub fn max_edge(&self) -> f64 {
        self.relations.iter().map(|r| r.edge).fold(0.0, f64::max)
    }

    pub fn all_within(&self, tol: f64) -> bool {
        self.relations.iter().all(|r| r.interior <= tol)
    }

    pub fn get(&self, name: &str) -> Option<&RelationResidual> {
        self.relations.iter().find(|r| r.name == name)
    }
}

/// Residuals of the ladder, shift, supercharge and Clifford relations, plus
/// Bloch eigenvalue checks of p± at a few sampled momenta.
pub fn check_relations(suite: &OperatorSuite) -> RelationReport {
    let g = |l: &str| suite.get(l);
    let n = suite.dim();
    let id = SparseOp::identity(n);
    let zero = SparseOp::zeros(n);
    let edge_mask: Vec<bool> = suite.interior.iter().map(|b| !b).collect();
    let mut out = Vec::new();
    let mut push = |name: String, r: SparseOp| {
        out.push(RelationResidual { name, interior: r.max_abs_rows(&suite.interior), edge: r.max_abs_rows(&edge_mask) });
    };

    push("[tau+,tau-] = tau3".into(), g("tau+").commutator(g("tau-")).sub(g("tau3")));
    push("[tau+,tau3] = -2 tau+".into(), g("tau+").commutator(g("tau3")).add(&g("tau+").scale(C64::new(2.0, 0.0))));
    push("[tau-,tau3] = 2 tau-".into(), g("tau-").commutator(g("tau3")).sub(&g("tau-").scale(C64::new(2.0, 0.0))));
    let taus = ["tau1", "tau2", "tau3"];
    for a in 0..3 {
        for b in a..3 {
            let rhs = if a == b { id.scale(C64::new(2.0, 0.0)) } else { zero.clone() };
            push(format!("{{{},{}}} = {}", taus[a], taus[b], if a == b { "2" } else { "0" }), g(taus[a]).anticommutator(g(taus[b])).sub(&rhs));
        }
    }
    for (p, t) in [("p+", "tau+"), ("p-", "tau-"), ("p+", "tau-"), ("p-", "tau+"), ("p+", "tau3"), ("p-", "tau3")] {
        push(format!("[{p},{t}] = 0"), g(p).commutator(g(t)));
    }
    push("[p+,p-] = 0".into(), g("p+").commutator(g("p-")));

    let c = g("C");
    let qs = ["Q1", "Q2"];
    for a in 0..2 {
        for b in a..2 {
            let rhs = if a == b { c.scale(C64::new(2.0, 0.0)) } else { zero.clone() };
            push(format!("{{{},{}}} = {}", qs[a], qs[b], if a == b { "2C" } else { "0" }), g(qs[a]).anticommutator(g(qs[b])).sub(&rhs));
        }
        push(format!("[{},C] = 0", qs[a]), g(qs[a]).commutator(c));
    }
    let d2 = suite.spec.delta * suite.spec.delta;
    push("(H-E0)^2 - mu^2 = Delta^2 p+ p-".into(), c.sub(&g("p+").mul(g("p-")).scale(C64::new(d2, 0.0))));
    push("H = lattice Hamiltonian".into(), g("H").sub(&suite.lattice_h));

    let metric = [1.0, -1.0, -1.0];
    let clifford = |suffix: &str, push: &mut dyn FnMut(String, SparseOp)| {
        let names: Vec<String> = (0..3).map(|a| format!("gamma{a}{suffix}")).collect();
        for a in 0..3 {
            for b in a..3 {
                let rhs = if a == b { id.scale(C64::new(2.0 * metric[a], 0.0)) } else { zero.clone() };
                push(format!("{{{},{}}} = {}", names[a], names[b], if a == b { 2.0 * metric[a] } else { 0.0 }), g(&names[a]).anticommutator(g(&names[b])).sub(&rhs));
            }
        }
    };
    clifford("", &mut push);
    if suite.spec.kind == LatticeKind::Dimer {
        clifford("-explicit", &mut push);
    }

    for k in bloch_samples(suite.spec.kind) {
        let (rp, rm) = bloch_eigen_residual(suite, &k);
        out.push(RelationResidual { name: format!("p+ Bloch eigenvalue at k={k:?}"), interior: rp, edge: f64::NAN });
        out.push(RelationResidual { name: format!("p- Bloch eigenvalue at k={k:?}"), interior: rm, edge: f64::NAN });
    }

    RelationReport {
        kind: suite.spec.kind,
        half_width: suite.half_width,
        interior_rows: suite.interior.iter().filter(|b| **b).count(),
        edge_rows: edge_mask.iter().filter(|b| **b).count(),
        relations: out,
    }
}

fn bloch_samples(kind: LatticeKind) -> Vec<Vec<f64>> {
    match kind {
        LatticeKind::Dimer => vec![vec![0.3], vec![1.1], vec![2.7]],
        _ => vec![vec![0.3, -0.8], vec![1.9, 0.4], vec![2.2, 2.9]],
    }
}

/// Interior residuals of p±φ − λ±φ for φ = Σ_s e^{ik·x_s}|s⟩, where
/// λ₋ = Σ_i e^{ik·(α_i−α₁)} and λ₊ = conj(λ₋).
pub fn bloch_eigen_residual(suite: &OperatorSuite, k: &[f64]) -> (f64, f64) {
    let kind = suite.spec.kind;
    let alphas = inter_sublattice_vectors(kind).expect("suite kinds are two-sublattice");
    let a1 = alphas[suite.config.alpha1];
    let dot = |d: (i64, i64)| k[0] * d.0 as f64 + if kind.dim() == 2 { k[1] * d.1 as f64 } else { 0.0 };
    let phi: Vec<C64> = suite.sites.iter().map(|s| C64::from_polar(1.0, dot((s.n1, s.n2)))).collect();
    let lam_m: C64 = alphas.iter().map(|a| C64::from_polar(1.0, dot((a.0 - a1.0, a.1 - a1.1)))).sum();
    let lam_p = lam_m.conj();
    let res = |op: &SparseOp, lam: C64| {
        op.apply(&phi)
            .iter()
            .zip(&phi)
            .zip(&suite.interior)
            .filter(|(_, m)| **m)
            .map(|((v, f), _)| (v - lam * f).norm())
            .fold(0.0, f64::max)
    };
    (res(suite.get("p+"), lam_p), res(suite.get("p-"), lam_m))
}

/// Operator labels with their number of stored entries, for reporting.
pub fn suite_summary(suite: &OperatorSuite) -> BTreeMap<&'static str, usize> {
    suite.operators.iter().map(|o| (o.label, o.matrix.nnz())).collect()
}
