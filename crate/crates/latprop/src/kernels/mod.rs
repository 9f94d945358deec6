//! Single-particle propagators K(A, A'; t) = ⟨A| e^{-iHt} |A'⟩ for every
//! lattice kind, with several evaluation methods for the two-species cases.

pub mod chain;
pub mod dimer;
pub mod hex;
pub mod operational;
pub mod triangular;

pub use chain::{k_monomer, k_square};
pub use dimer::{dimer_mu_pm, g_dimer, k_dimer};
pub use hex::{g_hex, gapless_q_max, k_hex};
pub use operational::operational_mass_apply;
pub use triangular::{k_triangular, k_triangular_chain_sum};

use crate::error::{ensure_forward, Error};
use crate::lattice::{
    quadrature_field, LatticeKind, LatticeSpec, QuadratureField, SiteIndex, Sublattice, Window, DEFAULT_POINTS_1D,
    DEFAULT_POINTS_2D,
};
use crate::specfun::cq::i_pow;
use crate::specfun::two_index::{triple_sum_limit, two_index_from_table};
use crate::{Result, C64};
use chain::{chain_from_table, chain_table};
use dimer::DimerScalar;
use hex::HexScalar;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Evaluation method. `ClosedForm` on the dimer and honeycomb means the
/// exact operational (mass-derivative) series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMethod {
    ClosedForm,
    Quadrature,
    SphericalWave,
    StrongGap,
    Operational,
    GaplessSeries,
}

impl KernelMethod {
    pub const ALL: [KernelMethod; 6] = [
        KernelMethod::ClosedForm,
        KernelMethod::Quadrature,
        KernelMethod::SphericalWave,
        KernelMethod::StrongGap,
        KernelMethod::Operational,
        KernelMethod::GaplessSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelMethod::ClosedForm => "closed-form",
            KernelMethod::Quadrature => "quadrature",
            KernelMethod::SphericalWave => "spherical-wave",
            KernelMethod::StrongGap => "strong-gap",
            KernelMethod::Operational => "operational",
            KernelMethod::GaplessSeries => "gapless-series",
        }
    }

    /// Whether the method is exact up to truncation (as opposed to an
    /// asymptotic expansion).
    pub fn is_exact(self) -> bool {
        self != KernelMethod::StrongGap
    }

    /// Method used when none is requested.
    pub fn default_for(spec: &LatticeSpec) -> Self {
        match spec.kind {
            LatticeKind::Dimer | LatticeKind::SquareRowAlternating => KernelMethod::SphericalWave,
            LatticeKind::Hexagonal if spec.mu() == 0.0 => KernelMethod::GaplessSeries,
            LatticeKind::Hexagonal => KernelMethod::Operational,
            _ => KernelMethod::ClosedForm,
        }
    }
}

impl fmt::Display for KernelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut k = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match k.as_str() {
            "gapless" => Some("gapless-series"),
            "spherical" => Some("spherical-wave"),
            "closed" => Some("closed-form"),
            _ => None,
        };
        if let Some(a) = alias {
            k = a.to_string();
        }
        KernelMethod::ALL
            .into_iter()
            .find(|m| m.name() == k)
            .ok_or_else(|| Error::Domain(format!("unknown kernel method '{s}'")))
    }
}

/// Methods accepted for a lattice kind.
pub fn supported_methods(kind: LatticeKind) -> &'static [KernelMethod] {
    use KernelMethod::*;
    match kind {
        LatticeKind::Monomer | LatticeKind::Square | LatticeKind::Triangular => &[ClosedForm, Quadrature],
        LatticeKind::Dimer | LatticeKind::SquareRowAlternating => {
            &[ClosedForm, Quadrature, SphericalWave, StrongGap, Operational]
        }
        LatticeKind::Hexagonal => &[ClosedForm, Quadrature, StrongGap, Operational, GaplessSeries],
    }
}

/// Knobs that override default truncations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KernelOptions {
    /// Gapless honeycomb series cutoff.
    pub q_max: Option<usize>,
    /// Points per axis for quadrature methods.
    pub quadrature_points: Option<usize>,
}

/// 2×2 block of the honeycomb kernel between two cells, indexed by
/// (sublattice, sublattice').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorKernel {
    pub entries: [[C64; 2]; 2],
}

impl SpinorKernel {
    pub fn get(&self, a: Sublattice, b: Sublattice) -> C64 {
        let i = |s: Sublattice| if s == Sublattice::A { 0 } else { 1 };
        self.entries[i(a)][i(b)]
    }
}

// Monomer, square and triangular closed forms share a J_n(2Δt) table.
#[derive(Clone)]
enum Body {
    Chain(Vec<f64>),
    Square(Vec<f64>),
    Triangular(Vec<f64>),
    Plain(QuadratureField),
    Rows { chain: Vec<f64>, dimer: DimerScalar, dimer_spec: LatticeSpec },
    Dimer(DimerScalar),
    Hex(HexScalar),
}

/// A kernel evaluator fixed at one (spec, t, method). Construction does the
/// expensive work; entries are then cheap and thread-safe.
#[derive(Clone)]
pub struct Propagator {
    spec: LatticeSpec,
    t: f64,
    method: KernelMethod,
    body: Body,
    warnings: Vec<String>,
}

impl fmt::Debug for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Propagator")
            .field("spec", &self.spec)
            .field("t", &self.t)
            .field("method", &self.method)
            .finish()
    }
}

impl Propagator {
    pub fn new(spec: LatticeSpec, t: f64, method: KernelMethod) -> Result<Self> {
        Self::with_options(spec, t, method, KernelOptions::default())
    }

    pub fn with_options(spec: LatticeSpec, t: f64, method: KernelMethod, opts: KernelOptions) -> Result<Self> {
        ensure_forward(t)?;
        if !supported_methods(spec.kind).contains(&method) {
            return Err(Error::Unsupported(format!("method {method} is not available for {}", spec.kind)));
        }
        let mut warnings = Vec::new();
        if method == KernelMethod::StrongGap && spec.mu().abs() < 3.0 * spec.delta {
            warnings.push(format!(
                "strong-gap expansion outside its validity range: |μ| = {} < 3Δ = {}",
                spec.mu().abs(),
                3.0 * spec.delta
            ));
        }
        let quad_n = |dim: usize| {
            opts.quadrature_points.unwrap_or(if dim == 1 { DEFAULT_POINTS_1D } else { DEFAULT_POINTS_2D })
        };
        let body = match (spec.kind, method) {
            (LatticeKind::Monomer | LatticeKind::Square | LatticeKind::Triangular, KernelMethod::Quadrature) => {
                Body::Plain(quadrature_field(&spec, t, quad_n(spec.kind.dim()))?)
            }
            (LatticeKind::Monomer, _) => Body::Chain(chain_table(t, spec.delta)),
            (LatticeKind::Square, _) => Body::Square(chain_table(t, spec.delta)),
            (LatticeKind::Triangular, _) => Body::Triangular(chain_table(t, spec.delta)),
            (LatticeKind::SquareRowAlternating, m) => {
                let dimer_spec = LatticeSpec { kind: LatticeKind::Dimer, ..spec };
                Body::Rows {
                    chain: chain_table(t, spec.delta),
                    dimer: DimerScalar::new(&dimer_spec, t, m, &opts)?,
                    dimer_spec,
                }
            }
            (LatticeKind::Dimer, m) => Body::Dimer(DimerScalar::new(&spec, t, m, &opts)?),
            (LatticeKind::Hexagonal, m) => Body::Hex(HexScalar::new(&spec, t, m, &opts)?),
        };
        Ok(Self { spec, t, method, body, warnings })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    /// Validity warnings attached to this evaluator.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn within_validity(&self) -> bool {
        self.warnings.is_empty()
    }

    /// K(a, b; t) = ⟨a| e^{-iHt} |b⟩.
    pub fn amplitude(&self, a: &SiteIndex, b: &SiteIndex) -> Result<C64> {
        a.validate(self.spec.kind)?;
        b.validate(self.spec.kind)?;
        let e0 = C64::from_polar(1.0, -self.spec.e0() * self.t);
        let (d1, d2) = (a.n1 - b.n1, a.n2 - b.n2);
        match &self.body {
            Body::Chain(tab) => Ok(e0 * chain_from_table(tab, d1)),
            Body::Square(tab) => Ok(e0 * chain_from_table(tab, d1) * chain_from_table(tab, d2)),
            Body::Triangular(tab) => {
                let limit = triple_sum_limit(d1, d2, 2.0 * self.spec.delta * self.t);
                Ok(e0 * i_pow(-d1 - d2) * two_index_from_table(d1, d2, tab, limit).conj())
            }
            Body::Plain(field) => field
                .get((d1, d2))
                .map(|p| p.0)
                .ok_or_else(|| Error::Resource(format!("offset ({d1},{d2}) exceeds the quadrature alias-free range"))),
            Body::Rows { chain, dimer, dimer_spec } => {
                Ok(chain_from_table(chain, d1) * dimer.kernel(dimer_spec, a.n2, b.n2)?)
            }
            Body::Dimer(dimer) => dimer.kernel(&self.spec, a.n1, b.n1),
            Body::Hex(hex) => hex.kernel(&self.spec, a, b),
        }
    }

    /// Auxiliary scalar (G, i∂_t G) at an offset; two-species lattices only.
    pub fn scalar(&self, d: (i64, i64)) -> Result<(C64, C64)> {
        match &self.body {
            Body::Dimer(dimer) => dimer.pair(d.0),
            Body::Rows { dimer, .. } => dimer.pair(d.1),
            Body::Hex(hex) => hex.pair(d),
            _ => Err(Error::Unsupported(format!("{} has no auxiliary scalar kernel", self.spec.kind))),
        }
    }

    /// Honeycomb 2×2 block between cell n and cell n - d.
    pub fn spinor(&self, d: (i64, i64)) -> Result<SpinorKernel> {
        if self.spec.kind != LatticeKind::Hexagonal {
            return Err(Error::Unsupported("spinor blocks exist only for the honeycomb".into()));
        }
        let mut entries = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, sa) in [Sublattice::A, Sublattice::B].into_iter().enumerate() {
            for (j, sb) in [Sublattice::A, Sublattice::B].into_iter().enumerate() {
                entries[i][j] = self.amplitude(&SiteIndex::hex(d.0, d.1, sa), &SiteIndex::hex(0, 0, sb))?;
            }
        }
        Ok(SpinorKernel { entries })
    }

    /// K(A, source) for every A in the window, in window order.
    pub fn column(&self, source: &SiteIndex, window: &Window) -> Result<Vec<(SiteIndex, C64)>> {
        window
            .sites(self.spec.kind)
            .into_par_iter()
            .map(|s| self.amplitude(&s, source).map(|v| (s, v)))
            .collect()
    }
}

/// Boundary density above which a window is considered too small.
pub const CONE_TOLERANCE: f64 = 1e-10;

/// |K(A, source; t)|² over a window, refusing windows whose outer layer
/// still carries density above [`CONE_TOLERANCE`].
pub fn density_grid(
    spec: &LatticeSpec,
    source: &SiteIndex,
    t: f64,
    window: &Window,
    method: KernelMethod,
) -> Result<BTreeMap<SiteIndex, f64>> {
    let prop = Propagator::new(*spec, t, method)?;
    density_from(&prop, source, window)
}

/// Same as [`density_grid`] with a prepared evaluator.
pub fn density_from(prop: &Propagator, source: &SiteIndex, window: &Window) -> Result<BTreeMap<SiteIndex, f64>> {
    if !window.contains(source) {
        return Err(Error::Domain(format!("source {source} lies outside the window")));
    }
    let col = prop.column(source, window)?;
    let kind = prop.spec().kind;
    let edge = col
        .iter()
        .filter(|(s, _)| window.on_boundary(s, kind))
        .map(|(_, v)| v.norm_sqr())
        .fold(0.0, f64::max);
    if edge > CONE_TOLERANCE {
        return Err(Error::Cone(format!(
            "boundary density {edge:.3e} exceeds {CONE_TOLERANCE:.0e}; enlarge the window"
        )));
    }
    Ok(col.into_iter().map(|(s, v)| (s, v.norm_sqr())).collect())
}

/// Honeycomb site from a cell and sublattice, or the plain site otherwise.
pub fn site(kind: LatticeKind, n1: i64, n2: i64, sub: Option<Sublattice>) -> SiteIndex {
    match (kind, sub) {
        (LatticeKind::Hexagonal, Some(s)) => SiteIndex::hex(n1, n2, s),
        _ => SiteIndex::at(kind, n1, n2),
    }
}

/// Square lattice with alternating rows, evaluated by the default method.
pub fn k_square_rows(a: &SiteIndex, b: &SiteIndex, t: f64, spec: &LatticeSpec) -> Result<C64> {
    if spec.kind != LatticeKind::SquareRowAlternating {
        return Err(Error::Domain(format!("expected square-rows, got {}", spec.kind)));
    }
    Propagator::new(*spec, t, KernelMethod::default_for(spec))?.amplitude(a, b)
}
