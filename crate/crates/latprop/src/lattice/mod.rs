//! Lattice geometry, Hamiltonian action, dispersion relations and
//! Brillouin-zone quadrature.

pub mod dispersion;
mod quadrature;

pub use dispersion::{dispersion, Dispersion};
pub use quadrature::{
    bz_quadrature_kernel, bz_quadrature_pair, energy_green, quadrature_field, QuadratureField,
    DEFAULT_POINTS_1D, DEFAULT_POINTS_2D,
};

use crate::error::{domain, Error};
use crate::{Result, C64};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeKind {
    Monomer,
    Dimer,
    Square,
    SquareRowAlternating,
    Triangular,
    Hexagonal,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 6] = [
        LatticeKind::Monomer,
        LatticeKind::Dimer,
        LatticeKind::Square,
        LatticeKind::SquareRowAlternating,
        LatticeKind::Triangular,
        LatticeKind::Hexagonal,
    ];

    pub fn coordination(self) -> usize {
        match self {
            LatticeKind::Monomer | LatticeKind::Dimer => 2,
            LatticeKind::Square | LatticeKind::SquareRowAlternating => 4,
            LatticeKind::Triangular => 6,
            LatticeKind::Hexagonal => 3,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            LatticeKind::Monomer | LatticeKind::Dimer => 1,
            _ => 2,
        }
    }

    /// One site species (no sublattice tag, e1 = e2).
    pub fn single_species(self) -> bool {
        matches!(self, LatticeKind::Monomer | LatticeKind::Square | LatticeKind::Triangular)
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Monomer => "monomer",
            LatticeKind::Dimer => "dimer",
            LatticeKind::Square => "square",
            LatticeKind::SquareRowAlternating => "square-rows",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Hexagonal => "hexagonal",
        }
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "monomer" | "chain" => Ok(LatticeKind::Monomer),
            "dimer" => Ok(LatticeKind::Dimer),
            "square" => Ok(LatticeKind::Square),
            "square-rows" | "square_rows" | "squarerows" => Ok(LatticeKind::SquareRowAlternating),
            "triangular" => Ok(LatticeKind::Triangular),
            "hexagonal" | "honeycomb" => Ok(LatticeKind::Hexagonal),
            other => domain(format!("unknown lattice kind '{other}'")),
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lattice kind with hopping Δ and on-site energies E1 (sublattice A, even
/// sites) and E2 (sublattice B, odd sites).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub delta: f64,
    pub e1: f64,
    pub e2: f64,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, delta: f64, e1: f64, e2: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("hopping must be positive, got {delta}"));
        }
        if !(e1.is_finite() && e2.is_finite()) {
            return domain("on-site energies must be finite");
        }
        if kind.single_species() && e1 != e2 {
            return domain(format!("{kind} has one species; e1 must equal e2"));
        }
        Ok(Self { kind, delta, e1, e2 })
    }

    /// Δ given, E0 = 0, gap μ.
    pub fn with_gap(kind: LatticeKind, delta: f64, mu: f64) -> Result<Self> {
        Self::new(kind, delta, mu, -mu)
    }

    pub fn homogeneous(kind: LatticeKind, delta: f64) -> Self {
        Self { kind, delta, e1: 0.0, e2: 0.0 }
    }

    pub fn e0(&self) -> f64 {
        0.5 * (self.e1 + self.e2)
    }

    /// Half the on-site energy difference, (E1 - E2)/2.
    pub fn mu(&self) -> f64 {
        0.5 * (self.e1 - self.e2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn sign(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sublattice::A => "A",
            Sublattice::B => "B",
        }
    }
}

/// Integer cell coordinates plus sublattice tag. Ordering is lexicographic
/// in (n1, n2, sublattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    pub n1: i64,
    pub n2: i64,
    pub sub: Option<Sublattice>,
}

fn parity_sub(n: i64) -> Sublattice {
    if n.rem_euclid(2) == 0 {
        Sublattice::A
    } else {
        Sublattice::B
    }
}

impl SiteIndex {
    pub fn new(n1: i64, n2: i64, sub: Option<Sublattice>) -> Self {
        Self { n1, n2, sub }
    }

    /// Site of a lattice whose sublattice follows from the coordinates
    /// (everything except the honeycomb, which needs an explicit tag).
    pub fn at(kind: LatticeKind, n1: i64, n2: i64) -> Self {
        let sub = match kind {
            LatticeKind::Dimer => Some(parity_sub(n1)),
            LatticeKind::SquareRowAlternating => Some(parity_sub(n2)),
            LatticeKind::Hexagonal => Some(Sublattice::A),
            _ => None,
        };
        Self { n1, n2, sub }
    }

    pub fn hex(n1: i64, n2: i64, sub: Sublattice) -> Self {
        Self { n1, n2, sub: Some(sub) }
    }

    pub fn sublattice_label(&self) -> &'static str {
        self.sub.map(Sublattice::label).unwrap_or("")
    }

    /// Checks that the tag (and n2 for chains) is consistent with `kind`.
    pub fn validate(&self, kind: LatticeKind) -> Result<()> {
        if kind.dim() == 1 && self.n2 != 0 {
            return domain(format!("{kind} is one-dimensional; n2 must be 0"));
        }
        let ok = match kind {
            LatticeKind::Monomer | LatticeKind::Square | LatticeKind::Triangular => self.sub.is_none(),
            LatticeKind::Dimer => self.sub == Some(parity_sub(self.n1)),
            LatticeKind::SquareRowAlternating => self.sub == Some(parity_sub(self.n2)),
            LatticeKind::Hexagonal => self.sub.is_some(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("sublattice tag {:?} inconsistent with {kind} at ({}, {})", self.sub, self.n1, self.n2))
        }
    }

    pub fn offset(&self, d1: i64, d2: i64) -> Self {
        Self { n1: self.n1 + d1, n2: self.n2 + d2, sub: self.sub }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sub {
            Some(s) => write!(f, "({},{},{})", self.n1, self.n2, s.label()),
            None => write!(f, "({},{})", self.n1, self.n2),
        }
    }
}

/// Honeycomb: an A cell at n connects to the B cells at n + b for these b.
pub const HEX_A_TO_B: [(i64, i64); 3] = [(0, 0), (-1, 0), (-1, -1)];

/// Triangular neighbours ±a1, ±a2, ±(a1 + a2).
pub const TRI_STEPS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];

/// Nearest neighbours in a fixed order.
pub fn neighbors(spec: &LatticeSpec, site: SiteIndex) -> Result<Vec<SiteIndex>> {
    let kind = spec.kind;
    site.validate(kind)?;
    let (n1, n2) = (site.n1, site.n2);
    let out = match kind {
        LatticeKind::Monomer | LatticeKind::Dimer => {
            vec![SiteIndex::at(kind, n1 - 1, 0), SiteIndex::at(kind, n1 + 1, 0)]
        }
        LatticeKind::Square | LatticeKind::SquareRowAlternating => vec![
            SiteIndex::at(kind, n1 - 1, n2),
            SiteIndex::at(kind, n1 + 1, n2),
            SiteIndex::at(kind, n1, n2 - 1),
            SiteIndex::at(kind, n1, n2 + 1),
        ],
        LatticeKind::Triangular => TRI_STEPS.iter().map(|&(a, b)| SiteIndex::at(kind, n1 + a, n2 + b)).collect(),
        LatticeKind::Hexagonal => match site.sub {
            Some(Sublattice::A) => HEX_A_TO_B
                .iter()
                .map(|&(a, b)| SiteIndex::hex(n1 + a, n2 + b, Sublattice::B))
                .collect(),
            _ => HEX_A_TO_B
                .iter()
                .map(|&(a, b)| SiteIndex::hex(n1 - a, n2 - b, Sublattice::A))
                .collect(),
        },
    };
    Ok(out)
}

/// On-site energy of a site.
pub fn onsite(spec: &LatticeSpec, site: SiteIndex) -> f64 {
    match site.sub {
        Some(Sublattice::B) => spec.e2,
        _ => spec.e1,
    }
}

/// Axis-aligned inclusive box of cell indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub n1: (i64, i64),
    pub n2: (i64, i64),
}

impl Window {
    pub fn new(n1: (i64, i64), n2: (i64, i64)) -> Self {
        Self { n1, n2 }
    }

    /// Box of half-width `half` around the origin (n2 fixed at 0 in 1D).
    pub fn centered(kind: LatticeKind, half: i64) -> Self {
        let n2 = if kind.dim() == 1 { (0, 0) } else { (-half, half) };
        Self { n1: (-half, half), n2 }
    }

    pub fn around(kind: LatticeKind, c: SiteIndex, half: i64) -> Self {
        let n2 = if kind.dim() == 1 { (0, 0) } else { (c.n2 - half, c.n2 + half) };
        Self { n1: (c.n1 - half, c.n1 + half), n2 }
    }

    pub fn contains(&self, s: &SiteIndex) -> bool {
        (self.n1.0..=self.n1.1).contains(&s.n1) && (self.n2.0..=self.n2.1).contains(&s.n2)
    }

    /// Whether a site lies on the outermost layer of the box.
    pub fn on_boundary(&self, s: &SiteIndex, kind: LatticeKind) -> bool {
        let edge1 = s.n1 == self.n1.0 || s.n1 == self.n1.1;
        let edge2 = kind.dim() == 2 && (s.n2 == self.n2.0 || s.n2 == self.n2.1);
        edge1 || edge2
    }

    /// All sites of `kind` inside the box, in lexicographic order.
    pub fn sites(&self, kind: LatticeKind) -> Vec<SiteIndex> {
        let mut out = Vec::new();
        for n1 in self.n1.0..=self.n1.1 {
            for n2 in self.n2.0..=self.n2.1 {
                if kind == LatticeKind::Hexagonal {
                    out.push(SiteIndex::hex(n1, n2, Sublattice::A));
                    out.push(SiteIndex::hex(n1, n2, Sublattice::B));
                } else {
                    out.push(SiteIndex::at(kind, n1, n2));
                }
            }
        }
        out
    }
}

/// (Ĥf) on the window; f must also cover the one-neighbour halo.
pub fn hamiltonian_action(
    spec: &LatticeSpec,
    f: &HashMap<SiteIndex, C64>,
    window: &Window,
) -> Result<HashMap<SiteIndex, C64>> {
    let mut out = HashMap::new();
    for s in window.sites(spec.kind) {
        let own = *f.get(&s).ok_or_else(|| Error::Domain(format!("missing value at {s}")))?;
        let mut acc = own * onsite(spec, s);
        for nb in neighbors(spec, s)? {
            let v = f
                .get(&nb)
                .ok_or_else(|| Error::Domain(format!("missing halo value at {nb}")))?;
            acc += v * spec.delta;
        }
        out.insert(s, acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordination_counts() {
        for kind in LatticeKind::ALL {
            let spec = LatticeSpec::homogeneous(kind, 1.0);
            let s = if kind == LatticeKind::Hexagonal {
                SiteIndex::hex(0, 0, Sublattice::A)
            } else {
                SiteIndex::at(kind, 0, 0)
            };
            let nb = neighbors(&spec, s).unwrap();
            assert_eq!(nb.len(), kind.coordination());
            for n in &nb {
                n.validate(kind).unwrap();
                let back = neighbors(&spec, *n).unwrap();
                assert!(back.contains(&s), "{kind}: {n} does not point back");
            }
        }
    }

    #[test]
    fn documented_neighbours() {
        let m = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        let nb = neighbors(&m, SiteIndex::at(LatticeKind::Monomer, 0, 0)).unwrap();
        assert_eq!(nb.iter().map(|s| s.n1).collect::<Vec<_>>(), vec![-1, 1]);
        let h = LatticeSpec::homogeneous(LatticeKind::Hexagonal, 1.0);
        let nb = neighbors(&h, SiteIndex::hex(0, 0, Sublattice::A)).unwrap();
        let want = [(0, 0), (-1, 0), (-1, -1)];
        for (s, w) in nb.iter().zip(want) {
            assert_eq!((s.n1, s.n2, s.sub), (w.0, w.1, Some(Sublattice::B)));
        }
    }

    #[test]
    fn bad_tags() {
        let d = LatticeSpec::homogeneous(LatticeKind::Dimer, 1.0);
        assert!(neighbors(&d, SiteIndex::new(1, 0, Some(Sublattice::A))).is_err());
        assert!(LatticeSpec::new(LatticeKind::Monomer, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn action_examples() {
        let spec = LatticeSpec::new(LatticeKind::Dimer, 1.0, 1.5, -0.5).unwrap();
        let w = Window::centered(LatticeKind::Dimer, 3);
        let halo = Window::centered(LatticeKind::Dimer, 4);
        let mut f = HashMap::new();
        for s in halo.sites(spec.kind) {
            f.insert(s, C64::new(if s.n1 == 0 { 1.0 } else { 0.0 }, 0.0));
        }
        let g = hamiltonian_action(&spec, &f, &w).unwrap();
        assert_eq!(g[&SiteIndex::at(LatticeKind::Dimer, 0, 0)], C64::new(spec.e0() + spec.mu(), 0.0));
        assert_eq!(g[&SiteIndex::at(LatticeKind::Dimer, 1, 0)], C64::new(1.0, 0.0));
        assert_eq!(g[&SiteIndex::at(LatticeKind::Dimer, -1, 0)], C64::new(1.0, 0.0));
        f.remove(&SiteIndex::at(LatticeKind::Dimer, 4, 0));
        assert!(hamiltonian_action(&spec, &f, &w).is_err());
    }
}
