//! Text formats for sites, occupations and number lists.

use crate::Failure;
use latprop::lattice::{LatticeKind, SiteIndex, Sublattice};
use latprop::manybody::{OccupationState, Statistics};

pub fn float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"))).collect()
}

/// "a,b,c" or "start:step:stop" (stop included up to rounding).
pub fn time_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => float_list(s),
        3 => {
            let p: Vec<f64> = parts.iter().map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"))).collect::<Result<_, _>>()?;
            let (a, h, b) = (p[0], p[1], p[2]);
            if !(h > 0.0) || b < a {
                return Err(format!("bad range {s}"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * h).collect())
        }
        _ => Err(format!("bad time grid '{s}'")),
    }
}

/// "n1", "n1,n2" or "n1,n2,A"; the sublattice tag is inferred where the
/// lattice fixes it and defaults to A on the honeycomb.
pub fn site(kind: LatticeKind, s: &str) -> Result<SiteIndex, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    let bad = || Failure::usage(format!("cannot parse site '{s}' for {kind}"));
    let mut nums = Vec::new();
    let mut sub = None;
    for p in &parts {
        match p.to_ascii_uppercase().as_str() {
            "A" => sub = Some(Sublattice::A),
            "B" => sub = Some(Sublattice::B),
            _ => nums.push(p.parse::<i64>().map_err(|_| bad())?),
        }
    }
    let (n1, n2) = match (nums.len(), kind.dim()) {
        (1, 1) => (nums[0], 0),
        (2, 2) => (nums[0], nums[1]),
        _ => return Err(bad()),
    };
    let site = match kind {
        LatticeKind::Hexagonal => SiteIndex::hex(n1, n2, sub.unwrap_or(Sublattice::A)),
        _ => SiteIndex::at(kind, n1, n2),
    };
    site.validate(kind)?;
    if sub.is_some() && kind != LatticeKind::Hexagonal && site.sub != sub {
        return Err(Failure::usage(format!("sublattice of '{s}' is fixed by its coordinates on {kind}")));
    }
    Ok(site)
}

/// Offset of `dn` from `source`, keeping the honeycomb sublattice.
pub fn offset(kind: LatticeKind, source: &SiteIndex, dn: &str) -> Result<SiteIndex, Failure> {
    let d: Vec<i64> = dn
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| Failure::usage(format!("cannot parse offset '{dn}'"))))
        .collect::<Result<_, _>>()?;
    if d.len() != kind.dim() {
        return Err(Failure::usage(format!("{kind} offsets have {} components", kind.dim())));
    }
    let (d1, d2) = (d[0], d.get(1).copied().unwrap_or(0));
    Ok(match kind {
        LatticeKind::Hexagonal => source.offset(d1, d2),
        _ => SiteIndex::at(kind, source.n1 + d1, source.n2 + d2),
    })
}

pub fn occupations(kind: LatticeKind, stats: Statistics, s: &str) -> Result<OccupationState, Failure> {
    let mut entries = Vec::new();
    let chunks: Vec<&str> = if kind.dim() == 1 { s.split([';', ',']).collect() } else { s.split(';').collect() };
    for chunk in chunks.into_iter().map(str::trim).filter(|c| !c.is_empty()) {
        let (site_txt, count) = match chunk.rsplit_once(':') {
            Some((a, b)) => (a, b.trim().parse::<u32>().map_err(|_| Failure::usage(format!("bad count in '{chunk}'")))?),
            None => (chunk, 1),
        };
        entries.push((site(kind, site_txt)?, count));
    }
    Ok(OccupationState::new(stats, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(time_grid("0:0.5:2").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(time_grid("1,3").unwrap(), vec![1.0, 3.0]);
        assert!(time_grid("1:0:2").is_err());
    }

    #[test]
    fn sites_and_occupations() {
        assert_eq!(site(LatticeKind::Dimer, "3").unwrap().sub, Some(Sublattice::B));
        assert_eq!(site(LatticeKind::Hexagonal, "1,-2,B").unwrap(), SiteIndex::hex(1, -2, Sublattice::B));
        assert!(site(LatticeKind::Dimer, "2,B").is_err());
        assert!(site(LatticeKind::Square, "1").is_err());
        let o = occupations(LatticeKind::Monomer, Statistics::Boson, "0:1,1:3").unwrap();
        assert_eq!(o.total(), 4);
        let h = occupations(LatticeKind::Hexagonal, Statistics::Fermion, "0,0,A; 0,0,B").unwrap();
        assert_eq!(h.total(), 2);
    }
}
