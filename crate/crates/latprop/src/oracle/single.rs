use super::TruncatedLattice;
use crate::lattice::SiteIndex;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, SymmetricEigen};

/// Largest box factorized densely.
pub const MAX_DENSE: usize = 3000;

/// Eigendecomposition H = V diag(E) Vᵀ, reused for any t.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    lattice: TruncatedLattice,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralOracle {
    pub fn new(lattice: TruncatedLattice) -> Result<Self> {
        if lattice.len() > MAX_DENSE {
            return Err(Error::Resource(format!(
                "{} sites exceed the dense factorization limit {MAX_DENSE}",
                lattice.len()
            )));
        }
        let eig = SymmetricEigen::new(lattice.hamiltonian());
        Ok(Self { energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors, lattice })
    }

    pub fn lattice(&self) -> &TruncatedLattice {
        &self.lattice
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.energies.iter().map(|e| C64::from_polar(1.0, -e * t)).collect()
    }

    /// Full e^{-iHt} without any cone check.
    pub fn evolution(&self, t: f64) -> DMatrix<C64> {
        let n = self.lattice.len();
        let ph = self.phases(t);
        let v = &self.vectors;
        let mut scaled = DMatrix::<C64>::zeros(n, n);
        for j in 0..n {
            for a in 0..n {
                scaled[(a, j)] = ph[j] * v[(a, j)];
            }
        }
        let vc = v.map(|x| C64::new(x, 0.0));
        scaled * vc.transpose()
    }

    /// Column e^{-iHt}|source⟩, refusing when reflections could reach the
    /// comparison region.
    pub fn column(&self, source: SiteIndex, t: f64) -> Result<Vec<C64>> {
        crate::error::ensure_forward(t)?;
        self.lattice.require_cone(t, source)?;
        let j = self
            .lattice
            .index_of(&source)
            .ok_or_else(|| Error::Domain(format!("{source} is outside the truncation")))?;
        let ph = self.phases(t);
        let n = self.lattice.len();
        let v = &self.vectors;
        let w: Vec<C64> = (0..n).map(|m| ph[m] * v[(j, m)]).collect();
        Ok((0..n).map(|a| (0..n).map(|m| w[m] * v[(a, m)]).sum()).collect())
    }
}

/// e^{-iHt} on the box, valid when the centre of the box is cone-safe.
pub fn single_particle_oracle(trunc: &TruncatedLattice, t: f64) -> Result<DMatrix<C64>> {
    crate::error::ensure_forward(t)?;
    let centre = SiteIndex::at(trunc.spec.kind, 0, 0);
    trunc.require_cone(t, centre)?;
    Ok(SpectralOracle::new(trunc.clone())?.evolution(t))
}

/// Taylor-stepped e^{-iHt} e_j with step δ such that ‖H‖δ ≤ 1/2.
pub(crate) fn taylor_propagate(rows: &[Vec<(usize, f64)>], j: usize, t: f64) -> Vec<C64> {
    let n = rows.len();
    let norm = rows
        .iter()
        .map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-300);
    let steps = ((2.0 * norm * t).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let mut psi = vec![C64::new(0.0, 0.0); n];
    psi[j] = C64::new(1.0, 0.0);
    let mut term = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    for _ in 0..steps {
        term.copy_from_slice(&psi);
        let mut acc = psi.clone();
        for k in 1..60 {
            let fac = C64::new(0.0, -dt / k as f64);
            let mut size = 0.0f64;
            for (a, row) in rows.iter().enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for &(b, v) in row {
                    s += term[b] * v;
                }
                next[a] = s * fac;
                size = size.max(next[a].norm());
            }
            std::mem::swap(&mut term, &mut next);
            for (x, y) in acc.iter_mut().zip(term.iter()) {
                *x += y;
            }
            if size < 1e-18 {
                break;
            }
        }
        psi = acc;
    }
    psi
}
