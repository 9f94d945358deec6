//! Boson and fermion transition amplitudes from single-particle kernels.

use super::smatrix::enumerate_s_matrices;
use super::state::{OccupationState, Statistics};
use crate::error::{domain, Error};
use crate::lattice::SiteIndex;
use crate::specfun::bessel::factorial;
use crate::{Result, C64};
use nalgebra::DMatrix;

/// Kernel callback K(final, initial, t).
pub type KernelFn<'a> = dyn Fn(&SiteIndex, &SiteIndex, f64) -> Result<C64> + Sync + 'a;

/// Which fermionic formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermionVariant {
    /// Product of K_{ji} over every occupied (initial i, final j) pair.
    PairProduct,
    /// det[K_{j_a i_b}] with both site lists in ascending order.
    Determinant,
}

/// K_{ji} for occupied final sites j (rows) and initial sites i (columns).
fn kernel_matrix(finals: &[SiteIndex], initials: &[SiteIndex], kernel: &KernelFn, t: f64) -> Result<Vec<Vec<C64>>> {
    finals
        .iter()
        .map(|j| initials.iter().map(|i| kernel(j, i, t)).collect())
        .collect()
}

/// ⟨{m}| e^{-iHt} |{n}⟩ for bosons:
/// √(Π n_i! Π m_j!) Σ_S Π_{ij} K_{ji}^{S_ji} / S_ji!.
pub fn boson_amplitude(initial: &OccupationState, final_: &OccupationState, kernel: &KernelFn, t: f64) -> Result<C64> {
    if initial.stats != Statistics::Boson || final_.stats != Statistics::Boson {
        return domain("boson amplitude needs boson states");
    }
    if initial.total() != final_.total() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (is, n): (Vec<SiteIndex>, Vec<u32>) = initial.occupied().unzip();
    let (js, m): (Vec<SiteIndex>, Vec<u32>) = final_.occupied().unzip();
    let k = kernel_matrix(&js, &is, kernel, t)?;
    let mats = enumerate_s_matrices(&n, &m)?;
    let norm: f64 = n.iter().chain(&m).map(|&v| factorial(v as usize)).product::<f64>().sqrt();
    let mut acc = C64::new(0.0, 0.0);
    for s in &mats {
        let mut term = C64::new(1.0, 0.0);
        for (j, row) in k.iter().enumerate() {
            for (i, kji) in row.iter().enumerate() {
                let e = s.get(j, i);
                if e > 0 {
                    term *= kji.powi(e as i32) / factorial(e as usize);
                }
            }
        }
        acc += term;
    }
    Ok(acc * norm)
}

/// ⟨{m}| e^{-iHt} |{n}⟩ for fermions by the chosen formula.
pub fn fermion_amplitude(
    initial: &OccupationState,
    final_: &OccupationState,
    kernel: &KernelFn,
    t: f64,
    variant: FermionVariant,
) -> Result<C64> {
    if initial.stats != Statistics::Fermion || final_.stats != Statistics::Fermion {
        return domain("fermion amplitude needs fermion states");
    }
    for st in [initial, final_] {
        if let Some((s, c)) = st.occupied().find(|(_, c)| *c > 1) {
            return Err(Error::Domain(format!("fermionic occupation {c} at {s}")));
        }
    }
    if initial.total() != final_.total() {
        return Ok(C64::new(0.0, 0.0));
    }
    let is = initial.sites();
    let js = final_.sites();
    let k = kernel_matrix(&js, &is, kernel, t)?;
    Ok(match variant {
        FermionVariant::PairProduct => k.iter().flatten().product(),
        FermionVariant::Determinant => {
            let n = is.len();
            if n == 0 {
                return Ok(C64::new(1.0, 0.0));
            }
            DMatrix::from_fn(n, n, |a, b| k[a][b]).determinant()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeKind, LatticeSpec, Window};
    use crate::oracle::{FockLimits, FockOracle, SpectralOracle, TruncatedLattice};

    fn chain(n: i64) -> TruncatedLattice {
        let spec = LatticeSpec::homogeneous(LatticeKind::Monomer, 1.0);
        TruncatedLattice::from_window(spec, Window::new((0, n - 1), (0, 0))).unwrap()
    }

    fn site(n: i64) -> SiteIndex {
        SiteIndex::at(LatticeKind::Monomer, n, 0)
    }

    fn boxed(trunc: &TruncatedLattice) -> impl Fn(&SiteIndex, &SiteIndex, f64) -> Result<C64> + Sync + '_ {
        let oracle = SpectralOracle::new(trunc.clone()).unwrap();
        move |j: &SiteIndex, i: &SiteIndex, t: f64| {
            let u = oracle.evolution(t);
            let (a, b) = (trunc.index_of(j).unwrap(), trunc.index_of(i).unwrap());
            Ok(u[(a, b)])
        }
    }

    fn bosons(v: &[(i64, u32)]) -> OccupationState {
        OccupationState::new(Statistics::Boson, v.iter().map(|&(n, c)| (site(n), c))).unwrap()
    }

    fn fermions(v: &[i64]) -> OccupationState {
        OccupationState::new(Statistics::Fermion, v.iter().map(|&n| (site(n), 1))).unwrap()
    }

    #[test]
    fn single_particle_is_the_kernel() {
        let tr = chain(5);
        let k = boxed(&tr);
        let a = boson_amplitude(&bosons(&[(1, 1)]), &bosons(&[(3, 1)]), &k, 0.8).unwrap();
        assert!((a - k(&site(3), &site(1), 0.8).unwrap()).norm() < 1e-15);
        for v in [FermionVariant::PairProduct, FermionVariant::Determinant] {
            let f = fermion_amplitude(&fermions(&[1]), &fermions(&[3]), &k, 0.8, v).unwrap();
            assert!((f - a).norm() < 1e-15);
        }
    }

    #[test]
    fn worked_boson_example() {
        let tr = chain(4);
        let k = boxed(&tr);
        let t = 0.9;
        let kk = |j: i64, i: i64| k(&site(j), &site(i), t).unwrap();
        let a = boson_amplitude(&bosons(&[(1, 1), (2, 3)]), &bosons(&[(1, 2), (2, 2)]), &k, t).unwrap();
        // √24 [½ K11 K21 K22² + ½ K12 K21² K22] in K_{ji} = K(final j, initial i)
        let want = 24f64.sqrt() * 0.5 * (kk(1, 1) * kk(1, 2) * kk(2, 2).powi(2) + kk(2, 1) * kk(1, 2).powi(2) * kk(2, 2));
        assert!((a - want).norm() < 1e-14, "{a} vs {want}");
    }

    #[test]
    fn bosons_match_fock() {
        let tr = chain(4);
        let k = boxed(&tr);
        let fock = FockOracle::new(&tr, Statistics::Boson, 4, FockLimits::default()).unwrap();
        let (i, f) = (bosons(&[(0, 3), (1, 1)]), bosons(&[(0, 2), (1, 2)]));
        let a = boson_amplitude(&i, &f, &k, 0.7).unwrap();
        let b = fock.amplitude(&i, &f, 0.7).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        let p = bosons(&[(1, 4)]);
        assert!((boson_amplitude(&p, &p, &k, 0.0).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn permanence_needs_all_three_matrices() {
        let tr = chain(3);
        let k = boxed(&tr);
        let limits = FockLimits { max_bosons: 5, ..FockLimits::default() };
        let fock = FockOracle::new(&tr, Statistics::Boson, 5, limits).unwrap();
        let s = bosons(&[(0, 3), (1, 2)]);
        let a = boson_amplitude(&s, &s, &k, 0.6).unwrap();
        let b = fock.amplitude(&s, &s, 0.6).unwrap();
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn fermion_adjudication() {
        let tr = chain(6);
        let k = boxed(&tr);
        let fock = FockOracle::new(&tr, Statistics::Fermion, 2, FockLimits { max_sites: 8, ..FockLimits::default() }).unwrap();
        let (i, f) = (fermions(&[1, 2]), fermions(&[3, 4]));
        let exact = fock.amplitude(&i, &f, 0.5).unwrap();
        let det = fermion_amplitude(&i, &f, &k, 0.5, FermionVariant::Determinant).unwrap();
        let product = fermion_amplitude(&i, &f, &k, 0.5, FermionVariant::PairProduct).unwrap();
        assert!((det - exact).norm() < 1e-10, "{det} vs {exact}");
        assert!((product - exact).norm() > 1e-4, "product formula unexpectedly agrees");
        let kk = |j: i64, i: i64| k(&site(j), &site(i), 0.5).unwrap();
        let shape = kk(3, 1) * kk(4, 1) * kk(3, 2) * kk(4, 2);
        assert!((product - shape).norm() < 1e-15);
    }

    #[test]
    fn selection_rule_and_validation() {
        let tr = chain(4);
        let k = boxed(&tr);
        assert_eq!(boson_amplitude(&bosons(&[(0, 2)]), &bosons(&[(1, 1)]), &k, 0.4).unwrap(), C64::new(0.0, 0.0));
        assert!(fermion_amplitude(&bosons(&[(0, 1)]), &fermions(&[0]), &k, 0.4, FermionVariant::PairProduct).is_err());
    }
}
