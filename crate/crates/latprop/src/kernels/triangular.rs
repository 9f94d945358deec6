//! Triangular lattice kernel: two-index Bessel form and the equivalent
//! sum over three chain kernels.

use super::chain::{chain_from_table, chain_table, CHAIN_MARGIN};
use crate::error::ensure_forward;
use crate::specfun::bessel::bessel_j_range_complex;
use crate::specfun::cq::i_pow;
use crate::specfun::two_index::{two_index_from_complex_table, two_index_from_table, triple_sum_limit};
use crate::specfun::bessel_j_range;
use crate::{Result, C64};

/// Closed form i^{-d1-d2} conj(J_{d1,d2}(2Δt; -i)), i.e. the triple product
/// with weight +i^s.
pub fn k_triangular(da: (i64, i64), t: f64, delta: f64) -> Result<C64> {
    ensure_forward(t)?;
    let x = 2.0 * delta * t;
    let limit = triple_sum_limit(da.0, da.1, x);
    let top = (limit + da.0.abs().max(da.1.abs())) as usize;
    let table = bessel_j_range(top, x);
    Ok(i_pow(-da.0 - da.1) * two_index_from_table(da.0, da.1, &table, limit).conj())
}

/// Σ_s K(d1-s) K(d2-s) K(s) over chain kernels, |s| ≤ ceil(2Δt) + 30
/// around the window where all three factors are non-negligible.
pub fn k_triangular_chain_sum(da: (i64, i64), t: f64, delta: f64) -> Result<C64> {
    ensure_forward(t)?;
    let table = chain_table(t, delta);
    Ok(chain_sum_from_table(&table, da, t, delta))
}

pub(crate) fn chain_sum_from_table(table: &[f64], da: (i64, i64), t: f64, delta: f64) -> C64 {
    let reach = (2.0 * delta * t).ceil() as i64 + 30;
    let mut acc = C64::new(0.0, 0.0);
    for s in -reach..=reach {
        acc += chain_from_table(table, da.0 - s) * chain_from_table(table, da.1 - s) * chain_from_table(table, s);
    }
    acc
}

/// Precomputed J_n(x) for a complex x, used for ⟨e^{ik·d} e^{ixS_k}⟩.
pub(crate) struct TriExpTable {
    table: Vec<C64>,
    ax: f64,
}

impl TriExpTable {
    pub(crate) fn new(x: C64) -> Self {
        let ax = x.norm();
        Self { table: bessel_j_range_complex(ax.ceil() as usize + CHAIN_MARGIN, x), ax }
    }

    /// ⟨e^{ik·d} e^{ixS_k}⟩ = i^{d1+d2} J_{d1,d2}(x; -i).
    pub(crate) fn fourier(&self, d: (i64, i64)) -> C64 {
        let limit = triple_sum_limit(d.0, d.1, self.ax);
        i_pow(d.0 + d.1) * two_index_from_complex_table(d.0, d.1, &self.table, limit)
    }
}
