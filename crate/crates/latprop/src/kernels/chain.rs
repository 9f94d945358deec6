//! Homogeneous chain and square lattice kernels.

use crate::error::ensure_forward;
use crate::specfun::{bessel_j, bessel_j_range, j_signed};
use crate::specfun::cq::i_pow;
use crate::{Result, C64};

/// Orders kept beyond the argument; J_n(x) is below 1e-100 past this margin
/// for the arguments used here.
pub(crate) const CHAIN_MARGIN: usize = 160;

/// Table of J_n(2Δt), n = 0..=2Δt + margin.
pub(crate) fn chain_table(t: f64, delta: f64) -> Vec<f64> {
    let x = 2.0 * delta * t;
    bessel_j_range(x.ceil() as usize + CHAIN_MARGIN, x)
}

/// K(d) = (-i)^d J_d(2Δt) from a chain table.
#[inline]
pub(crate) fn chain_from_table(table: &[f64], d: i64) -> C64 {
    i_pow(-d) * j_signed(table, d)
}

/// ⟨n| e^{-iHt} |m⟩ on the homogeneous chain: i^{m-n} J_{n-m}(2Δt).
pub fn k_monomer(n: i64, m: i64, t: f64, delta: f64) -> Result<C64> {
    ensure_forward(t)?;
    Ok(i_pow(m - n) * bessel_j(n - m, 2.0 * delta * t))
}

/// Square lattice kernel as a product of two chain kernels.
pub fn k_square(da: (i64, i64), t: f64, delta: f64) -> Result<C64> {
    ensure_forward(t)?;
    let table = chain_table(t, delta);
    Ok(chain_from_table(&table, da.0) * chain_from_table(&table, da.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(k_monomer(3, 3, 0.0, 1.0).unwrap(), C64::new(1.0, 0.0));
        let v = k_monomer(1, 0, 1.0, 1.0).unwrap();
        assert!((v - C64::new(0.0, -bessel_j(1, 2.0))).norm() < 1e-15);
        let norm: f64 = (-60..=60).map(|m| k_monomer(0, m, 3.0, 1.0).unwrap().norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-13);
        assert!(k_monomer(0, 0, -1.0, 1.0).is_err());
    }

    #[test]
    fn chain_symmetry_is_exact() {
        for d in -7..=7 {
            assert_eq!(k_monomer(d, 0, 2.3, 1.1).unwrap(), k_monomer(0, d, 2.3, 1.1).unwrap());
        }
    }

    #[test]
    fn table_agrees_with_direct() {
        let table = chain_table(2.5, 0.8);
        for d in -12..=12 {
            let a = chain_from_table(&table, d);
            let b = k_monomer(d, 0, 2.5, 0.8).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn square_is_a_product() {
        let a = k_square((1, 2), 1.4, 1.0).unwrap();
        let b = k_monomer(1, 0, 1.4, 1.0).unwrap() * k_monomer(2, 0, 1.4, 1.0).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert_eq!(k_square((0, 0), 0.0, 1.0).unwrap(), C64::new(1.0, 0.0));
    }
}
