//! Orthonormal associated Legendre functions at the equator, with the
//! convention Y_l^m = P_l^m(cos θ) e^{imφ} and ∫|Y_l^m|² dΩ = 1.

use crate::error::domain;
use crate::Result;
use std::f64::consts::PI;

/// P_l^m(0) for l = m ..= lmax (index l - m), by the stable three-term
/// recurrence in l at fixed m.
pub fn legendre_zero_column(m: usize, lmax: usize) -> Vec<f64> {
    if lmax < m {
        return Vec::new();
    }
    let mut pmm = (1.0 / (4.0 * PI)).sqrt() * ((2 * m + 1) as f64).sqrt();
    let mut ratio = 1.0;
    for k in 1..=m {
        ratio *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    pmm *= ratio.sqrt();
    if m % 2 == 1 {
        pmm = -pmm;
    }
    let a = |l: usize| -> f64 {
        let (l, m) = (l as f64, m as f64);
        ((4.0 * l * l - 1.0) / (l * l - m * m)).sqrt()
    };
    let mut out = vec![0.0; lmax - m + 1];
    out[0] = pmm;
    for l in (m + 2..=lmax).step_by(2) {
        let prev = out[l - 2 - m];
        out[l - m] = -a(l) / a(l - 1) * prev;
    }
    out
}

/// Normalized P_l^m(0); exactly zero when l + m is odd.
pub fn assoc_legendre_zero(l: i64, m: i64) -> Result<f64> {
    if l < 0 || m < 0 {
        return domain(format!("need l >= 0 and m >= 0, got l={l}, m={m}"));
    }
    if m > l {
        return domain(format!("order m={m} exceeds degree l={l}"));
    }
    let (l, m) = (l as usize, m as usize);
    Ok(legendre_zero_column(m, l)[l - m])
}
