//! Two-index Bessel functions J_{m,n}(x; ξ) at ξ = -i, built from triple
//! products of ordinary Bessel functions.

use super::bessel::{bessel_j_range, bessel_j_range_complex, j_signed};
use crate::C64;

/// Range of the triple-product sum: |l| <= max(|m|, |n|) + |x| + 30.
pub fn triple_sum_limit(m: i64, n: i64, ax: f64) -> i64 {
    m.abs().max(n.abs()) + ax.ceil() as i64 + 30
}

/// Triple product sum using a precomputed table J_0..J_N(x) for real x.
pub fn two_index_from_table(m: i64, n: i64, table: &[f64], limit: i64) -> C64 {
    // (-i)^l cycles 1, -i, -1, i
    const PHASE: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
    ];
    let mut acc = C64::new(0.0, 0.0);
    for l in -limit..=limit {
        let w = j_signed(table, m - l) * j_signed(table, n - l) * j_signed(table, l);
        acc += PHASE[l.rem_euclid(4) as usize] * w;
    }
    acc
}

/// J_{m,n}(x; -i) = Σ_l (-i)^l J_{m-l}(x) J_{n-l}(x) J_l(x).
pub fn two_index_bessel(m: i64, n: i64, x: C64) -> C64 {
    let limit = triple_sum_limit(m, n, x.norm());
    let top = (limit + m.abs().max(n.abs())) as usize;
    if x.im == 0.0 {
        let table = bessel_j_range(top, x.re);
        return two_index_from_table(m, n, &table, limit);
    }
    let table = bessel_j_range_complex(top, x);
    two_index_from_complex_table(m, n, &table, limit)
}

/// Complex-argument variant of [`two_index_from_table`].
pub fn two_index_from_complex_table(m: i64, n: i64, table: &[C64], limit: i64) -> C64 {
    let get = |k: i64| -> C64 {
        let d = k.unsigned_abs() as usize;
        let v = table.get(d).copied().unwrap_or_default();
        if k < 0 && d % 2 == 1 {
            -v
        } else {
            v
        }
    };
    const PHASE: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
    ];
    let mut acc = C64::new(0.0, 0.0);
    for l in -limit..=limit {
        acc += PHASE[l.rem_euclid(4) as usize] * get(m - l) * get(n - l) * get(l);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial() {
        assert!((two_index_bessel(0, 0, C64::new(0.0, 0.0)) - 1.0).norm() < 1e-16);
        assert!(two_index_bessel(1, 0, C64::new(0.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn generating_function() {
        let x = 0.7;
        let table = bessel_j_range(80, x);
        let grid = [(0.0, 0.0), (0.4, -1.1), (2.5, 0.9), (-3.0, 1.7)];
        for &(k1, k2) in &grid {
            let mut acc = C64::new(0.0, 0.0);
            for m in -18i64..=18 {
                for n in -18i64..=18 {
                    let phase = C64::from_polar(1.0, m as f64 * (k1 + std::f64::consts::FRAC_PI_2)
                        + n as f64 * (k2 + std::f64::consts::FRAC_PI_2));
                    acc += phase * two_index_from_table(m, n, &table, triple_sum_limit(m, n, x));
                }
            }
            let s: f64 = f64::cos(k1) + f64::cos(k2) + f64::cos(k1 + k2);
            let want = C64::new(0.0, x * s).exp();
            assert!((acc - want).norm() < 1e-10, "k=({k1},{k2})");
        }
    }

    #[test]
    fn complex_path_matches_real() {
        let a = two_index_bessel(2, -1, C64::new(3.0, 0.0));
        let b = two_index_bessel(2, -1, C64::new(3.0, 1e-300));
        assert!((a - b).norm() < 1e-12);
    }
}
