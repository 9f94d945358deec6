//! Ascending-series coefficients C_q^{mn} of the two-index Bessel function,
//! J_{m,n}(x; -i) = Σ_q C_q^{mn} x^q.
//!
//! Equivalently C_q^{mn} = i^{q-m-n} F_q(m,n) / q!, where F_q(m,n) is the
//! (m,n) Fourier coefficient of [cos k1 + cos k2 + cos(k1+k2)]^q.

use crate::error::Error;
use crate::{Result, C64};
use std::sync::OnceLock;

/// Largest order accepted by the table builders.
pub const MAX_TABLE_Q: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqMethod {
    Multinomial,
    Fourier,
}

fn pascal() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = vec![vec![1]];
        for n in 1..=MAX_TABLE_Q {
            let prev = &rows[n - 1];
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

fn binom(n: usize, k: usize) -> u128 {
    pascal()[n][k]
}

/// i^k for any integer k.
pub(crate) fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Solutions (n1..n6) of the restriction system, i.e. all non-negative
/// six-tuples summing to q with n6-n3-n1+n4 = m and n6-n3-n2+n5 = n.
fn restriction_solutions(q: usize, m: i64, n: i64) -> Vec<[usize; 6]> {
    let qi = q as i64;
    let mut out = Vec::new();
    for n1 in 0..=qi {
        for n2 in 0..=(qi - n1) {
            for n3 in 0..=(qi - n1 - n2) {
                let n4 = qi - n - n1 - 2 * n2 - 2 * n3;
                let n5 = qi - m - 2 * n1 - n2 - 2 * n3;
                let n6 = 2 * (n1 + n2) + 3 * n3 + n + m - qi;
                if n4 < 0 || n5 < 0 || n6 < 0 {
                    continue;
                }
                out.push([n1, n2, n3, n4, n5, n6].map(|v| v as usize));
            }
        }
    }
    out
}

fn multinomial(q: usize, parts: &[usize; 6]) -> u128 {
    let mut rest = q;
    let mut acc = 1u128;
    for &p in &parts[..5] {
        acc = acc.saturating_mul(binom(rest, p));
        rest -= p;
    }
    acc
}

/// Constrained multinomial sum, in exact integer arithmetic while it fits
/// in u128. The (-1)^{n1+n2+n3} of the ascending Bessel series cancels
/// against the i^{-l} phase once l is eliminated, so every term is positive.
pub fn cq_multinomial(q: usize, m: i64, n: i64) -> C64 {
    assert!(q <= MAX_TABLE_Q, "order {q} above MAX_TABLE_Q");
    let sols = restriction_solutions(q, m, n);
    if sols.is_empty() {
        return C64::new(0.0, 0.0);
    }
    let mut exact: Option<u128> = Some(0);
    let mut approx = 0.0f64;
    for s in &sols {
        let mult = multinomial(q, s);
        approx += mult as f64;
        exact = exact.and_then(|acc| acc.checked_add(mult));
    }
    let sum = exact.map(|v| v as f64).unwrap_or(approx);
    let denom = 2f64.powi(q as i32) * super::bessel::factorial(q);
    i_pow(q as i64 - m - n) * (sum / denom)
}

/// Fourier route: (i^q/q!) times the mean of e^{-i(mφ+nθ)}[sin φ + sin θ - cos(φ+θ)]^q
/// over an N×N periodic grid, exact once N > 2q.
pub fn cq_fourier(q: usize, m: i64, n: i64) -> C64 {
    let npts = if q <= 20 {
        256
    } else {
        (4 * q + 1).next_power_of_two()
    };
    let h = 2.0 * std::f64::consts::PI / npts as f64;
    let sin: Vec<f64> = (0..npts).map(|a| (a as f64 * h).sin()).collect();
    let cos: Vec<f64> = (0..npts).map(|a| (a as f64 * h).cos()).collect();
    let roots: Vec<C64> = (0..npts).map(|a| C64::from_polar(1.0, -(a as f64) * h)).collect();
    let np = npts as i64;
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..npts {
        let mut row = C64::new(0.0, 0.0);
        for b in 0..npts {
            let base = sin[a] + sin[b] - cos[(a + b) % npts];
            row += roots[(m * a as i64 + n * b as i64).rem_euclid(np) as usize] * base.powi(q as i32);
        }
        acc += row;
    }
    acc / (npts * npts) as f64 * i_pow(q as i64) / super::bessel::factorial(q)
}

pub fn cq_coefficient(q: usize, m: i64, n: i64, method: CqMethod) -> C64 {
    match method {
        CqMethod::Multinomial => cq_multinomial(q, m, n),
        CqMethod::Fourier => cq_fourier(q, m, n),
    }
}

/// Immutable cache of C_q^{mn} for q ≤ max_q. Entries outside the hexagon
/// |m|, |n|, |m-n| ≤ q are zero and not stored.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    max_q: usize,
    rows: Vec<Vec<C64>>,
}

impl CoefficientTable {
    pub fn max_q(&self) -> usize {
        self.max_q
    }

    pub fn get(&self, q: usize, m: i64, n: i64) -> C64 {
        if q > self.max_q {
            return C64::new(0.0, 0.0);
        }
        let qi = q as i64;
        if m.abs() > qi || n.abs() > qi || (m - n).abs() > qi {
            return C64::new(0.0, 0.0);
        }
        let w = 2 * qi + 1;
        self.rows[q][((m + qi) * w + n + qi) as usize]
    }

    /// Same coefficients from the lattice-walk recursion
    /// F_{q+1}(d) = ½ Σ_v F_q(d - v) over the six triangular neighbours,
    /// which is O(q³) for the whole table.
    pub fn from_walk(max_q: usize) -> Result<Self> {
        check_ceiling(max_q)?;
        const STEPS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];
        let mut rows = Vec::with_capacity(max_q + 1);
        // scaled[q] holds F_q / q!
        let mut scaled = vec![1.0f64];
        for q in 0..=max_q {
            let qi = q as i64;
            let w = 2 * qi + 1;
            let row: Vec<C64> = (0..w * w)
                .map(|idx| {
                    let (m, n) = (idx / w - qi, idx % w - qi);
                    i_pow(qi - m - n) * scaled[idx as usize]
                })
                .collect();
            rows.push(row);
            if q == max_q {
                break;
            }
            let wn = w + 2;
            let mut next = vec![0.0f64; (wn * wn) as usize];
            let inv = 1.0 / (2.0 * (q + 1) as f64);
            for m in -(qi + 1)..=(qi + 1) {
                for n in -(qi + 1)..=(qi + 1) {
                    let mut s = 0.0;
                    for (dm, dn) in STEPS {
                        let (pm, pn) = (m - dm, n - dn);
                        if pm.abs() <= qi && pn.abs() <= qi {
                            s += scaled[((pm + qi) * w + pn + qi) as usize];
                        }
                    }
                    next[((m + qi + 1) * wn + n + qi + 1) as usize] = s * inv;
                }
            }
            scaled = next;
        }
        Ok(Self { max_q, rows })
    }
}

fn check_ceiling(max_q: usize) -> Result<()> {
    if max_q > MAX_TABLE_Q {
        return Err(Error::Resource(format!(
            "coefficient table order {max_q} exceeds ceiling {MAX_TABLE_Q}"
        )));
    }
    Ok(())
}

/// Table populated entry by entry with the multinomial sum.
pub fn build_coefficient_table(max_q: usize) -> Result<CoefficientTable> {
    check_ceiling(max_q)?;
    let rows = (0..=max_q)
        .map(|q| {
            let qi = q as i64;
            let w = 2 * qi + 1;
            (0..w * w)
                .map(|idx| {
                    let (m, n) = (idx / w - qi, idx % w - qi);
                    if (m - n).abs() > qi {
                        C64::new(0.0, 0.0)
                    } else {
                        cq_multinomial(q, m, n)
                    }
                })
                .collect()
        })
        .collect();
    Ok(CoefficientTable { max_q, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_entries() {
        assert_eq!(cq_multinomial(0, 0, 0), C64::new(1.0, 0.0));
        assert_eq!(cq_multinomial(2, 5, 0), C64::new(0.0, 0.0));
        assert!(restriction_solutions(2, 5, 0).is_empty());
        let t = build_coefficient_table(0).unwrap();
        assert_eq!(t.get(0, 0, 0), C64::new(1.0, 0.0));
        assert_eq!(t.get(0, 1, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn methods_agree_small() {
        let a = cq_multinomial(4, 1, 1);
        let b = cq_fourier(4, 1, 1);
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn walk_matches_multinomial() {
        let exact = build_coefficient_table(10).unwrap();
        let walk = CoefficientTable::from_walk(10).unwrap();
        for q in 0..=10usize {
            let qi = q as i64;
            for m in -qi - 1..=qi + 1 {
                for n in -qi - 1..=qi + 1 {
                    let d = (exact.get(q, m, n) - walk.get(q, m, n)).norm();
                    assert!(d < 1e-15, "q={q} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn series_reproduces_two_index() {
        let walk = CoefficientTable::from_walk(60).unwrap();
        let x: f64 = 1.3;
        for &(m, n) in &[(0, 0), (2, -1), (3, 3), (-2, 1)] {
            let mut s = C64::new(0.0, 0.0);
            for q in 0..=60 {
                s += walk.get(q, m, n) * x.powi(q as i32);
            }
            let want = super::super::two_index::two_index_bessel(m, n, C64::new(x, 0.0));
            assert!((s - want).norm() < 1e-13, "({m},{n}): {s} vs {want}");
        }
    }

    #[test]
    fn ceiling() {
        assert!(matches!(build_coefficient_table(MAX_TABLE_Q + 1), Err(Error::Resource(_))));
    }
}
