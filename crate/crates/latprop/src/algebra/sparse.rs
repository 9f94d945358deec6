//! Row-sparse complex matrices; enough arithmetic for commutator checks.

use crate::C64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    n: usize,
    /// Per row: (column, value), columns ascending and unique.
    rows: Vec<Vec<(usize, C64)>>,
}

fn compress(acc: BTreeMap<usize, C64>) -> Vec<(usize, C64)> {
    acc.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect()
}

impl SparseOp {
    pub fn zeros(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let rows = d.iter().enumerate().map(|(i, v)| if *v == C64::new(0.0, 0.0) { vec![] } else { vec![(i, *v)] }).collect();
        Self { n: d.len(), rows }
    }

    /// Sums duplicate (row, column) entries.
    pub fn from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in entries {
            assert!(i < n && j < n, "entry ({i}, {j}) outside {n}×{n}");
            *acc[i].entry(j).or_default() += v;
        }
        Self { n, rows: acc.into_iter().map(compress).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BTreeMap::new();
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k] {
                        *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += a * b;
                    }
                }
                compress(acc)
            })
            .collect();
        Self { n: self.n, rows }
    }

    /// a·self + b·other.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(x, y)| {
                let mut acc = BTreeMap::new();
                for &(j, v) in x {
                    *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += a * v;
                }
                for &(j, v) in y {
                    *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += b * v;
                }
                compress(acc)
            })
            .collect();
        Self { n: self.n, rows }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, a: C64) -> Self {
        let rows = self.rows.iter().map(|r| r.iter().map(|&(j, v)| (j, a * v)).collect()).collect();
        Self { n: self.n, rows }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.n,
            self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (j, i, v.conj()))),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, a)| a * v[j]).sum()).collect()
    }

    /// Largest |entry| over rows where `mask` is true.
    pub fn max_abs_rows(&self, mask: &[bool]) -> f64 {
        self.rows
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .flat_map(|(r, _)| r.iter().map(|e| e.1.norm()))
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] = v;
            }
        }
        m
    }
}
