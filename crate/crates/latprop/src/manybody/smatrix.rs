//! Non-negative integer matrices with fixed row and column sums.

use crate::error::Error;
use crate::Result;

/// Enumeration refuses to produce more matrices than this.
pub const MAX_S_MATRICES: usize = 1_000_000;

/// S_{ji}: particles moving from initial site i to final site j. Row sums
/// are final occupations, column sums initial occupations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl SMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, i: usize) -> u32 {
        self.data[j * self.cols + i]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self { rows: rows.len(), cols, data: rows.iter().flatten().copied().collect() }
    }
}

/// All S with column sums `n` (initial) and row sums `m` (final), in
/// ascending lexicographic order of their row-major entries. Unequal
/// totals give an empty list.
pub fn enumerate_s_matrices(n: &[u32], m: &[u32]) -> Result<Vec<SMatrix>> {
    let total_n: u64 = n.iter().map(|&v| v as u64).sum();
    let total_m: u64 = m.iter().map(|&v| v as u64).sum();
    if total_n != total_m {
        return Ok(Vec::new());
    }
    let (rows, cols) = (m.len(), n.len());
    let mut out = Vec::new();
    let mut cur = vec![0u32; rows * cols];
    let mut col_left = n.to_vec();
    let mut row_left = m.to_vec();
    if !fill(0, rows, cols, &mut cur, &mut row_left, &mut col_left, &mut out) {
        return Err(Error::Resource(format!("more than {MAX_S_MATRICES} S-matrices")));
    }
    Ok(out)
}

fn fill(
    pos: usize,
    rows: usize,
    cols: usize,
    cur: &mut Vec<u32>,
    row_left: &mut [u32],
    col_left: &mut [u32],
    out: &mut Vec<SMatrix>,
) -> bool {
    if pos == rows * cols {
        if out.len() == MAX_S_MATRICES {
            return false;
        }
        out.push(SMatrix { rows, cols, data: cur.clone() });
        return true;
    }
    let (j, i) = (pos / cols, pos % cols);
    let hi = row_left[j].min(col_left[i]);
    // the last column of a row and the last row of a column are forced
    let lo = if i + 1 == cols { row_left[j] } else if j + 1 == rows { col_left[i] } else { 0 };
    if lo > hi {
        return true;
    }
    let top = if i + 1 == cols || j + 1 == rows { lo } else { hi };
    for v in lo..=top {
        // the remaining rows must still be able to absorb this column
        if j + 1 < rows {
            let rest_rows: u32 = row_left[j + 1..].iter().sum();
            if col_left[i] - v > rest_rows {
                continue;
            }
        }
        cur[pos] = v;
        row_left[j] -= v;
        col_left[i] -= v;
        let ok = fill(pos + 1, rows, cols, cur, row_left, col_left, out);
        row_left[j] += v;
        col_left[i] += v;
        if !ok {
            return false;
        }
    }
    cur[pos] = 0;
    true
}

/// Number of such matrices, counted row by row over the remaining column
/// capacities with memoisation; independent of the enumeration above.
pub fn count_s_matrices(n: &[u32], m: &[u32]) -> u128 {
    use std::collections::HashMap;
    fn rows_from(j: usize, m: &[u32], cols: Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), u128>) -> u128 {
        if j == m.len() {
            return if cols.iter().all(|&c| c == 0) { 1 } else { 0 };
        }
        if let Some(&v) = memo.get(&(j, cols.clone())) {
            return v;
        }
        let mut total = 0u128;
        let mut row = vec![0u32; cols.len()];
        compositions(m[j], 0, &cols, &mut row, &mut |r| {
            let next: Vec<u32> = cols.iter().zip(r).map(|(c, x)| c - x).collect();
            total += rows_from(j + 1, m, next, memo);
        });
        memo.insert((j, cols), total);
        total
    }
    fn compositions(left: u32, k: usize, cap: &[u32], row: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if k == cap.len() {
            if left == 0 {
                f(row);
            }
            return;
        }
        for v in 0..=left.min(cap[k]) {
            row[k] = v;
            compositions(left - v, k + 1, cap, row, f);
        }
        row[k] = 0;
    }
    let tn: u64 = n.iter().map(|&v| v as u64).sum();
    let tm: u64 = m.iter().map(|&v| v as u64).sum();
    if tn != tm {
        return 0;
    }
    rows_from(0, m, n.to_vec(), &mut HashMap::new())
}
