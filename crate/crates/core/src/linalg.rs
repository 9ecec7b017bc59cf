//! Compressed sparse column storage and the handful of kernels the solvers need.
//!
//! Network instances are sparse (one column of `B` per directed edge, diagonal
//! `E`), and the Bellman operator only touches matrices through column dot
//! products, so CSC is the natural layout.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, col_ptr: vec![0; ncols + 1], row_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v))).expect("diagonal in range")
    }

    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {nrows}x{ncols} matrix")));
            }
            entries.push((c, r, v));
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut col_ptr = vec![0; ncols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (c, r, v) in entries {
            if last == Some((c, r)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((c, r));
            row_idx.push(r);
            vals.push(v);
            col_ptr[c + 1] += 1;
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut m = Self { nrows, ncols, col_ptr, row_idx, vals };
        m.drop_zeros();
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<f64>], ncols: usize) -> Result<Self> {
        let mut triplets = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Dimension(format!("row {r} has {} entries, expected {ncols}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(rows.len(), ncols, triplets)
    }

    fn drop_zeros(&mut self) {
        if self.vals.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut col_ptr = vec![0; self.ncols + 1];
        let mut row_idx = Vec::with_capacity(self.row_idx.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for c in 0..self.ncols {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                if self.vals[k] != 0.0 {
                    row_idx.push(self.row_idx[k]);
                    vals.push(self.vals[k]);
                }
            }
            col_ptr[c + 1] = row_idx.len();
        }
        self.col_ptr = col_ptr;
        self.row_idx = row_idx;
        self.vals = vals;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row >= self.nrows || col >= self.ncols {
            return 0.0;
        }
        let (rows, vals) = self.col(col);
        match rows.binary_search(&row) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Row indices and values of the stored entries of column `col`, rows ascending.
    pub fn col(&self, col: usize) -> (&[usize], &[f64]) {
        let span = self.col_ptr[col]..self.col_ptr[col + 1];
        (&self.row_idx[span.clone()], &self.vals[span])
    }

    /// Iterates stored entries in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |c| {
            let (rows, vals) = self.col(c);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, c, v))
        })
    }

    /// Entries sorted row-major, as used by the triplet file encoding.
    pub fn triplets_row_major(&self) -> Vec<(usize, usize, f64)> {
        let mut t: Vec<_> = self.iter().collect();
        t.sort_by_key(|e| (e.0, e.1));
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, c, v) in self.iter() {
            out[r][c] = v;
        }
        out
    }

    /// Smallest stored value, if any entries are stored.
    pub fn min_entry(&self) -> Option<f64> {
        self.vals.iter().copied().reduce(f64::min)
    }

    /// `(column col) · x`.
    #[inline]
    pub fn col_dot(&self, col: usize, x: &[f64]) -> f64 {
        let (rows, vals) = self.col(col);
        rows.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum()
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for c in 0..self.ncols {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            let (rows, vals) = self.col(c);
            for (&r, &v) in rows.iter().zip(vals) {
                y[r] += v * xc;
            }
        }
        y
    }

    /// `y = Mᵀ x`.
    pub fn tmul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.nrows);
        (0..self.ncols).map(|c| self.col_dot(c, x)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(r, c, v)| (c, r, v))).expect("transpose in range")
    }

    /// Row `row` as a dense vector.
    pub fn row_dense(&self, row: usize) -> Vec<f64> {
        (0..self.ncols).map(|c| self.get(row, c)).collect()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= factor);
        m.drop_zeros();
        m
    }

    pub fn all_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0), (1, 1, 0.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let dense = vec![vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 3.0]];
        let m = SparseMatrix::from_dense(&dense, 3).unwrap();
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 2.0]);
        assert_eq!(m.tmul_vec(&[1.0, 2.0]), vec![1.0, 0.0, 6.0]);
        assert_eq!(m.transpose().to_dense(), vec![vec![1.0, 0.0], vec![2.0, -1.0], vec![0.0, 3.0]]);
        assert_eq!(m.min_entry(), Some(-1.0));
    }

    #[test]
    fn empty_shapes() {
        let m = SparseMatrix::zeros(3, 0);
        assert_eq!(m.shape(), (3, 0));
        assert_eq!(m.to_dense(), vec![Vec::<f64>::new(); 3]);
        assert_eq!(m.min_entry(), None);
        assert!(m.tmul_vec(&[1.0, 2.0, 3.0]).is_empty());
    }
}
