//! A small coordinate-format sparse matrix, enough to materialise shift
//! isometries and diagonal cutoffs on explicit tree slices.

use nalgebra::DMatrix;
use num_traits::{Num, ToPrimitive};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Copy + Num> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.entries.get(&(r, c)).copied().unwrap_or_else(T::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), &v)| ((c, r), v)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut by_row: BTreeMap<usize, Vec<(usize, T)>> = BTreeMap::new();
        for (&(r, c), &v) in &rhs.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (&(i, k), &a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in difference");
        let mut out = self.clone();
        for (&(r, c), &v) in &rhs.entries {
            let cur = out.get(r, c);
            out.set(r, c, cur - v);
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(r, c)| r == c)
    }

    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }
}

impl<T: Copy + Num + ToPrimitive> SparseMatrix<T> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = v.to_f64().expect("finite entry");
        }
        m
    }
}

/// Singular values of a dense matrix, sorted nonincreasing.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_is_isometry() {
        let mut s = SparseMatrix::<i64>::zeros(3, 3);
        s.set(1, 0, 1);
        s.set(2, 1, 1);
        let sts = s.transpose().mul(&s);
        assert_eq!(sts.diagonal_entries(), vec![1, 1, 0]);
        assert!(sts.is_diagonal());
    }

    #[test]
    fn svd_of_weighted_shift() {
        let mut s = SparseMatrix::<f64>::zeros(3, 3);
        s.set(1, 0, -2.0);
        s.set(2, 1, 0.5);
        let sv = singular_values(&s.to_dense());
        assert!((sv[0] - 2.0).abs() < 1e-12 && (sv[1] - 0.5).abs() < 1e-12 && sv[2].abs() < 1e-12);
    }
}
