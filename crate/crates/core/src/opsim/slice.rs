use super::tree::{DiagonalRamp, LevelTree};
use crate::error::{Error, Result};
use crate::norms::ValueMultiset;
use crate::sparse::{singular_values, SparseMatrix};
use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// Largest explicit slice we materialise.
const SLICE_CAP: usize = 1 << 22;

/// Explicit vertices of a tree down to `depth`, level by level. Vertex `i`
/// on a branching level has children `2i, 2i+1` on the next level, otherwise
/// the single child `i`. `S₁` sends a vertex to its first child, `S₂` to its
/// last.
#[derive(Debug, Clone)]
pub struct SparseSlice {
    depth: usize,
    offsets: Vec<usize>,
    vertex_depth: Vec<usize>,
    parent: Vec<Option<usize>>,
    kids: Vec<Vec<usize>>,
}

impl SparseSlice {
    pub fn from_tree(tree: &LevelTree, depth: usize) -> Result<Self> {
        if depth as u64 > tree.depth_max() {
            return Err(Error::DepthInsufficient { have: tree.depth_max() as usize, need: depth });
        }
        let mut offsets = vec![0usize];
        let mut widths = Vec::with_capacity(depth + 1);
        for d in 0..=depth as u64 {
            let w =
                tree.width(d).to_usize().filter(|&w| w <= SLICE_CAP).ok_or(Error::ResourceCap { cap: SLICE_CAP })?;
            widths.push(w);
            let next = offsets.last().unwrap() + w;
            if next > SLICE_CAP {
                return Err(Error::ResourceCap { cap: SLICE_CAP });
            }
            offsets.push(next);
        }
        let total = *offsets.last().unwrap();
        let mut vertex_depth = vec![0; total];
        let mut parent = vec![None; total];
        let mut kids = vec![Vec::new(); total];
        for d in 0..=depth {
            for i in 0..widths[d] {
                let v = offsets[d] + i;
                vertex_depth[v] = d;
                if d == depth {
                    continue;
                }
                let children: Vec<usize> = if tree.branching(d as u64) {
                    vec![offsets[d + 1] + 2 * i, offsets[d + 1] + 2 * i + 1]
                } else {
                    vec![offsets[d + 1] + i]
                };
                for &c in &children {
                    parent[c] = Some(v);
                }
                kids[v] = children;
            }
        }
        Ok(SparseSlice { depth, offsets, vertex_depth, parent, kids })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.vertex_depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_depth.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn vertex_depth(&self, v: usize) -> usize {
        self.vertex_depth[v]
    }

    pub fn level(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.kids[v]
    }

    /// `S_j v`; `None` on the bottom level.
    pub fn shift(&self, v: usize, j: u8) -> Option<usize> {
        let k = &self.kids[v];
        match j {
            1 => k.first().copied(),
            2 => k.last().copied(),
            _ => panic!("isometry index {j} must be 1 or 2"),
        }
    }

    /// `S_j` as a 0/1 matrix; bottom-level columns are zero.
    pub fn isometry(&self, j: u8) -> SparseMatrix<i64> {
        let mut m = SparseMatrix::zeros(self.len(), self.len());
        for v in 0..self.len() {
            if let Some(c) = self.shift(v, j) {
                m.set(c, v, 1);
            }
        }
        m
    }

    /// `h·A` for the ramp, as an integer diagonal.
    pub fn ramp_matrix(&self, ramp: &DiagonalRamp) -> SparseMatrix<i64> {
        let diag: Vec<i64> = self.vertex_depth.iter().map(|&d| ramp.scaled(d as u64) as i64).collect();
        SparseMatrix::diagonal(&diag)
    }

    fn check_ramp(&self, ramp: &DiagonalRamp) -> Result<()> {
        if ramp.end() > self.depth as u64 {
            return Err(Error::DepthInsufficient { have: self.depth, need: ramp.end() as usize });
        }
        Ok(())
    }

    /// Value multiset of `A − S_j*AS_j` from the materialised matrices, in
    /// exact integer arithmetic.
    pub fn commutator_spectrum(&self, ramp: &DiagonalRamp, j: u8) -> Result<ValueMultiset> {
        self.check_ramp(ramp)?;
        let a = self.ramp_matrix(ramp);
        let s = self.isometry(j);
        let diff = a.sub(&s.transpose().mul(&a).mul(&s));
        if !diff.is_diagonal() {
            return Err(Error::Invariant("A − S*AS is not diagonal".into()));
        }
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for (_, _, v) in diff.iter() {
            if v < 0 {
                return Err(Error::Invariant("negative entry in A − S*AS".into()));
            }
            *counts.entry(v).or_insert(0) += 1;
        }
        ValueMultiset::from_pairs(counts.into_iter().map(|(v, c)| (v as f64 / ramp.h as f64, c)))
    }

    /// Singular values of `[S_j, A] = S_j A − A S_j` by dense SVD.
    pub fn commutator_singular_values(&self, ramp: &DiagonalRamp, j: u8) -> Result<Vec<f64>> {
        self.check_ramp(ramp)?;
        let a: DMatrix<f64> = self.ramp_matrix(ramp).to_dense() / ramp.h as f64;
        let s = self.isometry(j).to_dense();
        Ok(singular_values(&(&s * &a - &a * &s)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::schedule::Schedule;
    use super::super::tree::{build_trees, commutator_spectrum, DiagonalRamp, Parity};
    use super::*;
    use crate::norms::{gauge_norm, rearrange, NormingFunction};

    #[test]
    fn shifts_are_children_and_isometric() {
        let s = Schedule::constant(1, 12).unwrap();
        let (x, y) = build_trees(&s, 10).unwrap();
        for t in [&x, &y] {
            let sl = SparseSlice::from_tree(t, 8).unwrap();
            for v in 0..sl.len() {
                if sl.vertex_depth(v) == 8 {
                    continue;
                }
                let (a, b) = (sl.shift(v, 1).unwrap(), sl.shift(v, 2).unwrap());
                let mut kids = sl.children(v).to_vec();
                kids.sort();
                let mut got = vec![a, b];
                got.sort();
                got.dedup();
                assert_eq!(got, kids);
                assert_eq!(a == b, sl.children(v).len() == 1);
                assert_eq!(sl.parent(a), Some(v));
            }
            for j in [1, 2] {
                let m = sl.isometry(j);
                let gram = m.transpose().mul(&m);
                assert!(gram.is_diagonal());
                for (v, g) in gram.diagonal_entries().iter().enumerate() {
                    assert_eq!(*g, i64::from(sl.vertex_depth(v) < 8));
                }
            }
        }
    }

    #[test]
    fn explicit_matches_symbolic_root_case() {
        let s = Schedule::constant(1, 12).unwrap();
        let (x, _) = build_trees(&s, 12).unwrap();
        let sl = SparseSlice::from_tree(&x, 12).unwrap();
        let ramp = DiagonalRamp::new(&s, 1, Parity::OddFirst).unwrap();
        let sym = commutator_spectrum(&x, &ramp, 1).unwrap();
        assert_eq!(sym, ValueMultiset::from_pairs([(1.0, 1)]).unwrap());
        assert_eq!(rearrange(&sl.commutator_spectrum(&ramp, 1).unwrap()), rearrange(&sym));
    }

    #[test]
    fn commutator_svd_equals_difference() {
        let s = Schedule::constant(2, 8).unwrap();
        let (x, y) = build_trees(&s, 8).unwrap();
        for (t, parity) in [(&x, Parity::OddFirst), (&y, Parity::EvenFirst)] {
            let sl = SparseSlice::from_tree(t, 8).unwrap();
            let ramp = DiagonalRamp::new(&s, 1, parity).unwrap();
            for j in [1, 2] {
                let sv = sl.commutator_singular_values(&ramp, j).unwrap();
                let diff = sl.commutator_spectrum(&ramp, j).unwrap();
                let lhs = NormingFunction::Macaev.eval_sorted(&sv);
                let rhs = gauge_norm(&diff, &NormingFunction::Macaev);
                assert!(lhs <= rhs.hi * (1.0 + 1e-12) + 1e-12, "{lhs} {rhs}");
                assert!((lhs - rhs.mid()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn too_shallow_rejected() {
        let s = Schedule::constant(3, 4).unwrap();
        let (x, _) = build_trees(&s, 12).unwrap();
        let sl = SparseSlice::from_tree(&x, 4).unwrap();
        let ramp = DiagonalRamp::new(&s, 2, Parity::OddFirst).unwrap();
        assert!(sl.commutator_spectrum(&ramp, 1).is_err());
    }
}
