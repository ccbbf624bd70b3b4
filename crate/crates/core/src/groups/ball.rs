use super::element::Element;
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use std::collections::HashMap;

pub const DEFAULT_BALL_CAP: usize = 5_000_000;

/// The ball `B_R` of products of at most `R` generators, with indexed
/// elements and right-multiplication adjacency.
///
/// Elements are ordered breadth-first; within one sphere, by canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct BallIndex {
    pub radius: usize,
    elements: Vec<Element>,
    depth: Vec<usize>,
    index: HashMap<Element, usize>,
    /// `adjacency[k][i]` is the index of `elements[i]·K[k]`, if inside.
    adjacency: Vec<Vec<Option<usize>>>,
}

impl BallIndex {
    /// Reassemble from an element list in ball order (used by the cache).
    pub fn from_parts(spec: &GroupSpec, radius: usize, elements: Vec<Element>, depth: Vec<usize>) -> Result<Self> {
        if elements.len() != depth.len() {
            return Err(Error::InvalidInput("ball element/depth length mismatch".into()));
        }
        let index: HashMap<Element, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != elements.len() {
            return Err(Error::InvalidInput("duplicate ball elements".into()));
        }
        let adjacency = spec
            .generators()
            .iter()
            .map(|g| elements.iter().map(|x| index.get(&spec.multiply(x, g)).copied()).collect())
            .collect();
        Ok(BallIndex { radius, elements, depth, index, adjacency })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depth
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    /// Adjacency table for generator number `k`.
    pub fn adjacency(&self, k: usize) -> &[Option<usize>] {
        &self.adjacency[k]
    }

    /// Number of elements of word length at most `r` (a prefix of the order).
    pub fn count_within(&self, r: usize) -> usize {
        self.depth.partition_point(|&d| d <= r)
    }
}

/// Breadth-first closure of the identity under right multiplication by `K`.
pub fn ball(spec: &GroupSpec, radius: usize, cap: usize) -> Result<BallIndex> {
    let mut elements = vec![spec.identity()];
    let mut depth = vec![0usize];
    let mut index: HashMap<Element, usize> = HashMap::new();
    index.insert(spec.identity(), 0);
    let mut frontier = 0..1usize;
    for r in 1..=radius {
        let mut sphere: Vec<Element> = Vec::new();
        for i in frontier.clone() {
            for g in spec.generators() {
                let y = spec.multiply(&elements[i], g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), usize::MAX);
                    sphere.push(y);
                }
            }
        }
        if elements.len() + sphere.len() > cap {
            return Err(Error::ResourceCap { cap });
        }
        sphere.sort();
        let start = elements.len();
        for (j, y) in sphere.into_iter().enumerate() {
            index.insert(y.clone(), start + j);
            elements.push(y);
            depth.push(r);
        }
        frontier = start..elements.len();
    }
    let adjacency = spec
        .generators()
        .iter()
        .map(|g| elements.iter().map(|x| index.get(&spec.multiply(x, g)).copied()).collect())
        .collect();
    Ok(BallIndex { radius, elements, depth, index, adjacency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Family;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn free_ball_sizes_match_closed_form() {
        for n in 2u8..=3 {
            let g = GroupSpec::standard(Family::Free(n));
            for r in 0..=4usize {
                let b = ball(&g, r, DEFAULT_BALL_CAP).unwrap();
                let n = n as usize;
                let closed = (n * (2 * n - 1).pow(r as u32) - 1) / (n - 1);
                assert_eq!(b.len(), closed, "free({n}) R={r}");
            }
        }
        assert_eq!(ball(&spec("free:2"), 2, DEFAULT_BALL_CAP).unwrap().len(), 17);
    }

    #[test]
    fn abelian_ball_sizes() {
        assert_eq!(ball(&spec("zd:1"), 3, DEFAULT_BALL_CAP).unwrap().len(), 7);
        assert_eq!(ball(&spec("zd:2"), 2, DEFAULT_BALL_CAP).unwrap().len(), 13);
    }

    #[test]
    fn balls_are_nested_prefixes() {
        for s in ["free:2", "lamplighter", "heisenberg", "zd:1;gens=aa,aaa", "monoid:2"] {
            let g = spec(s);
            let small = ball(&g, 2, DEFAULT_BALL_CAP).unwrap();
            let big = ball(&g, 3, DEFAULT_BALL_CAP).unwrap();
            assert_eq!(&big.elements()[..small.len()], small.elements(), "{s}");
            assert_eq!(big.count_within(2), small.len());
        }
    }

    #[test]
    fn monoid_ball_counts_words() {
        assert_eq!(ball(&spec("monoid:2"), 8, DEFAULT_BALL_CAP).unwrap().len(), 511);
    }

    #[test]
    fn adjacency_is_right_multiplication() {
        let g = spec("free:2");
        let b = ball(&g, 2, DEFAULT_BALL_CAP).unwrap();
        for (k, gen) in g.generators().iter().enumerate() {
            for (i, x) in b.elements().iter().enumerate() {
                let y = g.multiply(x, gen);
                assert_eq!(b.adjacency(k)[i], b.index_of(&y));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(ball(&spec("free:3"), 6, 100), Err(Error::ResourceCap { cap: 100 })));
    }

    #[test]
    fn deterministic_order() {
        let g = spec("lamplighter");
        assert_eq!(ball(&g, 4, DEFAULT_BALL_CAP).unwrap(), ball(&g, 4, DEFAULT_BALL_CAP).unwrap());
    }
}
