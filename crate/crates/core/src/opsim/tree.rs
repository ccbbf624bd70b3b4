use super::schedule::{schedule_ratio, Schedule};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::norms::{gauge_norm, NormingFunction, ValueMultiset};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

/// Which partial-sum intervals are non-branching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// X-tree: one child on `[S(2k−2), S(2k−1))`.
    OddFirst,
    /// Y-tree: one child on `[S(2k−1), S(2k))`.
    EvenFirst,
}

impl Parity {
    pub fn other(self) -> Parity {
        match self {
            Parity::OddFirst => Parity::EvenFirst,
            Parity::EvenFirst => Parity::OddFirst,
        }
    }
}

/// A level-homogeneous rooted tree described by run-length segments of its
/// per-depth branching flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTree {
    parity: Parity,
    depth_max: u64,
    /// `(start, end, branching)` covering `[0, depth_max)` in order.
    segments: Vec<(u64, u64, bool)>,
}

impl LevelTree {
    /// Tree to `depth_max` for `schedule`; needs `depth_max ≤ S(len)`.
    pub fn new(schedule: &Schedule, parity: Parity, depth_max: u64) -> Result<Self> {
        let cover = schedule.partial_sum(schedule.len());
        if depth_max > cover {
            return Err(Error::DepthInsufficient { have: cover as usize, need: depth_max as usize });
        }
        let mut segments = Vec::new();
        for j in 1..=schedule.len() {
            let (a, b) = (schedule.partial_sum(j - 1), schedule.partial_sum(j).min(depth_max));
            if a >= b {
                break;
            }
            let branching = match parity {
                Parity::OddFirst => j % 2 == 0,
                Parity::EvenFirst => j % 2 == 1,
            };
            if a == 0 && !branching {
                segments.push((0, 1, true));
                if b > 1 {
                    segments.push((1, b, false));
                }
            } else {
                segments.push((a, b, branching));
            }
        }
        Ok(LevelTree { parity, depth_max, segments })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn depth_max(&self) -> u64 {
        self.depth_max
    }

    pub fn segments(&self) -> &[(u64, u64, bool)] {
        &self.segments
    }

    /// Whether vertices at depth `d < depth_max` have two children.
    pub fn branching(&self, d: u64) -> bool {
        assert!(d < self.depth_max, "depth {d} beyond the tree");
        let i = self.segments.partition_point(|s| s.1 <= d);
        self.segments[i].2
    }

    pub fn children(&self, d: u64) -> u32 {
        if self.branching(d) {
            2
        } else {
            1
        }
    }

    /// Number of branching depths in `[0, d)`.
    pub fn branch_count(&self, d: u64) -> u64 {
        assert!(d <= self.depth_max, "depth {d} beyond the tree");
        self.segments.iter().take_while(|s| s.0 < d).filter(|s| s.2).map(|s| s.1.min(d) - s.0).sum()
    }

    /// Vertices at depth `d ≤ depth_max`: `2^{branch_count(d)}`.
    pub fn width(&self, d: u64) -> BigUint {
        BigUint::one() << self.branch_count(d)
    }

    /// `Σ_{d=lo}^{hi−1} width(d)`, summed in closed form per segment.
    pub fn width_sum(&self, lo: u64, hi: u64) -> BigUint {
        assert!(hi <= self.depth_max + 1 && lo <= hi);
        let mut total = BigUint::zero();
        let mut d = lo;
        while d < hi {
            let b = self.branch_count(d);
            if d == self.depth_max {
                total += BigUint::one() << b;
                break;
            }
            let i = self.segments.partition_point(|s| s.1 <= d);
            let (_, end, branching) = self.segments[i];
            let stop = end.min(hi);
            let len = stop - d;
            if branching {
                total += ((BigUint::one() << len) - 1u32) << b;
            } else {
                total += BigUint::from(len) << b;
            }
            d = stop;
        }
        total
    }
}

/// X and Y trees for `schedule` up to `depth`, with complementarity checked
/// at every depth `1 ≤ d < depth`.
pub fn build_trees(schedule: &Schedule, depth: u64) -> Result<(LevelTree, LevelTree)> {
    let x = LevelTree::new(schedule, Parity::OddFirst, depth)?;
    let y = LevelTree::new(schedule, Parity::EvenFirst, depth)?;
    if let Some(d) = first_shared_flag(&x, &y) {
        return Err(Error::Invariant(format!("trees share a branching flag at depth {d}")));
    }
    Ok((x, y))
}

/// Two trees with the same parity, so both have one child on the same
/// depths; used to show the orbit check catches collisions.
pub fn sabotaged_trees(schedule: &Schedule, depth: u64) -> Result<(LevelTree, LevelTree)> {
    let x = LevelTree::new(schedule, Parity::OddFirst, depth)?;
    Ok((x.clone(), x))
}

/// First depth `d ≥ 1` where both trees agree on branching.
pub(crate) fn first_shared_flag(x: &LevelTree, y: &LevelTree) -> Option<u64> {
    let depth = x.depth_max.min(y.depth_max);
    let mut cuts: Vec<u64> =
        x.segments.iter().chain(&y.segments).map(|s| s.0).filter(|&d| d >= 1 && d < depth).collect();
    cuts.push(1.min(depth));
    cuts.sort_unstable();
    cuts.dedup();
    cuts.into_iter().filter(|&d| d >= 1 && d < depth).find(|&d| x.branching(d) == y.branching(d))
}

/// Depth profile of the cutoff `A(n)` (X side) or `B(n)` (Y side): 1 up to
/// `base`, then falling by `1/h` per level to 0 at `base + h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagonalRamp {
    pub n: usize,
    pub parity: Parity,
    pub base: u64,
    pub h: u64,
}

impl DiagonalRamp {
    /// `A(n)`: base `S(2n−2)`, slope `h_{2n−1}`; `B(n)`: base `S(2n−1)`, slope `h_{2n}`.
    pub fn new(schedule: &Schedule, n: usize, parity: Parity) -> Result<Self> {
        if n == 0 || 2 * n > schedule.len() {
            return Err(Error::InvalidInput(format!("ramp index {n} outside the schedule")));
        }
        let k = match parity {
            Parity::OddFirst => 2 * n - 1,
            Parity::EvenFirst => 2 * n,
        };
        Ok(DiagonalRamp { n, parity, base: schedule.partial_sum(k - 1), h: schedule.h(k) })
    }

    /// `h · f(d)`, an integer in `[0, h]`.
    pub fn scaled(&self, d: u64) -> u64 {
        if d <= self.base {
            self.h
        } else {
            self.h.saturating_sub(d - self.base)
        }
    }

    pub fn value(&self, d: u64) -> f64 {
        self.scaled(d) as f64 / self.h as f64
    }

    /// First depth where the profile vanishes.
    pub fn end(&self) -> u64 {
        self.base + self.h
    }
}

/// Value multiset of `A − S_j*AS_j` from level counts: `f(d) − f(d+1)` is
/// `1/h` exactly on `base ≤ d < base + h`, with multiplicity the widths there.
pub fn commutator_spectrum(tree: &LevelTree, ramp: &DiagonalRamp, j: u8) -> Result<ValueMultiset> {
    if j != 1 && j != 2 {
        return Err(Error::InvalidInput(format!("isometry index {j} must be 1 or 2")));
    }
    if tree.parity != ramp.parity {
        return Err(Error::Precondition("ramp and tree have different parities".into()));
    }
    if ramp.end() > tree.depth_max {
        return Err(Error::DepthInsufficient { have: tree.depth_max as usize, need: ramp.end() as usize });
    }
    let count = tree.width_sum(ramp.base, ramp.end());
    ValueMultiset::new(vec![(1.0 / ramp.h as f64, count)])
}

/// `|·|_Φ` of a commutator spectrum.
pub fn commutator_ideal_norm(spectrum: &ValueMultiset, phi: &NormingFunction) -> Interval {
    gauge_norm(spectrum, phi)
}

/// One side of the schedule guarantee at index `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub n: usize,
    pub parity: Parity,
    pub h: u64,
    /// Rank of the commutator difference, decimal.
    #[serde(serialize_with = "crate::opsim::tree::decimal")]
    pub rank: BigUint,
    pub rank_bound_holds: bool,
    pub norm: Interval,
    /// `φ(2^{base} h)/h`, the schedule inequality's left side.
    pub schedule_bound: Interval,
    pub target: f64,
}

pub(crate) fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// Commutator norms of `A(n)` (X side) and `B(n)` (Y side) for every `n`
/// the schedule covers.
pub fn schedule_norms(schedule: &Schedule, phi: &NormingFunction) -> Result<Vec<NormRow>> {
    let (x, y) = build_trees(schedule, schedule.partial_sum(schedule.len()))?;
    let mut rows = Vec::new();
    for n in 1..=schedule.len() / 2 {
        for tree in [&x, &y] {
            let ramp = DiagonalRamp::new(schedule, n, tree.parity)?;
            let spectrum = commutator_spectrum(tree, &ramp, 1)?;
            let rank = spectrum.total_count();
            let bound_rank = BigUint::from(ramp.h) << ramp.base;
            rows.push(NormRow {
                n,
                parity: tree.parity,
                h: ramp.h,
                rank_bound_holds: rank <= bound_rank,
                rank,
                norm: commutator_ideal_norm(&spectrum, phi),
                schedule_bound: schedule_ratio(phi, ramp.base, ramp.h)?,
                target: 1.0 / n as f64,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDump {
    pub d: u64,
    #[serde(rename = "branching_X")]
    pub branching_x: bool,
    #[serde(rename = "branching_Y")]
    pub branching_y: bool,
    #[serde(rename = "width_X")]
    pub width_x: String,
    #[serde(rename = "width_Y")]
    pub width_y: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDump {
    pub phi: String,
    pub h: Vec<u64>,
    #[serde(rename = "S")]
    pub s: Vec<u64>,
    pub levels: Vec<LevelDump>,
}

/// Schedule with per-depth flags and widths for `0 ≤ d < depth`.
pub fn dump_levels(schedule: &Schedule, phi: &NormingFunction, depth: u64) -> Result<ScheduleDump> {
    let (x, y) = build_trees(schedule, depth)?;
    let levels = (0..depth)
        .map(|d| LevelDump {
            d,
            branching_x: x.branching(d),
            branching_y: y.branching(d),
            width_x: x.width(d).to_str_radix(10),
            width_y: y.width(d).to_str_radix(10),
        })
        .collect();
    Ok(ScheduleDump {
        phi: phi.to_string(),
        h: schedule.values().to_vec(),
        s: schedule.partial_sums().to_vec(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::super::schedule::build_schedule;
    use super::*;

    /// Direct recurrence `width(d+1) = width(d)·children(d)`.
    fn widths_by_recurrence(t: &LevelTree) -> Vec<BigUint> {
        let mut w = vec![BigUint::one()];
        for d in 0..t.depth_max() {
            let next = w.last().unwrap() * t.children(d);
            w.push(next);
        }
        w
    }

    #[test]
    fn constant_schedule_flags() {
        let s = Schedule::constant(1, 8).unwrap();
        let (x, y) = build_trees(&s, 6).unwrap();
        let fx: Vec<bool> = (0..6).map(|d| x.branching(d)).collect();
        let fy: Vec<bool> = (0..6).map(|d| y.branching(d)).collect();
        assert_eq!(fx, [true, true, false, true, false, true]);
        assert_eq!(fy, [true, false, true, false, true, false]);
        let wx: Vec<u64> = (0..=5).map(|d| x.width(d).try_into().unwrap()).collect();
        let wy: Vec<u64> = (0..=5).map(|d| y.width(d).try_into().unwrap()).collect();
        assert_eq!(wx, [1, 2, 4, 4, 8, 8]);
        assert_eq!(wy, [1, 2, 2, 4, 4, 8]);
        for d in 1..6 {
            assert_ne!(x.branching(d), y.branching(d));
        }
    }

    #[test]
    fn macaev_width_at_sixteen() {
        let s = build_schedule(&NormingFunction::Macaev, 2).unwrap();
        let (x, y) = build_trees(&s, 16).unwrap();
        assert_eq!(x.width(16), BigUint::from(16u32));
        let rec = widths_by_recurrence(&x);
        for d in 0..=16 {
            assert_eq!(x.width(d), rec[d as usize]);
        }
        assert_eq!(y.width(16), widths_by_recurrence(&y)[16]);
        assert!(first_shared_flag(&x, &y).is_none());
    }

    #[test]
    fn width_sum_matches_direct() {
        let s = Schedule::new(vec![1, 2, 3, 3, 5, 8]).unwrap();
        for parity in [Parity::OddFirst, Parity::EvenFirst] {
            let t = LevelTree::new(&s, parity, 22).unwrap();
            let rec = widths_by_recurrence(&t);
            for lo in 0..=22u64 {
                for hi in lo..=22 {
                    let direct: BigUint = rec[lo as usize..hi as usize].iter().sum();
                    assert_eq!(t.width_sum(lo, hi), direct, "{lo}..{hi}");
                }
            }
        }
    }

    #[test]
    fn sabotage_shares_flags() {
        let s = Schedule::constant(1, 8).unwrap();
        let (x, y) = sabotaged_trees(&s, 8).unwrap();
        assert_eq!(first_shared_flag(&x, &y), Some(1));
    }

    #[test]
    fn ramp_profiles() {
        let s = build_schedule(&NormingFunction::Macaev, 3).unwrap();
        for n in 1..3 {
            let a = DiagonalRamp::new(&s, n, Parity::OddFirst).unwrap();
            let a2 = DiagonalRamp::new(&s, n + 1, Parity::OddFirst).unwrap();
            assert_eq!(a.end(), s.partial_sum(2 * n - 1));
            for d in 0..a2.end() + 2 {
                assert!(a.value(d) <= a2.value(d));
                assert!((0.0..=1.0).contains(&a.value(d)));
            }
            assert_eq!(a.value(a.end()), 0.0);
            let b = DiagonalRamp::new(&s, n, Parity::EvenFirst).unwrap();
            assert_eq!(b.end(), s.partial_sum(2 * n));
        }
    }

    #[test]
    fn spectrum_and_norm_examples() {
        let flat = ValueMultiset::from_pairs([(1.0 / 3.0, 6)]).unwrap();
        let v = commutator_ideal_norm(&flat, &NormingFunction::Macaev);
        assert!((v.mid() - 49.0 / 60.0).abs() < 1e-15);
        let s = build_schedule(&NormingFunction::Macaev, 2).unwrap();
        let (x, _) = build_trees(&s, 16).unwrap();
        let ramp = DiagonalRamp::new(&s, 2, Parity::OddFirst).unwrap();
        let spec = commutator_spectrum(&x, &ramp, 1).unwrap();
        let direct: BigUint = (4..16).map(|d| x.width(d)).sum();
        assert_eq!(spec.total_count(), direct);
        assert!(spec.total_count() <= BigUint::from(12u32) << 4u32);
        assert!(commutator_spectrum(&x, &DiagonalRamp::new(&s, 2, Parity::EvenFirst).unwrap(), 1).is_err());
    }

    #[test]
    fn macaev_schedule_guarantee() {
        let s = build_schedule(&NormingFunction::Macaev, 6).unwrap();
        let rows = schedule_norms(&s, &NormingFunction::Macaev).unwrap();
        assert_eq!(rows.len(), 12);
        for r in &rows {
            assert!(r.norm.hi <= r.target, "n={} {:?}: {}", r.n, r.parity, r.norm);
            assert!(r.rank_bound_holds);
            assert!(r.norm.hi <= r.schedule_bound.hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dump_has_decimal_widths() {
        let s = build_schedule(&NormingFunction::Macaev, 2).unwrap();
        let d = dump_levels(&s, &NormingFunction::Macaev, 17).unwrap();
        assert_eq!(d.levels[16].width_x, "16");
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"branching_X\"") && text.contains("\"S\""));
    }
}
