//! Complementary-branching trees, their shift isometries and ramp cutoffs,
//! the `φ`-driven depth schedule, and the tensor-pair free-monoid orbit.
//!
//! Depth `d` has the root at `d = 0`. With partial sums `S(p)` of the
//! schedule, the X-tree has one child per vertex on `S(2k−2) ≤ d < S(2k−1)`
//! and two elsewhere, the Y-tree the opposite; the root has two children in
//! both trees.

mod crosscheck;
mod orbit;
mod schedule;
mod slice;
mod tree;

pub use crosscheck::{regular_representation_crosscheck, CrosscheckReport};
pub use orbit::{
    diagonal_tensor_lower_bound, explicit_commutator_norms, tensor_orbit, DiagonalBound, OrbitTable, Word,
};
pub use schedule::{build_schedule, Schedule};
pub use slice::SparseSlice;
pub use tree::{
    build_trees, commutator_ideal_norm, commutator_spectrum, dump_levels, sabotaged_trees, schedule_norms,
    DiagonalRamp, LevelDump, LevelTree, NormRow, Parity, ScheduleDump,
};
