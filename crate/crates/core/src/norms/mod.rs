//! Rearrangement-invariant norms evaluated on value multisets.
//!
//! Every norm here depends only on the decreasing rearrangement of the
//! absolute values, so the carrier type is a multiset of `(value, count)`
//! pairs with unbounded counts rather than a dense vector.

mod gauge;
mod multiset;
mod pairing;

pub use gauge::{dual_plus_norm, dual_plus_norm_scan, gauge_norm, macaev_norm, phi_rank, NormingFunction};
pub use multiset::{rearrange, ValueMultiset};
pub use pairing::{pairing, pairing_slices};
