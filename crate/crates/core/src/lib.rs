//! Rearrangement-invariant norms on finitely supported functions, certified
//! two-sided bounds for the generator-difference minimax problem on Cayley
//! balls, and a level-count simulation of complementary-branching tree
//! isometries and their tensor product.
//!
//! Module map:
//!
//! - [`norms`]: value multisets, the Macaev (Lorentz `(∞,1)`) norm, its dual
//!   `ℓ₁⁺`, and general symmetric gauges.
//! - [`groups`]: canonical forms for built-in finitely generated groups,
//!   Cayley balls, right and left translation.
//! - [`kphi`]: the minimax objective, upper bounds by optimization, lower
//!   bounds by dual flow certificates.
//! - [`transfer`]: pushing lower bounds through Lipschitz injections.
//! - [`opsim`]: trees, shift isometries, ramp cutoffs, commutator spectra and
//!   the tensor-pair orbit.
//! - [`cli`]: the batch front end behind the `macaevlab` binary.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod groups;
pub mod harmonic;
pub mod interval;
pub mod kphi;
pub mod norms;
pub mod opsim;
pub mod sparse;
pub mod transfer;

pub use error::{Error, Result};
pub use interval::Interval;

/// Library version embedded in every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
