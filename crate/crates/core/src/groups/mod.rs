//! Built-in finitely generated groups (and the free monoid), Cayley balls,
//! and the translation actions on finitely supported functions.
//!
//! Conventions: the right action is `(α(g)f)(x) = f(xg)` and the left action
//! is `(β(g)f)(x) = f(g⁻¹x)`. Balls are built by right multiplication, so
//! `B_R` is the set of products of at most `R` generators.

mod ball;
mod element;
mod function;
mod spec;

pub use ball::{ball, BallIndex, DEFAULT_BALL_CAP};
pub use element::{Element, Family};
pub use function::FiniteFunction;
pub use spec::GroupSpec;
