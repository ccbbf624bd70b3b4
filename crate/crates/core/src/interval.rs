//! Closed real intervals carried by every norm evaluation.
//!
//! Exact-path values are degenerate intervals (`lo == hi`); values routed
//! through asymptotic harmonic numbers carry their truncation and rounding
//! error in the width.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] inverted");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Widen both ends by `rel` times the magnitude plus `abs`.
    pub fn widen(&self, rel: f64, abs: f64) -> Self {
        Interval { lo: self.lo - rel * self.lo.abs() - abs, hi: self.hi + rel * self.hi.abs() + abs }
    }

    /// Multiply by a nonnegative scalar.
    pub fn scale(&self, a: f64) -> Self {
        debug_assert!(a >= 0.0);
        Interval { lo: self.lo * a, hi: self.hi * a }
    }

    pub fn max(&self, other: &Interval) -> Self {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn sqrt(&self) -> Self {
        Interval { lo: self.lo.max(0.0).sqrt(), hi: self.hi.max(0.0).sqrt() }
    }

    pub fn powf(&self, e: f64) -> Self {
        Interval { lo: self.lo.max(0.0).powf(e), hi: self.hi.max(0.0).powf(e) }
    }

    /// Quotient of two positive intervals.
    pub fn div_pos(&self, other: &Interval) -> Self {
        debug_assert!(other.lo > 0.0);
        Interval { lo: self.lo / other.hi, hi: self.hi / other.lo }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, a: f64) -> Interval {
        if a >= 0.0 {
            self.scale(a)
        } else {
            Interval { lo: self.hi * a, hi: self.lo * a }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}
