//! Harmonic numbers `H_n = 1 + 1/2 + … + 1/n` for arbitrarily large `n`.
//!
//! Below [`EXACT_THRESHOLD`] values come from a compensated prefix table and
//! are returned as point intervals. Above it the expansion
//! `ln n + γ + 1/(2n) − 1/(12n²)` is used; its remainder lies in
//! `(0, 1/(120 n⁴))`, which together with a rounding pad forms the returned
//! interval.

use crate::interval::Interval;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::sync::OnceLock;

/// Largest `n` served by exact summation.
pub const EXACT_THRESHOLD: u64 = 1_000_000;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative rounding pad for asymptotic-path results.
const ROUND_PAD: f64 = 4.0 * f64::EPSILON;

/// Largest integer exactly representable as f64.
const F64_EXACT_INT: u64 = 1 << 53;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = EXACT_THRESHOLD as usize;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..=n {
            neumaier_add(&mut sum, &mut comp, 1.0 / k as f64);
            out.push(sum + comp);
        }
        out
    })
}

#[inline]
fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// `H_n` for `n ≤ EXACT_THRESHOLD`.
///
/// # Panics
///
/// Panics if `n` exceeds the exact threshold.
pub fn harmonic_exact(n: u64) -> f64 {
    assert!(n <= EXACT_THRESHOLD, "harmonic_exact({n}) above threshold");
    table()[n as usize]
}

/// Natural logarithm of a positive big integer, accurate to a few ulps.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("top 64 bits fit");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn to_f64_or_inf(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Truncated expansion and its remainder bound at `n` (both as f64).
fn asymptotic(n: &BigUint) -> (f64, f64) {
    let nf = to_f64_or_inf(n);
    let base = ln_big(n) + EULER_GAMMA + 0.5 / nf - 1.0 / (12.0 * nf * nf);
    let rem = 1.0 / (120.0 * nf.powi(4));
    (base, rem)
}

/// `H_n` as an interval; a point interval whenever `n ≤ EXACT_THRESHOLD`.
pub fn harmonic(n: &BigUint) -> Interval {
    if let Some(small) = n.to_u64().filter(|&s| s <= EXACT_THRESHOLD) {
        return Interval::point(harmonic_exact(small));
    }
    let (base, rem) = asymptotic(n);
    Interval::new(base, base + rem).widen(ROUND_PAD, 0.0)
}

pub fn harmonic_u64(n: u64) -> Interval {
    harmonic(&BigUint::from(n))
}

/// `H_{k+m} − H_k = Σ_{j=k+1}^{k+m} 1/j`, the Macaev weight of a flat block
/// of `m` equal values starting after rank `k`.
pub fn harmonic_range(k: &BigUint, m: &BigUint) -> Interval {
    if m.is_zero() {
        return Interval::ZERO;
    }
    let end = k + m;
    if let Some(ms) = m.to_u64().filter(|&s| s <= EXACT_THRESHOLD) {
        if k.is_zero() {
            return Interval::point(harmonic_exact(ms));
        }
        // Short blocks are summed term by term to avoid cancellation.
        let kf = to_f64_or_inf(k);
        if kf.is_infinite() {
            // Every term is below 1e-308; the block weight is negligible but positive.
            return Interval::new(0.0, ms as f64 * f64::MIN_POSITIVE);
        }
        let (mut sum, mut comp) = (0.0, 0.0);
        for j in (1..=ms).rev() {
            neumaier_add(&mut sum, &mut comp, 1.0 / (kf + j as f64));
        }
        let value = sum + comp;
        let exact_ints = end.to_u64().is_some_and(|e| e <= F64_EXACT_INT);
        return if exact_ints { Interval::point(value) } else { Interval::point(value).widen(ROUND_PAD, 0.0) };
    }
    if let Some(ks) = k.to_u64().filter(|&s| s <= EXACT_THRESHOLD) {
        return harmonic(&end) - Interval::point(harmonic_exact(ks));
    }
    // Both ends large: difference of expansions, remainders in (0, 1/(120n⁴)).
    let kf = to_f64_or_inf(k);
    let mf = to_f64_or_inf(m);
    let ef = to_f64_or_inf(&end);
    let log_ratio = if kf.is_finite() && mf.is_finite() { (mf / kf).ln_1p() } else { ln_big(&end) - ln_big(k) };
    let base = log_ratio + 0.5 / ef - 0.5 / kf - 1.0 / (12.0 * ef * ef) + 1.0 / (12.0 * kf * kf);
    let lo_rem = 1.0 / (120.0 * kf.powi(4));
    let hi_rem = 1.0 / (120.0 * ef.powi(4));
    let pad = ROUND_PAD * ln_big(&end).max(1.0);
    Interval::new(base - lo_rem - pad, base + hi_rem + pad)
}
