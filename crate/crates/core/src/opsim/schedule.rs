use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::norms::{phi_rank, NormingFunction};
use num_bigint::BigUint;
use serde::Serialize;

/// Largest `h` the schedule search will try.
const SEARCH_CAP: u64 = 1 << 62;

/// Nondecreasing positive integers `h₁ ≤ h₂ ≤ …` with partial sums `S(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    h: Vec<u64>,
    /// `S(0) = 0, S(1), …, S(len)`.
    sums: Vec<u64>,
}

impl Schedule {
    pub fn new(h: Vec<u64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidInput("empty schedule".into()));
        }
        if h[0] == 0 || h.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("schedule must be positive and nondecreasing".into()));
        }
        let mut sums = vec![0u64];
        for &x in &h {
            let next = sums.last().unwrap().checked_add(x).ok_or(Error::ResourceCap { cap: u64::MAX as usize })?;
            sums.push(next);
        }
        Ok(Schedule { h, sums })
    }

    /// `len` copies of `value`.
    pub fn constant(value: u64, len: usize) -> Result<Self> {
        Schedule::new(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `h_k`, 1-based.
    pub fn h(&self, k: usize) -> u64 {
        self.h[k - 1]
    }

    pub fn values(&self) -> &[u64] {
        &self.h
    }

    /// `S(p) = h₁ + … + h_p`.
    pub fn partial_sum(&self, p: usize) -> u64 {
        self.sums[p]
    }

    pub fn partial_sums(&self) -> &[u64] {
        &self.sums[1..]
    }
}

/// Largest power-of-two exponent materialised for `φ(2^S h)`.
const SHIFT_CAP: u64 = 1 << 26;

/// `φ(2^shift · h) / h`.
pub(crate) fn schedule_ratio(phi: &NormingFunction, shift: u64, h: u64) -> Result<Interval> {
    if shift > SHIFT_CAP {
        return Err(Error::ResourceCap { cap: SHIFT_CAP as usize });
    }
    let m = BigUint::from(h) << shift;
    Ok(phi_rank(phi, &m)?.scale(1.0 / h as f64))
}

fn admissible(phi: &NormingFunction, shift: u64, h: u64, n: u64) -> Result<bool> {
    Ok(schedule_ratio(phi, shift, h)?.hi <= 1.0 / n as f64)
}

/// Greedy schedule of length `2·n_max`: `h_k` is the least integer
/// `≥ h_{k−1}` with `φ(2^{S(k−1)} h_k) / h_k ≤ 1/⌈k/2⌉`.
pub fn build_schedule(phi: &NormingFunction, n_max: usize) -> Result<Schedule> {
    phi.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let tail = phi_rank(phi, &(BigUint::from(1u32) << 60u32))?.lo / 2f64.powi(60);
    if tail > 0.5 {
        return Err(Error::NoSchedule(format!("{phi}: φ(m)/m does not tend to 0")));
    }
    let mut h: Vec<u64> = Vec::with_capacity(2 * n_max);
    let mut s = 0u64;
    for k in 1..=2 * n_max {
        let n = k.div_ceil(2) as u64;
        let floor = h.last().copied().unwrap_or(1);
        let found = if admissible(phi, s, floor, n)? {
            floor
        } else {
            let mut lo = floor;
            let mut hi = floor.max(1);
            loop {
                hi = hi.saturating_mul(2);
                if hi > SEARCH_CAP {
                    return Err(Error::NoSchedule(format!("{phi}: no h_{k} below 2^62")));
                }
                if admissible(phi, s, hi, n)? {
                    break;
                }
                lo = hi;
            }
            // lo fails, hi passes.
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if admissible(phi, s, mid, n)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        h.push(found);
        s = s.checked_add(found).ok_or_else(|| Error::NoSchedule("partial sums overflow".into()))?;
    }
    Schedule::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_direct(n: u64) -> f64 {
        (1..=n).map(|k| 1.0 / k as f64).sum()
    }

    #[test]
    fn macaev_first_terms() {
        let s = build_schedule(&NormingFunction::Macaev, 2).unwrap();
        assert_eq!(&s.values()[..3], &[1, 3, 12]);
        assert!(harmonic_direct(4) / 2.0 > 1.0 && harmonic_direct(6) / 3.0 <= 1.0);
        assert!(harmonic_direct(16 * 11) / 11.0 > 0.5 && harmonic_direct(16 * 12) / 12.0 <= 0.5);
        assert_eq!(s.partial_sum(3), 16);
    }

    #[test]
    fn macaev_schedule_is_minimal() {
        let s = build_schedule(&NormingFunction::Macaev, 6).unwrap();
        for k in 1..=s.len() {
            let n = k.div_ceil(2) as u64;
            let shift = s.partial_sum(k - 1);
            let h = s.h(k);
            assert!(schedule_ratio(&NormingFunction::Macaev, shift, h).unwrap().hi <= 1.0 / n as f64);
            let prev = if k == 1 { 1 } else { s.h(k - 1) };
            if h > prev {
                assert!(schedule_ratio(&NormingFunction::Macaev, shift, h - 1).unwrap().hi > 1.0 / n as f64);
            }
        }
        assert!(s.h(12) > 1_000_000);
    }

    #[test]
    fn trace_is_refused() {
        assert!(matches!(build_schedule(&NormingFunction::Trace, 3), Err(Error::NoSchedule(_))));
        assert!(matches!(build_schedule(&NormingFunction::Schatten(1.0), 3), Err(Error::NoSchedule(_))));
    }

    #[test]
    fn schatten_two_schedule() {
        // sqrt(2^S h)/h ≤ 1/n  ⇔  h ≥ n² 2^S; boundary cases fail on the
        // padded interval and move up by one.
        let s = build_schedule(&NormingFunction::Schatten(2.0), 1).unwrap();
        assert_eq!(s.h(1), 1);
        assert!(s.h(2) == 2 || s.h(2) == 3);
        // h_4 ≥ 4·2^{S(3)} exceeds the search range.
        assert!(matches!(build_schedule(&NormingFunction::Schatten(2.0), 2), Err(Error::NoSchedule(_))));
    }

    #[test]
    fn huge_shift_hits_cap() {
        assert!(matches!(schedule_ratio(&NormingFunction::Macaev, 1 << 30, 1), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn rejects_decreasing() {
        assert!(Schedule::new(vec![2, 1]).is_err());
        assert!(Schedule::new(vec![0]).is_err());
    }
}
