use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;

/// A finite multiset of nonnegative reals with exact, unbounded counts.
///
/// Entries may be unsorted and may repeat a value; [`rearrange`] produces the
/// canonical decreasing form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueMultiset {
    entries: Vec<(f64, BigUint)>,
}

impl ValueMultiset {
    pub fn new(entries: Vec<(f64, BigUint)>) -> Result<Self> {
        for (v, c) in &entries {
            if v.is_nan() || v.is_infinite() {
                return Err(Error::InvalidInput(format!("non-finite value {v}")));
            }
            if *v < 0.0 {
                return Err(Error::NegativeValue(*v));
            }
            if c.is_zero() {
                return Err(Error::InvalidInput("zero count".into()));
            }
        }
        Ok(ValueMultiset { entries })
    }

    /// Convenience constructor from machine-sized counts.
    pub fn from_pairs<I: IntoIterator<Item = (f64, u64)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(v, c)| (v, BigUint::from(c))).collect())
    }

    /// One entry per value; rejects negative values.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        Self::new(values.into_iter().map(|v| (v, BigUint::one())).collect())
    }

    /// One entry per absolute value. Zeros are dropped.
    pub fn from_abs<I: IntoIterator<Item = f64>>(values: I) -> Self {
        ValueMultiset {
            entries: values.into_iter().map(f64::abs).filter(|v| *v != 0.0).map(|v| (v, BigUint::one())).collect(),
        }
    }

    pub fn flat(value: f64, count: BigUint) -> Result<Self> {
        Self::new(vec![(value, count)])
    }

    pub fn entries(&self) -> &[(f64, BigUint)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_count(&self) -> BigUint {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Multiply every value by `a ≥ 0`.
    pub fn scale(&self, a: f64) -> Result<Self> {
        if a < 0.0 {
            return Err(Error::NegativeValue(a));
        }
        Ok(ValueMultiset { entries: self.entries.iter().map(|(v, c)| (v * a, c.clone())).collect() })
    }

    /// Sorted, merged, zero-free copy.
    pub fn nonzero_rearranged(&self) -> ValueMultiset {
        let mut r = rearrange(self);
        r.entries.retain(|(v, _)| *v != 0.0);
        r
    }

    /// Expand into a plain vector; `None` when the total count exceeds `cap`.
    pub fn expand(&self, cap: usize) -> Option<Vec<f64>> {
        let total = self.total_count().to_usize()?;
        if total > cap {
            return None;
        }
        let mut out = Vec::with_capacity(total);
        for (v, c) in &self.entries {
            let c = c.to_usize()?;
            out.extend(std::iter::repeat_n(*v, c));
        }
        Some(out)
    }
}

/// Decreasing rearrangement: values sorted nonincreasing, equal values merged.
pub fn rearrange(v: &ValueMultiset) -> ValueMultiset {
    let mut sorted = v.entries.clone();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    let mut merged: Vec<(f64, BigUint)> = Vec::with_capacity(sorted.len());
    for (value, count) in sorted {
        match merged.last_mut() {
            Some((last, c)) if *last == value => *c += count,
            _ => merged.push((value, count)),
        }
    }
    ValueMultiset { entries: merged }
}

impl Serialize for ValueMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: Vec<(f64, String)> = self.entries.iter().map(|(v, c)| (*v, c.to_str_radix(10))).collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueMultiset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire: Vec<(f64, String)> = Vec::deserialize(d)?;
        let mut entries = Vec::with_capacity(wire.len());
        for (v, c) in wire {
            let count = c.parse::<BigUint>().map_err(|e| serde::de::Error::custom(format!("bad count {c:?}: {e}")))?;
            entries.push((v, count));
        }
        ValueMultiset::new(entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(f64, u64)]) -> ValueMultiset {
        ValueMultiset::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn rearrange_sorts_descending() {
        assert_eq!(rearrange(&ms(&[(0.0, 1), (3.0, 1), (1.0, 1)])), ms(&[(3.0, 1), (1.0, 1), (0.0, 1)]));
    }

    #[test]
    fn rearrange_empty_and_constant() {
        assert_eq!(rearrange(&ValueMultiset::default()), ValueMultiset::default());
        assert_eq!(rearrange(&ms(&[(1.0, 4)])), ms(&[(1.0, 4)]));
    }

    #[test]
    fn rearrange_merges_equal_values() {
        let r = rearrange(&ms(&[(2.0, 1), (1.0, 2), (2.0, 3)]));
        assert_eq!(r, ms(&[(2.0, 4), (1.0, 2)]));
        assert_eq!(r.total_count(), BigUint::from(6u8));
    }

    #[test]
    fn negative_values_rejected() {
        assert!(matches!(ValueMultiset::from_values([1.0, -0.5]), Err(Error::NegativeValue(_))));
    }

    #[test]
    fn json_counts_are_decimal_strings() {
        let big = BigUint::from(1u8) << 100u32;
        let v = ValueMultiset::new(vec![(0.5, big.clone())]).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, format!("[[0.5,\"{big}\"]]"));
        let back: ValueMultiset = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ValueMultiset>("[[-1.0,\"2\"]]").is_err());
        assert!(serde_json::from_str::<ValueMultiset>("[[1.0,\"0\"]]").is_err());
    }
}
