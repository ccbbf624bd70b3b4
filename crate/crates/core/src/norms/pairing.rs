use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// `Σ_x f(x) g(x)` over finitely supported signed maps.
pub fn pairing<K: Ord>(f: &BTreeMap<K, f64>, g: &BTreeMap<K, f64>) -> f64 {
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    small.iter().filter_map(|(k, a)| large.get(k).map(|b| a * b)).sum()
}

/// Pairing of two vectors over the same index set.
pub fn pairing_slices(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::InvalidInput(format!("pairing over mismatched index domains ({} vs {})", f.len(), g.len())));
    }
    Ok(f.iter().zip(g).map(|(a, b)| a * b).sum())
}
