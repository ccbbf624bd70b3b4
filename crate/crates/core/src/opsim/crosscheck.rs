use crate::error::{Error, Result};
use crate::groups::{ball, Element, FiniteFunction, GroupSpec};
use crate::norms::NormingFunction;
use crate::sparse::singular_values;
use nalgebra::DMatrix;
use serde::Serialize;

/// Largest radius searched when locating the support of `f`.
const SUPPORT_SEARCH: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckReport {
    /// Number of ball elements the operators act on.
    pub dimension: usize,
    /// Singular values of `[λ(g), M_f]`, nonincreasing.
    pub singular_values: Vec<f64>,
    /// `|β(g)f − f|` padded with zeros, nonincreasing.
    pub difference_values: Vec<f64>,
    pub max_deviation: f64,
    pub commutator_norm: f64,
    pub difference_norm: f64,
}

/// Builds `λ(g)` and `M_f` on a ball containing `supp f ∪ g·supp f` and
/// compares the singular values of their commutator with the values of the
/// left difference `β(g)f − f`.
pub fn regular_representation_crosscheck(
    spec: &GroupSpec,
    g: &Element,
    f: &FiniteFunction,
    phi: &NormingFunction,
    cap: usize,
) -> Result<CrosscheckReport> {
    if f.family() != spec.family || !spec.family.has_inverses() {
        return Err(Error::InvalidInput("f must live on the group".into()));
    }
    if f.iter().any(|(_, v)| !(0.0..=1.0).contains(v)) {
        return Err(Error::Precondition("f must take values in [0, 1]".into()));
    }
    // Smallest balls holding supp f and g.
    let mut support_radius = None;
    let mut g_len = None;
    for r in 0..=SUPPORT_SEARCH {
        let b = ball(spec, r, cap)?;
        if support_radius.is_none() && f.iter().all(|(x, _)| b.contains(x)) {
            support_radius = Some(r);
        }
        if g_len.is_none() && b.contains(g) {
            g_len = Some(r);
        }
        if support_radius.is_some() && g_len.is_some() {
            break;
        }
    }
    let (Some(r), Some(l)) = (support_radius, g_len) else {
        return Err(Error::DomainExceeded(format!("support not within radius {SUPPORT_SEARCH}")));
    };
    let b = ball(spec, r + l, cap)?;
    let n = b.len();
    let mut lambda = DMatrix::zeros(n, n);
    for (i, x) in b.elements().iter().enumerate() {
        if let Some(j) = b.index_of(&spec.multiply(g, x)) {
            lambda[(j, i)] = 1.0;
        }
    }
    let mf = DMatrix::from_fn(n, n, |i, j| if i == j { f.get(b.element(i)) } else { 0.0 });
    let sv = singular_values(&(&lambda * &mf - &mf * &lambda));
    let diff = f.left_difference(g);
    let mut values: Vec<f64> = diff.iter().map(|(_, v)| v.abs()).collect();
    if values.len() > n {
        return Err(Error::Invariant("left difference escapes the ball".into()));
    }
    values.resize(n, 0.0);
    values.sort_by(|a, b| b.total_cmp(a));
    let max_deviation = sv.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if max_deviation > 1e-12 {
        return Err(Error::Invariant(format!("singular values deviate by {max_deviation}")));
    }
    Ok(CrosscheckReport {
        dimension: n,
        commutator_norm: phi.eval_sorted(&sv),
        difference_norm: diff.norm(phi).hi,
        singular_values: sv,
        difference_values: values,
        max_deviation,
    })
}
