use super::ball::BallIndex;
use super::element::{Element, Family};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::norms::{self, gauge_norm, NormingFunction, ValueMultiset};
use std::collections::BTreeMap;

/// A finitely supported real function on a group. Zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFunction {
    family: Family,
    values: BTreeMap<Element, f64>,
}

impl FiniteFunction {
    pub fn zero(family: Family) -> Self {
        FiniteFunction { family, values: BTreeMap::new() }
    }

    pub fn delta(family: Family, at: Element) -> Self {
        let mut f = Self::zero(family);
        f.set(at, 1.0);
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (Element, f64)>>(family: Family, pairs: I) -> Self {
        let mut f = Self::zero(family);
        for (e, v) in pairs {
            f.add_at(e, v);
        }
        f
    }

    /// Function on a ball from a dense vector in ball order.
    pub fn from_ball_vector(family: Family, ball: &BallIndex, values: &[f64]) -> Self {
        Self::from_pairs(
            family,
            values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (ball.element(i).clone(), *v)),
        )
    }

    /// Dense vector in ball order; fails if the support leaves the ball.
    pub fn to_ball_vector(&self, ball: &BallIndex) -> Result<Vec<f64>> {
        let mut out = vec![0.0; ball.len()];
        for (e, v) in &self.values {
            let i = ball.index_of(e).ok_or_else(|| {
                Error::DomainExceeded(format!("{} outside ball of radius {}", self.family.format(e), ball.radius))
            })?;
            out[i] = *v;
        }
        Ok(out)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn get(&self, e: &Element) -> f64 {
        self.values.get(e).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, e: Element, v: f64) {
        if v == 0.0 {
            self.values.remove(&e);
        } else {
            self.values.insert(e, v);
        }
    }

    pub fn add_at(&mut self, e: Element, v: f64) {
        let nv = self.get(&e) + v;
        self.set(e, nv);
    }

    pub fn at_identity(&self) -> f64 {
        self.get(&self.family.identity())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &f64)> {
        self.values.iter()
    }

    pub fn as_map(&self) -> &BTreeMap<Element, f64> {
        &self.values
    }

    /// Multiset of `|f(x)|` over the support.
    pub fn value_multiset(&self) -> ValueMultiset {
        ValueMultiset::from_abs(self.values.values().copied())
    }

    pub fn norm(&self, phi: &NormingFunction) -> Interval {
        gauge_norm(&self.value_multiset(), phi)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Right translate `(α(g)f)(x) = f(xg)`.
    pub fn translate(&self, g: &Element) -> FiniteFunction {
        let pairs = self.values.iter().filter_map(|(s, v)| self.family.right_divide(s, g).map(|x| (x, *v)));
        Self::from_pairs(self.family, pairs)
    }

    /// Left translate `(β(g)f)(x) = f(g⁻¹x)`; on the free monoid this is the
    /// prepend action `δ_s ↦ δ_{gs}`.
    pub fn left_translate(&self, g: &Element) -> FiniteFunction {
        let pairs = self.values.iter().map(|(s, v)| (self.family.multiply(g, s), *v));
        Self::from_pairs(self.family, pairs)
    }

    /// `f̃(x) = f(x⁻¹)`; groups only.
    pub fn inverted(&self) -> Result<FiniteFunction> {
        let mut pairs = Vec::with_capacity(self.len());
        for (s, v) in &self.values {
            let inv =
                self.family.inverse(s).ok_or_else(|| Error::Unsupported(format!("inversion in {}", self.family)))?;
            pairs.push((inv, *v));
        }
        Ok(Self::from_pairs(self.family, pairs))
    }

    fn check_family(&self, other: &FiniteFunction) -> Result<()> {
        if self.family != other.family {
            return Err(Error::InvalidInput(format!("mismatched index domains: {} vs {}", self.family, other.family)));
        }
        Ok(())
    }

    pub fn sub(&self, other: &FiniteFunction) -> Result<FiniteFunction> {
        self.check_family(other)?;
        let mut out = self.clone();
        for (e, v) in &other.values {
            out.add_at(e.clone(), -v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &FiniteFunction) -> Result<FiniteFunction> {
        self.check_family(other)?;
        let mut out = self.clone();
        for (e, v) in &other.values {
            out.add_at(e.clone(), *v);
        }
        Ok(out)
    }

    pub fn scale(&self, a: f64) -> FiniteFunction {
        Self::from_pairs(self.family, self.values.iter().map(|(e, v)| (e.clone(), v * a)))
    }

    /// `Σ_x f(x) g(x)`.
    pub fn pairing(&self, other: &FiniteFunction) -> Result<f64> {
        self.check_family(other)?;
        Ok(norms::pairing(&self.values, &other.values))
    }

    /// Values clamped into `[0, 1]`.
    pub fn clamped_unit(&self) -> FiniteFunction {
        Self::from_pairs(self.family, self.values.iter().map(|(e, v)| (e.clone(), v.clamp(0.0, 1.0))))
    }

    /// `α(g)f − f`.
    pub fn right_difference(&self, g: &Element) -> FiniteFunction {
        self.translate(g).sub(self).expect("same family")
    }

    /// `β(g)f − f`.
    pub fn left_difference(&self, g: &Element) -> FiniteFunction {
        self.left_translate(g).sub(self).expect("same family")
    }
}
