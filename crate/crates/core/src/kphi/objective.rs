use crate::error::{Error, Result};
use crate::groups::{ball, BallIndex, Element, FiniteFunction, GroupSpec};
use crate::norms::NormingFunction;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which translation action the differences are taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// `(β(g)f)(x) = f(g⁻¹x)`
    Left,
    /// `(α(g)f)(x) = f(xg)`
    Right,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Left => "left",
            Action::Right => "right",
        })
    }
}

impl FromStr for Action {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Action::Left),
            "right" => Ok(Action::Right),
            _ => Err(Error::InvalidInput(format!("unknown action {s:?}"))),
        }
    }
}

fn difference(f: &FiniteFunction, g: &Element, action: Action) -> FiniteFunction {
    match action {
        Action::Right => f.right_difference(g),
        Action::Left => f.left_difference(g),
    }
}

/// `max_{g∈K} ‖α(g)f − f‖_Φ` (upper end of the norm interval).
pub fn objective(f: &FiniteFunction, spec: &GroupSpec, phi: &NormingFunction) -> Result<f64> {
    objective_with(f, spec.generators(), phi, Action::Right)
}

/// The objective over an explicit generator list and action.
pub fn objective_with(f: &FiniteFunction, gens: &[Element], phi: &NormingFunction, action: Action) -> Result<f64> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("empty generating set".into()));
    }
    Ok(gens.iter().map(|g| difference(f, g, action).norm(phi).hi).fold(0.0, f64::max))
}

/// `f` with values clamped to `[0, 1]`; the objective at most doubles.
pub fn truncate_positive(f: &FiniteFunction) -> Result<FiniteFunction> {
    if f.at_identity() != 1.0 {
        return Err(Error::Precondition(format!("f(e) = {} but must be 1", f.at_identity())));
    }
    Ok(f.clamped_unit())
}

/// Dense form of the minimax problem on a ball: `f` lives on `B_R` and every
/// difference `α(g)f − f` is supported in `B_{R+1}`.
#[derive(Debug, Clone)]
pub struct BallProblem {
    pub spec: GroupSpec,
    pub phi: NormingFunction,
    pub radius: usize,
    pub ball: BallIndex,
    /// Number of elements of `B_R`; coordinates past this stay zero.
    pub inner: usize,
}

impl BallProblem {
    pub fn new(spec: &GroupSpec, phi: NormingFunction, radius: usize, cap: usize) -> Result<Self> {
        Self::check(spec, &phi)?;
        let ball = ball(spec, radius + 1, cap)?;
        Self::with_ball(spec, phi, radius, ball)
    }

    /// Reuse an already enumerated `B_{R+1}` (for example from a cache).
    pub fn with_ball(spec: &GroupSpec, phi: NormingFunction, radius: usize, ball: BallIndex) -> Result<Self> {
        Self::check(spec, &phi)?;
        if ball.radius != radius + 1 {
            return Err(Error::InvalidInput(format!("need B_{}, got B_{}", radius + 1, ball.radius)));
        }
        if (0..spec.generators().len()).any(|k| ball.adjacency(k).len() != ball.len()) {
            return Err(Error::InvalidInput("ball adjacency does not match the generators".into()));
        }
        let inner = ball.count_within(radius);
        Ok(BallProblem { spec: spec.clone(), phi, radius, ball, inner })
    }

    fn check(spec: &GroupSpec, phi: &NormingFunction) -> Result<()> {
        if spec.generators().is_empty() {
            return Err(Error::InvalidInput("empty generating set".into()));
        }
        if !spec.is_symmetric() {
            return Err(Error::Precondition(format!("generating set of {spec} must be symmetric")));
        }
        phi.validate()
    }

    pub fn dim(&self) -> usize {
        self.ball.len()
    }

    pub fn delta(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[0] = 1.0;
        v
    }

    fn differences(&self, f: &[f64], k: usize, out: &mut [f64]) {
        let adj = self.ball.adjacency(k);
        for (x, o) in out.iter_mut().enumerate() {
            let shifted = adj[x].map_or(0.0, |y| f[y]);
            *o = shifted - f[x];
        }
    }

    /// Objective and per-generator norms.
    pub fn eval(&self, f: &[f64]) -> f64 {
        let mut d = vec![0.0; self.dim()];
        let mut best = 0.0f64;
        for k in 0..self.spec.generators().len() {
            self.differences(f, k, &mut d);
            best = best.max(self.phi.eval_slice(&d));
        }
        best
    }

    /// Objective and a subgradient restricted to the free coordinates
    /// (`B_R` minus the identity).
    pub fn eval_with_subgradient(&self, f: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut w = vec![0.0; n];
        let (mut best, mut best_k) = (f64::NEG_INFINITY, 0);
        for k in 0..self.spec.generators().len() {
            self.differences(f, k, &mut d);
            let v = self.phi.eval_slice(&d);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        self.differences(f, best_k, &mut d);
        self.phi.value_and_subgradient(&d, &mut w);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let adj = self.ball.adjacency(best_k);
        for x in 0..n {
            if w[x] == 0.0 {
                continue;
            }
            if let Some(y) = adj[x] {
                grad[y] += w[x];
            }
            grad[x] -= w[x];
        }
        grad[0] = 0.0;
        grad[self.inner..].iter_mut().for_each(|g| *g = 0.0);
        best
    }

    pub fn to_function(&self, f: &[f64]) -> FiniteFunction {
        FiniteFunction::from_ball_vector(self.spec.family, &self.ball, f)
    }

    /// Radial profile `min(1, (1 − (d(x) − a)/h)₊)` in word length `d`.
    pub fn radial_profile(&self, a: usize, h: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let d = self.ball.depth(i) as f64;
                (1.0 - (d - a as f64) / h as f64).clamp(0.0, 1.0)
            })
            .collect()
    }
}
