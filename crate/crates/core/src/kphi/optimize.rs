use super::certificate::{certify_lower, Certificate};
use super::objective::{objective, Action, BallProblem};
use crate::error::{Error, Result};
use crate::groups::{FiniteFunction, GroupSpec, DEFAULT_BALL_CAP};
use crate::norms::NormingFunction;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Subgradient,
    ProfileFamily,
    Coordinate,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Subgradient => "subgradient",
            Method::ProfileFamily => "profile_family",
            Method::Coordinate => "coordinate",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subgradient" => Ok(Method::Subgradient),
            "profile_family" | "profile" => Ok(Method::ProfileFamily),
            "coordinate" => Ok(Method::Coordinate),
            _ => Err(Error::InvalidInput(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerOptions {
    pub iterations: usize,
    pub seed: u64,
    pub ball_cap: usize,
    /// Feasible starting point (support in `B_R`, value 1 at `e`).
    pub warm_start: Option<FiniteFunction>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { iterations: 400, seed: 0x5eed, ball_cap: DEFAULT_BALL_CAP, warm_start: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Objective of `δ_e`.
    pub start_value: f64,
    /// Best radial profile `(a, h)` and its value.
    pub best_profile: Option<(usize, usize, f64)>,
    pub evaluations: usize,
    pub improvements: usize,
}

/// A feasible point and its objective, an upper bound on `c_Φ(G, K, R)`.
#[derive(Debug, Clone)]
pub struct MinimaxResult {
    pub value: f64,
    pub minimizer: FiniteFunction,
    pub radius: usize,
    pub phi: NormingFunction,
    pub method: Method,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

fn profile_grid(radius: usize) -> Vec<(usize, usize)> {
    let mut steps = vec![1usize];
    let mut s = 2;
    while s <= radius + 1 {
        steps.push(s);
        if s * 3 / 2 <= radius + 1 && s >= 2 {
            steps.push(s * 3 / 2);
        }
        s *= 2;
    }
    steps.sort_unstable();
    steps.dedup();
    let mut offsets = vec![0usize];
    offsets.extend(steps.iter().copied().filter(|&a| a < radius));
    let mut grid = Vec::new();
    for &a in &offsets {
        for &h in &steps {
            if a + h <= radius + 1 {
                grid.push((a, h));
            }
        }
        grid.push((a, radius + 1 - a));
    }
    grid.sort_unstable();
    grid.dedup();
    grid
}

struct Search<'a> {
    problem: &'a BallProblem,
    best: Vec<f64>,
    best_value: f64,
    evaluations: usize,
    improvements: usize,
}

impl<'a> Search<'a> {
    fn offer(&mut self, f: &[f64]) -> f64 {
        let v = self.problem.eval(f);
        self.evaluations += 1;
        if v < self.best_value {
            self.best_value = v;
            self.best.copy_from_slice(f);
            self.improvements += 1;
        }
        v
    }

    fn subgradient(&mut self, iterations: usize) {
        let p = self.problem;
        let mut f = self.best.clone();
        let mut g = vec![0.0; p.dim()];
        let gamma0 = 0.25 * self.best_value;
        for k in 0..iterations {
            let v = p.eval_with_subgradient(&f, &mut g);
            self.evaluations += 1;
            if v < self.best_value {
                self.best_value = v;
                self.best.copy_from_slice(&f);
                self.improvements += 1;
            }
            let norm2: f64 = g.iter().map(|x| x * x).sum();
            if norm2 == 0.0 {
                break;
            }
            let target = self.best_value - gamma0 / ((k + 1) as f64).sqrt();
            let step = (v - target) / norm2;
            for (x, d) in f.iter_mut().zip(&g) {
                *x -= step * d;
            }
        }
        let v = p.eval(&f);
        self.evaluations += 1;
        if v < self.best_value {
            self.best_value = v;
            self.best.copy_from_slice(&f);
            self.improvements += 1;
        }
    }

    fn coordinate(&mut self, budget: usize, seed: u64) {
        let p = self.problem;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (1..p.inner).collect();
        let mut f = self.best.clone();
        let mut current = self.best_value;
        let mut step = 0.25;
        let mut used = 0;
        while step > 1e-4 && used < budget && !order.is_empty() {
            order.shuffle(&mut rng);
            let mut improved = false;
            for &i in &order {
                for delta in [step, -step] {
                    f[i] += delta;
                    let v = p.eval(&f);
                    used += 1;
                    if v < current {
                        current = v;
                        improved = true;
                        break;
                    }
                    f[i] -= delta;
                }
                if used >= budget {
                    break;
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        self.evaluations += used;
        if current < self.best_value {
            self.best_value = current;
            self.best.copy_from_slice(&f);
            self.improvements += 1;
        }
    }
}

/// Upper bound for `c_Φ(G, K, R)` from a feasible point.
///
/// Every method starts from `δ_e` and the best radial profile
/// `(1 − (d(x) − a)/h)₊ ∧ 1`; the reported value is recomputed through the
/// generic objective.
pub fn minimize_upper(
    spec: &GroupSpec,
    phi: &NormingFunction,
    radius: usize,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<MinimaxResult> {
    let problem = BallProblem::new(spec, *phi, radius, opts.ball_cap)?;
    minimize_upper_on(&problem, method, opts)
}

/// [`minimize_upper`] on a prepared problem.
pub fn minimize_upper_on(problem: &BallProblem, method: Method, opts: &OptimizerOptions) -> Result<MinimaxResult> {
    let (spec, phi, radius) = (&problem.spec, &problem.phi, problem.radius);
    let delta = problem.delta();
    let start_value = problem.eval(&delta);
    let mut search = Search { problem, best: delta.clone(), best_value: start_value, evaluations: 1, improvements: 0 };
    if let Some(w) = &opts.warm_start {
        if w.at_identity() != 1.0 {
            return Err(Error::Precondition("warm start must have f(e) = 1".into()));
        }
        let v = w.to_ball_vector(&problem.ball)?;
        if v.iter().skip(problem.inner).any(|x| *x != 0.0) {
            return Err(Error::DomainExceeded(format!("warm start leaves B_{radius}")));
        }
        search.offer(&v);
    }
    let mut best_profile = None;
    if radius > 0 {
        for (a, h) in profile_grid(radius) {
            let f = problem.radial_profile(a, h);
            let v = search.offer(&f);
            if best_profile.is_none_or(|(_, _, b)| v < b) {
                best_profile = Some((a, h, v));
            }
        }
        match method {
            Method::ProfileFamily => {}
            Method::Subgradient => search.subgradient(opts.iterations),
            Method::Coordinate => search.coordinate(opts.iterations * 10, opts.seed),
        }
    }
    let Search { best, best_value, evaluations, improvements, .. } = search;
    let minimizer = problem.to_function(&best);
    let value = objective(&minimizer, spec, phi)?;
    if (value - best_value).abs() > 1e-9 * value.max(1.0) {
        return Err(Error::Invariant(format!("objective recomputation disagrees: {value} vs {best_value}")));
    }
    if minimizer.at_identity() != 1.0 {
        return Err(Error::Invariant("minimizer lost its normalisation".into()));
    }
    Ok(MinimaxResult {
        value,
        minimizer,
        radius,
        phi: *phi,
        method,
        iterations: opts.iterations,
        diagnostics: Diagnostics { start_value, best_profile, evaluations, improvements },
    })
}

/// Runs over increasing radii, warm-starting each from the previous
/// minimizer, so the values are nonincreasing.
pub fn minimize_upper_series(
    spec: &GroupSpec,
    phi: &NormingFunction,
    radii: &[usize],
    method: Method,
    opts: &OptimizerOptions,
) -> Result<Vec<MinimaxResult>> {
    if radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("radii must be nondecreasing".into()));
    }
    let mut out: Vec<MinimaxResult> = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut o = opts.clone();
        if let Some(prev) = out.last() {
            o.warm_start = Some(prev.minimizer.clone());
        }
        out.push(minimize_upper(spec, phi, r, method, &o)?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub lower: Option<f64>,
    pub upper: f64,
    pub gap: Option<f64>,
    pub result: MinimaxResult,
}

/// Certified lower bound against optimised upper bound.
pub fn sandwich(
    spec: &GroupSpec,
    phi: &NormingFunction,
    radius: usize,
    cert: Option<&Certificate>,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<SandwichReport> {
    let lower = cert.map(|c| lower_from_certificate(c, spec, phi, radius)).transpose()?;
    let problem = BallProblem::new(spec, *phi, radius, opts.ball_cap)?;
    sandwich_on(&problem, lower, method, opts)
}

/// The certified lower bound of `cert`, after checking it applies to
/// `(spec, phi)` under the right action.
pub fn lower_from_certificate(
    cert: &Certificate,
    spec: &GroupSpec,
    phi: &NormingFunction,
    radius: usize,
) -> Result<f64> {
    if cert.action() != Action::Right {
        return Err(Error::InvalidCertificate("lower bounds need a right-action certificate".into()));
    }
    if cert.phi() != *phi {
        return Err(Error::InvalidCertificate(format!("certificate is for {} not {phi}", cert.phi())));
    }
    if cert.group().family != spec.family || cert.generators().iter().any(|g| !spec.generators().contains(g)) {
        return Err(Error::InvalidCertificate(format!("certificate generators are not in {spec}")));
    }
    certify_lower(cert, radius)
}

/// Sandwich against a prepared problem with an already certified lower bound.
pub fn sandwich_on(
    problem: &BallProblem,
    lower: Option<f64>,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<SandwichReport> {
    let result = minimize_upper_on(problem, method, opts)?;
    let upper = result.value;
    if let Some(l) = lower {
        if l > upper * (1.0 + 1e-12) {
            return Err(Error::InvertedSandwich { lower: l, upper });
        }
    }
    Ok(SandwichReport { lower, upper, gap: lower.map(|l| upper - l), result })
}
