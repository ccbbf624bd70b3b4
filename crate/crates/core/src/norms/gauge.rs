use super::multiset::{rearrange, ValueMultiset};
use crate::error::{Error, Result};
use crate::harmonic::{harmonic, harmonic_exact, harmonic_range, ln_big, EXACT_THRESHOLD};
use crate::interval::Interval;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

const COUNT_PAD: f64 = 4.0 * f64::EPSILON;

/// A symmetric gauge function, identified by family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormingFunction {
    /// `Σ f*(k)/k`, the Lorentz `(∞,1)` norm.
    Macaev,
    /// `sup_k (Σ_{j≤k} f*(j)) / H_k`, the dual of [`NormingFunction::Macaev`].
    DualPlus,
    /// `(Σ f*(k)^p)^{1/p}` with `p ≥ 1`.
    Schatten(f64),
    /// `Σ f*(k)`.
    Trace,
    /// `Σ_{j≤k} f*(j)`; `KyFan(1)` is the sup norm.
    KyFan(u64),
}

impl NormingFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormingFunction::Schatten(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidInput(format!("schatten exponent {p} must be finite and >= 1")))
            }
            NormingFunction::KyFan(0) => Err(Error::InvalidInput("kyfan order must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// The dual norming function, where it lies in a supported family.
    pub fn dual(&self) -> Result<NormingFunction> {
        Ok(match *self {
            NormingFunction::Macaev => NormingFunction::DualPlus,
            NormingFunction::DualPlus => NormingFunction::Macaev,
            NormingFunction::Trace => NormingFunction::KyFan(1),
            NormingFunction::KyFan(1) => NormingFunction::Trace,
            NormingFunction::Schatten(1.0) => NormingFunction::KyFan(1),
            NormingFunction::Schatten(p) => NormingFunction::Schatten(p / (p - 1.0)),
            NormingFunction::KyFan(k) => {
                return Err(Error::Unsupported(format!("dual of kyfan:{k}")));
            }
        })
    }

    /// Norm of a plain list of reals (absolute values are taken).
    pub fn eval_slice(&self, values: &[f64]) -> f64 {
        let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        self.eval_sorted(&sorted)
    }

    /// Norm of nonnegative values already sorted nonincreasing.
    pub fn eval_sorted(&self, sorted: &[f64]) -> f64 {
        match *self {
            NormingFunction::Macaev => sorted.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).sum(),
            NormingFunction::DualPlus => {
                let mut best = 0.0f64;
                let mut partial = 0.0;
                for (i, v) in sorted.iter().enumerate() {
                    partial += v;
                    best = best.max(partial / harmonic_denominator(i + 1));
                }
                best
            }
            NormingFunction::Schatten(p) => schatten_slice(sorted, p),
            NormingFunction::Trace => sorted.iter().sum(),
            NormingFunction::KyFan(k) => sorted.iter().take(k as usize).sum(),
        }
    }

    /// Norm of `values` together with a subgradient `grad` (same length).
    ///
    /// `grad` lies in the dual unit ball and `Σ grad_i · values_i` equals the
    /// returned norm. Sorting ties are broken by position.
    pub fn value_and_subgradient(&self, values: &[f64], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(values.len(), grad.len());
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
        order
            .sort_by(|&a, &b| values[b].abs().partial_cmp(&values[a].abs()).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        let sign = |i: usize| values[i].signum();
        match *self {
            NormingFunction::Macaev => {
                let mut total = 0.0;
                for (rank, &i) in order.iter().enumerate() {
                    let w = 1.0 / (rank + 1) as f64;
                    grad[i] = sign(i) * w;
                    total += values[i].abs() * w;
                }
                total
            }
            NormingFunction::DualPlus => {
                let (mut best, mut best_k, mut partial) = (0.0, 0usize, 0.0);
                for (rank, &i) in order.iter().enumerate() {
                    partial += values[i].abs();
                    let r = partial / harmonic_denominator(rank + 1);
                    if r > best {
                        best = r;
                        best_k = rank + 1;
                    }
                }
                if best_k > 0 {
                    let w = 1.0 / harmonic_denominator(best_k);
                    for &i in &order[..best_k] {
                        grad[i] = sign(i) * w;
                    }
                }
                best
            }
            NormingFunction::Schatten(p) => {
                let sorted: Vec<f64> = order.iter().map(|&i| values[i].abs()).collect();
                let norm = schatten_slice(&sorted, p);
                if norm > 0.0 {
                    for &i in &order {
                        grad[i] = sign(i) * (values[i].abs() / norm).powf(p - 1.0);
                    }
                }
                norm
            }
            NormingFunction::Trace => {
                for &i in &order {
                    grad[i] = sign(i);
                }
                order.iter().map(|&i| values[i].abs()).sum()
            }
            NormingFunction::KyFan(k) => {
                let top = &order[..order.len().min(k as usize)];
                for &i in top {
                    grad[i] = sign(i);
                }
                top.iter().map(|&i| values[i].abs()).sum()
            }
        }
    }
}

fn harmonic_denominator(k: usize) -> f64 {
    if k as u64 <= EXACT_THRESHOLD {
        harmonic_exact(k as u64)
    } else {
        harmonic(&BigUint::from(k)).mid()
    }
}

fn schatten_slice(sorted: &[f64], p: f64) -> f64 {
    let top = match sorted.first() {
        Some(&t) if t > 0.0 => t,
        _ => return 0.0,
    };
    if p == 2.0 {
        return top * sorted.iter().map(|v| (v / top) * (v / top)).sum::<f64>().sqrt();
    }
    top * sorted.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl fmt::Display for NormingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormingFunction::Macaev => write!(f, "macaev"),
            NormingFunction::DualPlus => write!(f, "dualplus"),
            NormingFunction::Schatten(p) => write!(f, "schatten:{p}"),
            NormingFunction::Trace => write!(f, "trace"),
            NormingFunction::KyFan(k) => write!(f, "kyfan:{k}"),
        }
    }
}

impl FromStr for NormingFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let phi = match (head.trim(), arg) {
            ("macaev", None) => NormingFunction::Macaev,
            ("dualplus" | "dual_plus", None) => NormingFunction::DualPlus,
            ("trace", None) => NormingFunction::Trace,
            ("schatten", Some(p)) => NormingFunction::Schatten(
                p.parse().map_err(|_| Error::InvalidInput(format!("bad schatten exponent {p:?}")))?,
            ),
            ("kyfan", Some(k)) => {
                NormingFunction::KyFan(k.parse().map_err(|_| Error::InvalidInput(format!("bad kyfan order {k:?}")))?)
            }
            _ => return Err(Error::InvalidInput(format!("unknown norming function {s:?}"))),
        };
        phi.validate()?;
        Ok(phi)
    }
}

fn count_f64(c: &BigUint) -> Interval {
    match c.to_u64().filter(|&v| v <= 1 << 53) {
        Some(v) => Interval::point(v as f64),
        None => Interval::point(c.to_f64().unwrap_or(f64::INFINITY)).widen(COUNT_PAD, 0.0),
    }
}

/// Macaev norm `Σ_k f*(k)/k`.
///
/// A flat block of `m` copies of `a` occupying ranks `k+1..k+m` contributes
/// `a·(H_{k+m} − H_k)`.
pub fn macaev_norm(v: &ValueMultiset) -> Interval {
    let r = rearrange(v);
    let mut rank = BigUint::zero();
    let mut total = Interval::ZERO;
    for (a, m) in r.entries() {
        if *a == 0.0 {
            break;
        }
        total = total + harmonic_range(&rank, m).scale(*a);
        rank += m;
    }
    total
}

/// Dual `ℓ₁⁺` norm `sup_k (Σ_{j≤k} f*(j)) / H_k`.
///
/// Within a block of equal values the ratio is quasi-convex in `k`, so it is
/// maximised at a block end; the first rank inside each block is checked too.
pub fn dual_plus_norm(v: &ValueMultiset) -> Interval {
    let r = v.nonzero_rearranged();
    let mut best = Interval::ZERO;
    let mut rank = BigUint::zero();
    let mut partial = Interval::ZERO;
    for (a, m) in r.entries() {
        let first = partial + Interval::point(*a);
        let first_rank = &rank + 1u32;
        best = best.max(&first.div_pos(&harmonic(&first_rank)));
        partial = partial + count_f64(m).scale(*a);
        rank += m;
        best = best.max(&partial.div_pos(&harmonic(&rank)));
    }
    best
}

/// Dual `ℓ₁⁺` norm by scanning every rank; for cross-checking the block
/// reduction. Fails when the total count exceeds the exact harmonic range.
pub fn dual_plus_norm_scan(v: &ValueMultiset) -> Result<f64> {
    let values = v
        .nonzero_rearranged()
        .expand(EXACT_THRESHOLD as usize)
        .ok_or_else(|| Error::Precondition("total count too large for a full scan".into()))?;
    let mut best = 0.0f64;
    let mut partial = 0.0;
    for (i, x) in values.iter().enumerate() {
        partial += x;
        best = best.max(partial / harmonic_exact(i as u64 + 1));
    }
    Ok(best)
}

/// `|f|_Φ = Φ(f*(1) ≥ f*(2) ≥ …)`.
pub fn gauge_norm(v: &ValueMultiset, phi: &NormingFunction) -> Interval {
    match *phi {
        NormingFunction::Macaev => macaev_norm(v),
        NormingFunction::DualPlus => dual_plus_norm(v),
        NormingFunction::Trace => v.entries().iter().fold(Interval::ZERO, |acc, (a, m)| acc + count_f64(m).scale(*a)),
        NormingFunction::KyFan(k) => {
            let r = v.nonzero_rearranged();
            let mut left = BigUint::from(k);
            let mut total = Interval::ZERO;
            for (a, m) in r.entries() {
                if left.is_zero() {
                    break;
                }
                let take = if *m < left { m.clone() } else { left.clone() };
                total = total + count_f64(&take).scale(*a);
                left -= take;
            }
            total
        }
        NormingFunction::Schatten(p) => {
            let top = v.entries().iter().map(|(a, _)| *a).fold(0.0, f64::max);
            if top == 0.0 {
                return Interval::ZERO;
            }
            let sum =
                v.entries().iter().fold(Interval::ZERO, |acc, (a, m)| acc + count_f64(m).scale((a / top).powf(p)));
            let out = sum.powf(1.0 / p).scale(top);
            if sum.is_point() && p == 2.0 {
                out
            } else {
                out.widen(COUNT_PAD, 0.0)
            }
        }
    }
}

/// `φ(m) = |P|_Φ` for an orthogonal projection of rank `m`, i.e. Φ on `m`
/// ones. Closed forms make arbitrarily large `m` cheap.
pub fn phi_rank(phi: &NormingFunction, m: &BigUint) -> Result<Interval> {
    if m.is_zero() {
        return Err(Error::Precondition("phi_rank needs m >= 1".into()));
    }
    Ok(match *phi {
        NormingFunction::Macaev => harmonic(m),
        NormingFunction::DualPlus => count_f64(m).div_pos(&harmonic(m)),
        NormingFunction::Trace => count_f64(m),
        NormingFunction::KyFan(k) => count_f64(&m.min(&BigUint::from(k)).clone()),
        NormingFunction::Schatten(p) => {
            if m.is_one() {
                Interval::point(1.0)
            } else {
                Interval::point((ln_big(m) / p).exp()).widen(8.0 * f64::EPSILON * ln_big(m).max(1.0), 0.0)
            }
        }
    })
}
