use super::certificate::{Certificate, DualFunction};
use super::objective::Action;
use crate::error::{Error, Result};
use crate::groups::{Element, Family, FiniteFunction, GroupSpec};
use crate::harmonic::{harmonic, EULER_GAMMA};
use crate::interval::Interval;
use crate::norms::{gauge_norm, NormingFunction, ValueMultiset};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Block index used for the analytic lower probe of the `ℓ₁⁺` ratio.
const PROBE_BLOCK: usize = 1 << 20;

/// Which end of a positive word selects the family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterSide {
    First,
    Last,
}

/// `H_p(w) = 2^{−|w|}` on positive words `w` of length `1..=depth` whose
/// first (or last) letter is `g_p`, zero elsewhere.
///
/// At word length `m` the value `2^{−m}` occurs `2^{m−1}` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticDualFamily {
    /// 1-based letter index `p`.
    pub letter: u8,
    pub depth: usize,
    pub side: LetterSide,
}

impl AnalyticDualFamily {
    pub fn new(letter: u8, depth: usize, side: LetterSide) -> Result<Self> {
        if letter == 0 || letter > 2 {
            return Err(Error::InvalidInput(format!("letter {letter} outside the two-letter alphabet")));
        }
        if depth == 0 {
            return Err(Error::InvalidInput("witness depth must be >= 1".into()));
        }
        Ok(AnalyticDualFamily { letter, depth, side })
    }

    pub fn value(&self, x: &Element) -> f64 {
        let Element::Word(w) = x else { return 0.0 };
        if w.is_empty() || w.len() > self.depth || w.iter().any(|&l| l <= 0 || l > 2) {
            return 0.0;
        }
        let end = match self.side {
            LetterSide::First => w[0],
            LetterSide::Last => w[w.len() - 1],
        };
        if end == self.letter as i8 {
            0.5f64.powi(w.len() as i32)
        } else {
            0.0
        }
    }

    /// Closed-form value multiset of the truncated family.
    pub fn value_multiset(&self) -> ValueMultiset {
        let entries = (1..=self.depth).map(|m| (0.5f64.powi(m as i32), BigUint::one() << (m - 1))).collect();
        ValueMultiset::new(entries).expect("positive finite values")
    }

    /// Visit every support word (in letter order for `self.side`) with its
    /// value, without building a map.
    pub fn for_each_word(&self, mut visit: impl FnMut(&[i8], f64)) {
        let mut buf: Vec<i8> = Vec::with_capacity(self.depth);
        let mut rev: Vec<i8> = Vec::with_capacity(self.depth);
        // Depth-first over positive words starting with the letter.
        let mut stack: Vec<(usize, i8)> = vec![(0, self.letter as i8)];
        while let Some((len, l)) = stack.pop() {
            buf.truncate(len);
            buf.push(l);
            let v = 0.5f64.powi(buf.len() as i32);
            match self.side {
                LetterSide::First => visit(&buf, v),
                LetterSide::Last => {
                    rev.clear();
                    rev.extend(buf.iter().rev());
                    visit(&rev, v);
                }
            }
            if buf.len() < self.depth {
                stack.push((buf.len(), 2));
                stack.push((buf.len(), 1));
            }
        }
    }

    /// Explicit enumeration over the free group on two letters.
    pub fn enumerate(&self) -> FiniteFunction {
        let mut out = FiniteFunction::zero(Family::Free(2));
        let mut layer: Vec<Vec<i8>> = vec![vec![self.letter as i8]];
        for m in 1..=self.depth {
            let v = 0.5f64.powi(m as i32);
            let mut next = Vec::new();
            for w in &layer {
                let word = match self.side {
                    LetterSide::First => w.clone(),
                    LetterSide::Last => w.iter().rev().copied().collect(),
                };
                out.set(Element::Word(word), v);
                if m < self.depth {
                    for l in [1, 2] {
                        let mut c = w.clone();
                        c.push(l);
                        next.push(c);
                    }
                }
            }
            layer = next;
        }
        out
    }

    /// Dual-norm interval of the untruncated family (every depth), which
    /// dominates the truncated one for every monotone gauge.
    pub fn dual_norm(&self, dual: &NormingFunction) -> Result<Interval> {
        match *dual {
            NormingFunction::DualPlus => Ok(self.dual_plus_interval()),
            NormingFunction::KyFan(1) => Ok(Interval::point(0.5)),
            NormingFunction::Schatten(q) if q > 1.0 => {
                // Σ_m 2^{m−1} 2^{−mq} = r / (2(1 − r)) with r = 2^{1−q}.
                let r = 2f64.powf(1.0 - q);
                let s = r / (2.0 * (1.0 - r));
                Ok(Interval::point(s.powf(1.0 / q)).widen(8.0 * f64::EPSILON, 0.0))
            }
            other => Err(Error::Unsupported(format!(
                "{other} norm of the untruncated witness family is infinite or unavailable"
            ))),
        }
    }

    /// `sup_k P(k)/H_k` over the untruncated family.
    ///
    /// At rank `k = 2^m(1+t) − 1` inside block `m+1` the partial sum is
    /// `(m+t)/2` while `H_k > ln k + γ ≥ (m+t) ln 2 + γ − 2^{1−m}`, so every
    /// rank past the second block has ratio below `1/(2 ln 2)`; this is also
    /// the limit. The truncated scan covers the early blocks and the probe at
    /// block `2^20` gives a lower end close to the limit.
    fn dual_plus_interval(&self) -> Interval {
        let tail_start = self.depth.max(2);
        let tail_ok = EULER_GAMMA - 2f64.powi(1 - tail_start.min(60) as i32) > 0.0;
        assert!(tail_ok, "tail bound needs gamma > 2^(1-m)");
        let limit = 0.5 / std::f64::consts::LN_2;
        let scan = gauge_norm(&self.value_multiset(), &NormingFunction::DualPlus);
        let probe_rank = (BigUint::one() << PROBE_BLOCK) - 1u32;
        let probe = (PROBE_BLOCK as f64 / 2.0) / harmonic(&probe_rank).hi;
        let lo = scan.lo.max(probe);
        let hi = scan.hi.max(limit) * (1.0 + 1e-12);
        Interval::new(lo, hi)
    }
}

/// The two-function free-group certificate with Macaev objective.
pub fn build_f2_witness(depth: usize, action: Action) -> Result<Certificate> {
    build_f2_witness_with(depth, action, NormingFunction::Macaev)
}

/// Certificate for `free:2` built from the `H_p` family whose letter side
/// matches `action`: the right action pairs last-letter `H_p` with
/// `k = g_p⁻¹`, the left action pairs first-letter `H_p` with `k = g_p`.
/// The identity holds exactly on `B_{depth−1}`.
pub fn build_f2_witness_with(depth: usize, action: Action, phi: NormingFunction) -> Result<Certificate> {
    let spec = GroupSpec::standard(Family::Free(2));
    let (side, sign) = match action {
        Action::Right => (LetterSide::Last, -1i8),
        Action::Left => (LetterSide::First, 1i8),
    };
    let mut entries = Vec::new();
    for p in 1..=2u8 {
        let fam = AnalyticDualFamily::new(p, depth, side)?;
        entries.push((Element::Word(vec![sign * p as i8]), DualFunction::Analytic(fam)));
    }
    Certificate::new(spec, action, phi, entries, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{ball, DEFAULT_BALL_CAP};
    use crate::norms::{dual_plus_norm_scan, rearrange, ValueMultiset};

    #[test]
    fn visitor_matches_enumeration() {
        for side in [LetterSide::First, LetterSide::Last] {
            let h = AnalyticDualFamily::new(2, 7, side).unwrap();
            let explicit = h.enumerate();
            let mut seen = 0;
            h.for_each_word(|w, v| {
                assert_eq!(explicit.get(&Element::Word(w.to_vec())), v);
                seen += 1;
            });
            assert_eq!(seen, explicit.len());
        }
    }

    #[test]
    fn multiset_matches_enumeration() {
        for side in [LetterSide::First, LetterSide::Last] {
            for d in 1..=10 {
                let h = AnalyticDualFamily::new(1, d, side).unwrap();
                let explicit = h.enumerate();
                assert_eq!(explicit.len(), (1 << d) - 1);
                assert_eq!(rearrange(&explicit.value_multiset()), rearrange(&h.value_multiset()));
                for (x, v) in explicit.iter() {
                    assert_eq!(h.value(x), *v);
                }
            }
        }
        let h = AnalyticDualFamily::new(2, 3, LetterSide::First).unwrap();
        let expected = ValueMultiset::from_pairs([(0.5, 1), (0.25, 2), (0.125, 4)]).unwrap();
        assert_eq!(h.value_multiset(), expected);
    }

    #[test]
    fn dual_plus_interval_brackets_limit() {
        let h = AnalyticDualFamily::new(1, 20, LetterSide::Last).unwrap();
        let iv = h.dual_norm(&NormingFunction::DualPlus).unwrap();
        assert!(iv.lo >= 0.70 && iv.hi <= 0.7214, "{iv}");
        assert!(iv.contains(0.5 / std::f64::consts::LN_2));
        let shallow = AnalyticDualFamily::new(1, 19, LetterSide::Last).unwrap();
        let scan = dual_plus_norm_scan(&shallow.value_multiset()).unwrap();
        assert!(scan <= iv.hi && scan < 0.70);
    }

    #[test]
    fn ratio_bound_holds_rank_by_rank() {
        // Independent scan of the untruncated family up to 2^20 ranks.
        let limit = 0.5 / std::f64::consts::LN_2;
        let (mut partial, mut harm, mut k) = (0.0f64, 0.0f64, 0u64);
        for m in 1..=20 {
            let v = 0.5f64.powi(m);
            for _ in 0..(1u64 << (m - 1)) {
                k += 1;
                partial += v;
                harm += 1.0 / k as f64;
                assert!(partial / harm <= limit + 1e-12, "rank {k}");
            }
        }
    }

    #[test]
    fn other_dual_norms() {
        let h = AnalyticDualFamily::new(1, 5, LetterSide::First).unwrap();
        assert_eq!(h.dual_norm(&NormingFunction::KyFan(1)).unwrap(), Interval::point(0.5));
        let s2 = h.dual_norm(&NormingFunction::Schatten(2.0)).unwrap();
        // Σ 2^{m−1}·4^{−m} = 1/2.
        assert!(s2.contains(0.5f64.sqrt()));
        assert!(h.dual_norm(&NormingFunction::Trace).is_err());
    }

    #[test]
    fn depth_three_divergence() {
        for action in [Action::Right, Action::Left] {
            let cert = build_f2_witness(3, action).unwrap();
            let spec = GroupSpec::standard(Family::Free(2));
            assert_eq!(cert.divergence_at(&spec.identity()), 1.0);
            for w in ["a", "b", "ab", "ba", "aa", "bb", "A", "aB"] {
                assert_eq!(cert.divergence_at(&spec.parse_word(w).unwrap()), 0.0, "{w}");
            }
        }
    }

    #[test]
    fn identity_fails_just_past_residual_radius() {
        let cert = build_f2_witness(4, Action::Right).unwrap();
        let spec = GroupSpec::standard(Family::Free(2));
        let b = ball(&spec, 4, DEFAULT_BALL_CAP).unwrap();
        let bad = b.elements().iter().filter(|x| {
            let d = cert.divergence_at(x);
            let want = if **x == spec.identity() { 1.0 } else { 0.0 };
            d != want
        });
        assert!(bad.clone().all(|x| spec.closed_form_length(x) == Some(4)));
        assert!(bad.count() > 0);
    }

    #[test]
    fn first_letter_side_fails_under_right_action() {
        // First-letter functions with the right action do not give δ_e.
        let spec = GroupSpec::standard(Family::Free(2));
        let f: Vec<_> = (1..=2u8).map(|p| AnalyticDualFamily::new(p, 5, LetterSide::First).unwrap()).collect();
        let at_e: f64 = (0..2)
            .map(|p| {
                let g = Element::Word(vec![p as i8 + 1]);
                f[p].value(&spec.multiply(&spec.identity(), &g)) - f[p].value(&spec.identity())
            })
            .sum();
        assert_eq!(at_e, 1.0);
        let at_a: f64 = (0..2)
            .map(|p| {
                let x = spec.parse_word("a").unwrap();
                let g = Element::Word(vec![p as i8 + 1]);
                f[p].value(&spec.multiply(&x, &g)) - f[p].value(&x)
            })
            .sum();
        assert_ne!(at_a, 0.0);
    }
}
