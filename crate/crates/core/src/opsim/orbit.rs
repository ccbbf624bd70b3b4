use super::slice::SparseSlice;
use crate::error::{Error, Result};
use crate::groups::Element;
use crate::interval::Interval;
use crate::kphi::{AnalyticDualFamily, LetterSide};
use crate::norms::NormingFunction;
use crate::sparse::singular_values;
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Letters `1, 2`; `[w₁, …, w_m]` stands for `R_{w₁}⋯R_{w_m} ξ`.
pub type Word = Vec<u8>;

/// Image of every monoid word of length `≤ max_len` under `R_j = S_j ⊗ T_j`
/// applied to `ξ = v₀ ⊗ u₀`, as vertex pairs.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitTable {
    pub max_len: usize,
    /// Words by length, then lexicographically.
    pub words: Vec<Word>,
    /// `(v, u)` with `R_w ξ = e_v ⊗ e_u`.
    pub pairs: Vec<(usize, usize)>,
    /// Pairs of distinct words with the same image.
    pub collisions: Vec<(Word, Word)>,
    y_len: usize,
}

impl OrbitTable {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.collisions.is_empty()
    }

    /// Length of the shortest colliding word.
    pub fn first_collision_length(&self) -> Option<usize> {
        self.collisions.iter().map(|(a, b)| a.len().max(b.len())).min()
    }

    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        let len = w.len();
        if len > self.max_len || w.iter().any(|&l| l != 1 && l != 2) {
            return None;
        }
        // Words of length m start at 2^m − 1; letters read as binary digits.
        let rank = w.iter().fold(0usize, |acc, &l| 2 * acc + (l as usize - 1));
        Some((1usize << len) - 1 + rank)
    }

    /// `⟨R_w ξ, R_{w'} ξ⟩` for elementary tensors of basis vectors.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.pairs[i], self.pairs[j]);
        let ka = a.0 * self.y_len + a.1;
        let kb = b.0 * self.y_len + b.1;
        f64::from(u8::from(ka == kb))
    }

    /// Whether the Gram matrix of the orbit is the identity.
    pub fn is_orthonormal(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.inner(i, j) == f64::from(u8::from(i == j))))
    }
}

/// Apply every word of length `≤ max_len` and record collisions.
pub fn tensor_orbit(x: &SparseSlice, y: &SparseSlice, max_len: usize) -> Result<OrbitTable> {
    let have = x.depth().min(y.depth());
    if have < max_len {
        return Err(Error::DepthInsufficient { have, need: max_len });
    }
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut pairs = vec![(x.root(), y.root())];
    let mut start = 0;
    for _ in 0..max_len {
        let end = words.len();
        for p in 1..=2u8 {
            for i in start..end {
                let (v, u) = pairs[i];
                let nv = x.shift(v, p).expect("slice deep enough");
                let nu = y.shift(u, p).expect("slice deep enough");
                let mut w = vec![p];
                w.extend_from_slice(&words[i]);
                words.push(w);
                pairs.push((nv, nu));
            }
        }
        start = end;
    }
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut collisions = Vec::new();
    for (i, pr) in pairs.iter().enumerate() {
        if let Some(&j) = seen.get(pr) {
            collisions.push((words[j].clone(), words[i].clone()));
        } else {
            seen.insert(*pr, i);
        }
    }
    Ok(OrbitTable { max_len, words, pairs, collisions, y_len: y.len() })
}

/// Lower bound for `max_j |[R_j, A]|_Φ` over diagonal `A` with orbit
/// coefficients `a`, with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalBound {
    /// `|a(ξ)| / (2·upper‖H_p‖)`.
    pub bound: f64,
    /// `Σ_p ⟨H_p, β(g_p)a − a⟩`; equals `a(ξ)`.
    pub pairing: f64,
    /// `|[R_p, A]|_Φ` on the orbit, `p = 1, 2`.
    pub direct: [f64; 2],
    pub dual_norm: Interval,
}

fn monoid_element(w: &[u8]) -> Element {
    Element::Word(w.iter().map(|&l| l as i8).collect())
}

/// Pair the first-letter witness with the prepend differences of `a`.
///
/// On the orbit `[R_p, A] e_w = (a(w) − a(pw)) e_{pw}`, so the singular
/// values of the compressed commutator are the values of `β(g_p)a − a` on
/// words starting with `p`, and the witness identity
/// `a(ξ) = Σ_p ⟨H_p, β(g_p)a − a⟩` bounds them from below.
pub fn diagonal_tensor_lower_bound(
    orbit: &OrbitTable,
    a: &BTreeMap<Word, f64>,
    witness_depth: usize,
    phi: &NormingFunction,
) -> Result<DiagonalBound> {
    let at_xi = a.get(&Vec::new()).copied().unwrap_or(0.0);
    if at_xi != 1.0 {
        return Err(Error::Precondition(format!("a(ξ) = {at_xi} but must be 1")));
    }
    let mut longest = 0;
    for w in a.keys() {
        if orbit.index_of(w).is_none() {
            return Err(Error::DomainExceeded(format!("word {w:?} is not in the orbit table")));
        }
        longest = longest.max(w.len());
    }
    if witness_depth <= longest {
        return Err(Error::DepthInsufficient { have: witness_depth, need: longest + 1 });
    }
    let dual = phi.dual()?;
    let get = |w: &[u8]| a.get(w).copied().unwrap_or(0.0);
    let mut pairing = 0.0;
    let mut direct = [0.0; 2];
    let mut dual_norm = Interval::ZERO;
    for p in 1..=2u8 {
        let h = AnalyticDualFamily::new(p, witness_depth, LetterSide::First)?;
        dual_norm = dual_norm.max(&h.dual_norm(&dual)?);
        let mut points: BTreeSet<Word> = BTreeSet::new();
        for w in a.keys() {
            let mut pw = vec![p];
            pw.extend_from_slice(w);
            points.insert(pw);
            if w.first() == Some(&p) {
                points.insert(w.clone());
            }
        }
        let mut diffs = Vec::with_capacity(points.len());
        for x in &points {
            let d = get(&x[1..]) - get(x);
            pairing += h.value(&monoid_element(x)) * d;
            diffs.push(d);
        }
        direct[p as usize - 1] = phi.eval_slice(&diffs);
    }
    if (pairing - 1.0).abs() > 1e-12 {
        return Err(Error::Invariant(format!("witness pairing gave {pairing}, expected 1")));
    }
    let bound = 1.0 / (2.0 * dual_norm.hi);
    if direct[0].max(direct[1]) < bound * (1.0 - 1e-12) {
        return Err(Error::Invariant(format!("direct commutator norms {direct:?} fall below {bound}")));
    }
    Ok(DiagonalBound { bound, pairing, direct, dual_norm })
}

/// `|[R_p, A]|_Φ` computed by dense SVD on the span of the orbit vectors,
/// using the explicit slices; `a` must live on words shorter than the orbit
/// depth.
pub fn explicit_commutator_norms(
    x: &SparseSlice,
    y: &SparseSlice,
    orbit: &OrbitTable,
    a: &BTreeMap<Word, f64>,
    phi: &NormingFunction,
) -> Result<[f64; 2]> {
    if let Some(w) = a.keys().find(|w| w.len() >= orbit.max_len) {
        return Err(Error::DomainExceeded(format!("word {w:?} reaches the orbit boundary")));
    }
    if !orbit.is_free() {
        return Err(Error::Invariant("orbit has collisions".into()));
    }
    let index: HashMap<(usize, usize), usize> = orbit.pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let n = orbit.len();
    let diag = DMatrix::from_fn(n, n, |i, j| if i == j { a.get(&orbit.words[i]).copied().unwrap_or(0.0) } else { 0.0 });
    let mut out = [0.0; 2];
    for p in 1..=2u8 {
        let mut r = DMatrix::zeros(n, n);
        for (i, &(v, u)) in orbit.pairs.iter().enumerate() {
            if let (Some(nv), Some(nu)) = (x.shift(v, p), y.shift(u, p)) {
                if let Some(&k) = index.get(&(nv, nu)) {
                    r[(k, i)] = 1.0;
                }
            }
        }
        let sv = singular_values(&(&r * &diag - &diag * &r));
        out[p as usize - 1] = phi.eval_sorted(&sv);
    }
    Ok(out)
}
