use super::objective::Action;
use super::witness::{AnalyticDualFamily, LetterSide};
use crate::error::{Error, Result};
use crate::groups::{ball, Element, Family, FiniteFunction, GroupSpec, DEFAULT_BALL_CAP};
use crate::interval::Interval;
use crate::norms::{gauge_norm, NormingFunction};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Tolerance for the pointwise divergence identity.
const DIVERGENCE_TOL: f64 = 1e-14;

/// Longest free(2) word that fits a packed key.
const MAX_PACKED_LEN: usize = 31;

const LETTERS: [i8; 4] = [1, 2, -1, -2];

/// Two bits per letter under a leading sentinel bit.
fn pack(w: &[i8]) -> u64 {
    w.iter().fold(1u64, |key, &l| {
        let d = LETTERS.iter().position(|&x| x == l).expect("free(2) letter") as u64;
        (key << 2) | d
    })
}

fn packed_len(key: u64) -> usize {
    (63 - key.leading_zeros() as usize) / 2
}

fn unpack(key: u64) -> Vec<i8> {
    let len = packed_len(key);
    (0..len).rev().map(|i| LETTERS[((key >> (2 * i)) & 3) as usize]).collect()
}

/// A dual function `f_k`, explicit or in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum DualFunction {
    Explicit(FiniteFunction),
    Analytic(AnalyticDualFamily),
}

impl DualFunction {
    pub fn value(&self, x: &Element) -> f64 {
        match self {
            DualFunction::Explicit(f) => f.get(x),
            DualFunction::Analytic(h) => h.value(x),
        }
    }

    /// Explicit support (enumerated for closed forms).
    pub fn to_function(&self) -> FiniteFunction {
        match self {
            DualFunction::Explicit(f) => f.clone(),
            DualFunction::Analytic(h) => h.enumerate(),
        }
    }

    pub fn dual_norm(&self, dual: &NormingFunction) -> Result<Interval> {
        match self {
            DualFunction::Explicit(f) => {
                let iv = gauge_norm(&f.value_multiset(), dual);
                if !iv.hi.is_finite() {
                    return Err(Error::InvalidCertificate("dual norm is not finite".into()));
                }
                Ok(iv)
            }
            DualFunction::Analytic(h) => h.dual_norm(dual),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionEntry {
    pub generator: Element,
    pub function: DualFunction,
}

/// Generator-indexed dual functions with `Σ_k (α(k⁻¹)f_k − f_k) = δ_e`
/// on `B_{residual_radius}` (or the `β` analogue for the left action).
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    group: GroupSpec,
    action: Action,
    phi: NormingFunction,
    entries: Vec<FunctionEntry>,
    residual_radius: usize,
    dual_norms: Vec<Interval>,
}

impl Certificate {
    /// Verifies the divergence identity and computes the dual-norm intervals.
    pub fn new(
        group: GroupSpec,
        action: Action,
        phi: NormingFunction,
        entries: Vec<(Element, DualFunction)>,
        residual_radius: usize,
    ) -> Result<Self> {
        phi.validate()?;
        if entries.is_empty() {
            return Err(Error::InvalidCertificate("no dual functions".into()));
        }
        if !group.family.has_inverses() {
            return Err(Error::InvalidCertificate("certificates need a group".into()));
        }
        let dual = phi.dual()?;
        let mut list = Vec::with_capacity(entries.len());
        let mut norms = Vec::with_capacity(entries.len());
        for (generator, function) in entries {
            if !group.generators().contains(&generator) {
                return Err(Error::InvalidCertificate(format!(
                    "{} is not a generator of {group}",
                    group.format(&generator)
                )));
            }
            if let DualFunction::Explicit(f) = &function {
                if f.family() != group.family {
                    return Err(Error::InvalidCertificate("dual function from another family".into()));
                }
            }
            if let DualFunction::Analytic(_) = &function {
                if group.family != Family::Free(2) {
                    return Err(Error::InvalidCertificate("analytic witness lives on free:2".into()));
                }
            }
            norms.push(function.dual_norm(&dual)?);
            list.push(FunctionEntry { generator, function });
        }
        let cert = Certificate { group, action, phi, entries: list, residual_radius, dual_norms: norms };
        cert.verify_divergence()?;
        Ok(cert)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn phi(&self) -> NormingFunction {
        self.phi
    }

    pub fn entries(&self) -> &[FunctionEntry] {
        &self.entries
    }

    pub fn residual_radius(&self) -> usize {
        self.residual_radius
    }

    pub fn dual_norms(&self) -> &[Interval] {
        &self.dual_norms
    }

    pub fn generators(&self) -> Vec<Element> {
        self.entries.iter().map(|e| e.generator.clone()).collect()
    }

    /// `Σ_k (α(k⁻¹)f_k − f_k)(x)` evaluated pointwise.
    pub fn divergence_at(&self, x: &Element) -> f64 {
        let fam = self.group.family;
        self.entries
            .iter()
            .map(|e| {
                let moved = match self.action {
                    Action::Right => fam.right_divide(x, &e.generator),
                    Action::Left => Some(fam.multiply(&e.generator, x)),
                };
                moved.map_or(0.0, |y| e.function.value(&y)) - e.function.value(x)
            })
            .sum()
    }

    /// Scatter every support point to the two places it contributes and
    /// compare the result with `δ_e` inside the residual ball.
    fn verify_divergence(&self) -> Result<()> {
        self.verify_divergence_packed().unwrap_or_else(|| self.verify_divergence_scatter())
    }

    fn verify_divergence_scatter(&self) -> Result<()> {
        let fam = self.group.family;
        let mut div: HashMap<Element, f64> = HashMap::new();
        for e in &self.entries {
            let f = e.function.to_function();
            for (s, v) in f.iter() {
                *div.entry(s.clone()).or_insert(0.0) -= v;
                let target = match self.action {
                    Action::Right => fam.multiply(s, &e.generator),
                    Action::Left => fam
                        .left_divide(&e.generator, s)
                        .ok_or_else(|| Error::InvalidCertificate("generator without inverse".into()))?,
                };
                *div.entry(target).or_insert(0.0) += v;
            }
        }
        let identity = self.group.identity();
        let lookup = if self.group.closed_form_length(&identity).is_some() {
            None
        } else {
            Some(ball(&self.group, self.residual_radius, DEFAULT_BALL_CAP)?)
        };
        let within = |x: &Element| match &lookup {
            None => self.group.closed_form_length(x).is_some_and(|l| l <= self.residual_radius),
            Some(b) => b.contains(x),
        };
        let at_e = div.get(&identity).copied().unwrap_or(0.0);
        if (at_e - 1.0).abs() > DIVERGENCE_TOL {
            return Err(Error::InvalidCertificate(format!("divergence at e is {at_e}, expected 1")));
        }
        for (x, v) in &div {
            if *x != identity && v.abs() > DIVERGENCE_TOL && within(x) {
                return Err(Error::InvalidCertificate(format!(
                    "divergence at {} is {v}, expected 0",
                    self.group.format(x)
                )));
            }
        }
        Ok(())
    }

    /// The same scatter for certificates made only of analytic free(2)
    /// families, with reduced words packed into `u64` keys. `None` when the
    /// words could be too long to pack.
    fn verify_divergence_packed(&self) -> Option<Result<()>> {
        let mut families = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            match (&e.function, &e.generator) {
                (DualFunction::Analytic(h), Element::Word(k)) => families.push((h, k.as_slice())),
                _ => return None,
            }
        }
        if families.iter().any(|(h, k)| h.depth + k.len() > MAX_PACKED_LEN) {
            return None;
        }
        let total: usize = families.iter().map(|(h, _)| 2usize << h.depth.min(30)).sum();
        let mut div: HashMap<u64, f64> = HashMap::with_capacity(total);
        let mut target: Vec<i8> = Vec::with_capacity(MAX_PACKED_LEN);
        for (h, k) in families {
            h.for_each_word(|w, v| {
                *div.entry(pack(w)).or_insert(0.0) -= v;
                target.clear();
                match self.action {
                    Action::Right => {
                        target.extend_from_slice(w);
                        for &l in k {
                            if target.last() == Some(&-l) {
                                target.pop();
                            } else {
                                target.push(l);
                            }
                        }
                    }
                    Action::Left => {
                        // k⁻¹·w
                        let mut head: Vec<i8> = k.iter().rev().map(|l| -l).collect();
                        let mut rest = w;
                        while let (Some(&a), Some(&b)) = (head.last(), rest.first()) {
                            if a != -b {
                                break;
                            }
                            head.pop();
                            rest = &rest[1..];
                        }
                        target.extend_from_slice(&head);
                        target.extend_from_slice(rest);
                    }
                }
                *div.entry(pack(&target)).or_insert(0.0) += v;
            });
        }
        let at_e = div.get(&pack(&[])).copied().unwrap_or(0.0);
        if (at_e - 1.0).abs() > DIVERGENCE_TOL {
            return Some(Err(Error::InvalidCertificate(format!("divergence at e is {at_e}, expected 1"))));
        }
        for (key, v) in &div {
            let len = packed_len(*key);
            if len > 0 && len <= self.residual_radius && v.abs() > DIVERGENCE_TOL {
                return Some(Err(Error::InvalidCertificate(format!(
                    "divergence at {} is {v}, expected 0",
                    self.group.format(&Element::Word(unpack(*key)))
                ))));
            }
        }
        Some(Ok(()))
    }

    /// Serializable form.
    pub fn to_file(&self) -> CertificateFile {
        let functions = self
            .entries
            .iter()
            .map(|e| {
                let generator = self.group.format(&e.generator);
                match &e.function {
                    DualFunction::Analytic(h) => {
                        FunctionRecord::Analytic { generator, analytic: "f2_witness".into(), depth: h.depth }
                    }
                    DualFunction::Explicit(f) => FunctionRecord::Explicit {
                        generator,
                        support: f.iter().map(|(x, v)| (self.group.format(x), *v)).collect(),
                    },
                }
            })
            .collect();
        CertificateFile {
            group: self.group.to_string(),
            generators: self.group.generators().iter().map(|g| self.group.format(g)).collect(),
            action: self.action,
            phi: self.phi.to_string(),
            functions,
            residual_radius: self.residual_radius,
            dual_norms: self.dual_norms.iter().map(|i| [i.lo, i.hi]).collect(),
        }
    }

    /// Rebuild from a file, re-verifying everything. Claimed dual norms
    /// below the recomputed ones are rejected.
    pub fn from_file(file: &CertificateFile) -> Result<Self> {
        let base: GroupSpec = file.group.parse()?;
        let group = if file.generators.is_empty() {
            base
        } else {
            let gens = file.generators.iter().map(|w| base.parse_word(w)).collect::<Result<Vec<_>>>()?;
            GroupSpec::with_generators(base.family, gens)?
        };
        let phi: NormingFunction = file.phi.parse()?;
        let mut entries = Vec::new();
        for rec in &file.functions {
            match rec {
                FunctionRecord::Analytic { generator, analytic, depth } => {
                    if analytic != "f2_witness" {
                        return Err(Error::InvalidCertificate(format!("unknown analytic family {analytic:?}")));
                    }
                    let g = group.parse_word(generator)?;
                    let letter = match (&g, file.action) {
                        (Element::Word(w), Action::Right) if w.len() == 1 && w[0] < 0 => (-w[0]) as u8,
                        (Element::Word(w), Action::Left) if w.len() == 1 && w[0] > 0 => w[0] as u8,
                        _ => {
                            return Err(Error::InvalidCertificate(format!(
                                "generator {generator} does not index an f2_witness function"
                            )))
                        }
                    };
                    let side = match file.action {
                        Action::Right => LetterSide::Last,
                        Action::Left => LetterSide::First,
                    };
                    entries.push((g, DualFunction::Analytic(AnalyticDualFamily::new(letter, *depth, side)?)));
                }
                FunctionRecord::Explicit { generator, support } => {
                    let g = group.parse_word(generator)?;
                    let mut f = FiniteFunction::zero(group.family);
                    for (w, v) in support {
                        if !v.is_finite() {
                            return Err(Error::InvalidCertificate(format!("non-finite value at {w}")));
                        }
                        f.add_at(group.parse_word(w)?, *v);
                    }
                    entries.push((g, DualFunction::Explicit(f)));
                }
            }
        }
        let cert = Certificate::new(group, file.action, phi, entries, file.residual_radius)?;
        if file.dual_norms.len() != cert.dual_norms.len() {
            return Err(Error::InvalidCertificate("dual_norms length mismatch".into()));
        }
        for (claimed, actual) in file.dual_norms.iter().zip(&cert.dual_norms) {
            let ordered = claimed[0].partial_cmp(&claimed[1]).is_some_and(|o| o.is_le());
            if !ordered || claimed[1] < actual.lo * (1.0 - 1e-12) {
                return Err(Error::InvalidCertificate(format!(
                    "claimed dual norm [{}, {}] is inconsistent with {actual}",
                    claimed[0], claimed[1]
                )));
            }
        }
        Ok(cert)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CertificateFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidCertificate(format!("malformed certificate: {e}")))?;
        Certificate::from_file(&file)
    }
}

/// On-disk certificate layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub group: String,
    #[serde(default)]
    pub generators: Vec<String>,
    pub action: Action,
    pub phi: String,
    pub functions: Vec<FunctionRecord>,
    pub residual_radius: usize,
    pub dual_norms: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionRecord {
    Analytic { generator: String, analytic: String, depth: usize },
    Explicit { generator: String, support: Vec<(String, f64)> },
}

/// `1 / Σ_k upper(‖f_k‖)`: every `f` on `B_R` with `f(e) = 1` has
/// `max_k ‖α(k)f − f‖_Φ` at least this large.
pub fn certify_lower(cert: &Certificate, radius: usize) -> Result<f64> {
    if radius >= cert.residual_radius {
        return Err(Error::RadiusTooLarge { radius, residual: cert.residual_radius });
    }
    Ok(1.0 / k4_constant(cert))
}

/// `C = Σ_k upper(‖f_k‖)`, so that `‖f‖_∞ ≤ C · max_k ‖α(k)f − f‖_Φ`.
pub fn k4_constant(cert: &Certificate) -> f64 {
    cert.dual_norms.iter().map(|i| i.hi).sum()
}

/// `f₁ = −χ_{[0,T]}` on `Z` with `k = 1`; the trace-norm certificate with
/// residual radius `T`.
pub fn half_line_certificate(t: usize) -> Result<Certificate> {
    let spec = GroupSpec::standard(Family::FreeAbelian(1));
    let f = FiniteFunction::from_pairs(spec.family, (0..=t as i64).map(|x| (Element::Vector(vec![x]), -1.0)));
    Certificate::new(
        spec,
        Action::Right,
        NormingFunction::Trace,
        vec![(Element::Vector(vec![1]), DualFunction::Explicit(f))],
        t,
    )
}

#[cfg(test)]
mod tests {
    use super::super::objective::{objective, objective_with};
    use super::super::witness::build_f2_witness;
    use super::*;

    #[test]
    fn packing_roundtrip() {
        for w in [vec![], vec![1], vec![-2, 1, 1, -1], vec![2; 31]] {
            let k = pack(&w);
            assert_eq!(packed_len(k), w.len());
            assert_eq!(unpack(k), w);
        }
    }

    #[test]
    fn packed_and_generic_scatter_agree() {
        for action in [Action::Right, Action::Left] {
            let good = build_f2_witness(9, action).unwrap();
            assert!(good.verify_divergence_packed().unwrap().is_ok());
            assert!(good.verify_divergence_scatter().is_ok());
            // Flip the first generator.
            let mut bad = good.clone();
            if let Element::Word(w) = &mut bad.entries[0].generator {
                w[0] = -w[0];
            }
            assert!(bad.verify_divergence_packed().unwrap().is_err());
            assert!(bad.verify_divergence_scatter().is_err());
        }
    }
    use crate::groups::DEFAULT_BALL_CAP;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f2_witness_bound() {
        let cert = build_f2_witness(20, Action::Right).unwrap();
        assert_eq!(cert.residual_radius(), 19);
        let lower = certify_lower(&cert, 3).unwrap();
        assert!(lower >= 0.69, "{lower}");
        assert!(lower <= std::f64::consts::LN_2 + 1e-9);
        assert!(k4_constant(&cert) <= 1.443);
        assert!(certify_lower(&cert, 19).is_err());
        let spec = GroupSpec::standard(Family::Free(2));
        let delta = FiniteFunction::delta(spec.family, spec.identity());
        assert!(lower <= objective(&delta, &spec, &NormingFunction::Macaev).unwrap());
    }

    #[test]
    fn half_line_trace_certificate() {
        let cert = half_line_certificate(50).unwrap();
        assert_eq!(certify_lower(&cert, 49).unwrap(), 1.0);
        // Adjoint-identity oracle: for f with f(0)=1 on [-R,R],
        // f(0) = <f₁, α(1)f − f>.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = Family::FreeAbelian(1);
        for _ in 0..100 {
            let mut f = FiniteFunction::from_pairs(
                fam,
                (-10..=10).map(|x| (Element::Vector(vec![x]), rng.gen_range(-1.0..1.0))),
            );
            f.set(Element::Vector(vec![0]), 1.0);
            let d = f.right_difference(&Element::Vector(vec![1]));
            let DualFunction::Explicit(f1) = &cert.entries()[0].function else { unreachable!() };
            assert!((f1.pairing(&d).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip_and_corruption() {
        let cert = half_line_certificate(6).unwrap();
        let text = cert.to_json();
        assert_eq!(Certificate::from_json(&text).unwrap(), cert);
        let corrupted = text.replacen("-1.0", "-0.5", 1);
        assert!(matches!(Certificate::from_json(&corrupted), Err(Error::InvalidCertificate(_))));
        let w = build_f2_witness(6, Action::Left).unwrap();
        assert_eq!(Certificate::from_json(&w.to_json()).unwrap(), w);
        let mut file = w.to_file();
        file.dual_norms[0] = [0.1, 0.2];
        assert!(Certificate::from_file(&file).is_err());
    }

    #[test]
    fn bad_residual_radius_rejected() {
        let spec = GroupSpec::standard(Family::FreeAbelian(1));
        let f = FiniteFunction::from_pairs(spec.family, (0..=5).map(|x| (Element::Vector(vec![x]), -1.0)));
        let r = Certificate::new(
            spec,
            Action::Right,
            NormingFunction::Trace,
            vec![(Element::Vector(vec![1]), DualFunction::Explicit(f))],
            6,
        );
        assert!(matches!(r, Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn k4_inequality_on_random_functions() {
        let cert = build_f2_witness(12, Action::Right).unwrap();
        let c = k4_constant(&cert);
        let spec = GroupSpec::standard(Family::Free(2));
        let b = ball(&spec, 3, DEFAULT_BALL_CAP).unwrap();
        let gens = cert.generators();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let f = FiniteFunction::from_pairs(
                spec.family,
                b.elements().iter().map(|e| (e.clone(), rng.gen_range(-1.0..1.0))),
            );
            // The right-difference objective is invariant under left
            // translation, so move the argmax to e.
            let (top, _) = f.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
            let g = spec.inverse(top).unwrap();
            let moved = f.left_translate(&g);
            assert_eq!(moved.at_identity().abs(), f.sup_norm());
            let obj = objective_with(&moved, &gens, &NormingFunction::Macaev, Action::Right).unwrap();
            assert!(f.sup_norm() <= c * obj + 1e-12);
        }
    }
}
