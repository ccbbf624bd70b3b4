use crate::error::{Error, Result};
use crate::groups::{ball, BallIndex, Element, Family, FiniteFunction, GroupSpec, DEFAULT_BALL_CAP};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Word lengths in a generating set, closed form or by BFS.
struct Lengths {
    spec: GroupSpec,
    ball: Option<BallIndex>,
}

impl Lengths {
    fn new(spec: &GroupSpec, radius: usize) -> Result<Self> {
        let ball = if spec.closed_form_length(&spec.identity()).is_some() {
            None
        } else {
            Some(ball(spec, radius, DEFAULT_BALL_CAP)?)
        };
        Ok(Lengths { spec: spec.clone(), ball })
    }

    /// `None` when the element is beyond the enumerated radius.
    fn of(&self, x: &Element) -> Option<usize> {
        match &self.ball {
            None => self.spec.closed_form_length(x),
            Some(b) => b.index_of(x).map(|i| b.depth(i)),
        }
    }
}

/// An injective table `ρ` from a source ball into a target group with
/// `ρ(e) = e` and `ρ(h g_p) ∈ ρ(h)·B_M` for table-adjacent pairs.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    source: GroupSpec,
    target: GroupSpec,
    table: BTreeMap<Element, Element>,
    inverse: HashMap<Element, Element>,
    lipschitz_m: usize,
    domain_radius: usize,
    colipschitz: usize,
    displacements: BTreeSet<Element>,
    displacement_weight: usize,
}

impl EmbeddingMap {
    pub fn new(
        source: GroupSpec,
        target: GroupSpec,
        pairs: Vec<(Element, Element)>,
        lipschitz_m: usize,
    ) -> Result<Self> {
        if lipschitz_m == 0 {
            return Err(Error::InvalidInput("Lipschitz constant must be positive".into()));
        }
        if !target.family.has_inverses() {
            return Err(Error::InvalidInput("target must be a group".into()));
        }
        let mut table = BTreeMap::new();
        let mut inverse = HashMap::new();
        for (h, y) in pairs {
            if let Some(prev) = table.insert(h.clone(), y.clone()) {
                if prev != y {
                    return Err(Error::InvalidInput(format!("{} mapped twice", source.format(&h))));
                }
                continue;
            }
            if let Some(other) = inverse.insert(y.clone(), h.clone()) {
                return Err(Error::InvalidInput(format!(
                    "not injective: {} and {} both map to {}",
                    source.format(&other),
                    source.format(&h),
                    target.format(&y)
                )));
            }
        }
        if table.get(&source.identity()) != Some(&target.identity()) {
            return Err(Error::InvalidInput("the table must send e to e".into()));
        }
        let source_len = Lengths::new(&source, table.len())?;
        let mut max_src = 0;
        for h in table.keys() {
            let l = source_len
                .of(h)
                .ok_or_else(|| Error::InvalidInput(format!("{} has no word length", source.format(h))))?;
            max_src = max_src.max(l);
        }
        let domain_radius = {
            let full = ball(&source, max_src, DEFAULT_BALL_CAP)?;
            (0..=max_src)
                .take_while(|&r| full.elements()[..full.count_within(r)].iter().all(|x| table.contains_key(x)))
                .last()
                .unwrap_or(0)
        };
        // Displacements ρ(h)⁻¹ρ(hg) must lie in B_M of the target.
        let target_len = Lengths::new(&target, lipschitz_m.max(1))?;
        let mut displacements = BTreeSet::new();
        for (h, y) in &table {
            for g in source.generators() {
                let hg = source.multiply(h, g);
                let Some(z) = table.get(&hg) else { continue };
                let t = target.multiply(&target.inverse(y).expect("group"), z);
                match target_len.of(&t) {
                    Some(l) if l <= lipschitz_m => {
                        if l > 0 {
                            displacements.insert(t);
                        }
                    }
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "Lipschitz condition fails at {}·{}: displacement {} is not in B_{lipschitz_m}",
                            source.format(h),
                            source.format(g),
                            target.format(&t)
                        )))
                    }
                }
            }
        }
        let displacement_weight = displacements.iter().map(|t| target_len.of(t).unwrap_or(0)).sum();
        let image_len = Lengths::new(&target, lipschitz_m * max_src)?;
        let mut colipschitz = 1;
        for (h, y) in &table {
            let ls = source_len.of(h).unwrap_or(0);
            let lt = image_len
                .of(y)
                .ok_or_else(|| Error::Invariant(format!("image {} escapes B_(M·r)", target.format(y))))?;
            if ls > 0 {
                colipschitz = colipschitz.max(ls.div_ceil(lt));
            }
        }
        Ok(EmbeddingMap {
            source,
            target,
            table,
            inverse,
            lipschitz_m,
            domain_radius,
            colipschitz,
            displacements,
            displacement_weight,
        })
    }

    /// Generator inclusion `free(n) ↪ free(m)` on the radius-`radius` ball.
    pub fn inclusion(n: u8, m: u8, radius: usize) -> Result<Self> {
        if n > m {
            return Err(Error::InvalidInput(format!("cannot include {n} letters into {m}")));
        }
        let source = GroupSpec::standard(Family::Free(n));
        let target = GroupSpec::standard(Family::Free(m));
        let pairs =
            ball(&source, radius, DEFAULT_BALL_CAP)?.elements().iter().map(|h| (h.clone(), h.clone())).collect();
        EmbeddingMap::new(source, target, pairs, 1)
    }

    /// The identity of a group, from its standard generators to the
    /// symmetric closure of `words`; `M` is the longest standard generator
    /// in the new word metric.
    pub fn reexpression(family: Family, words: &[&str], radius: usize) -> Result<Self> {
        let source = GroupSpec::standard(family);
        let gens = words.iter().map(|w| family.parse_word(w)).collect::<Result<Vec<_>>>()?;
        let target = GroupSpec::with_generators(family, gens)?.symmetrized();
        let probe = ball(&target, source.generators().len(), DEFAULT_BALL_CAP)?;
        let mut m = 0;
        for g in source.generators() {
            let i = probe
                .index_of(g)
                .ok_or_else(|| Error::InvalidInput(format!("{} is not reached by {target}", family.format(g))))?;
            m = m.max(probe.depth(i));
        }
        let pairs =
            ball(&source, radius, DEFAULT_BALL_CAP)?.elements().iter().map(|h| (h.clone(), h.clone())).collect();
        EmbeddingMap::new(source, target, pairs, m)
    }

    /// Free monoid on `n` letters into the free group on the same letters.
    pub fn monoid_inclusion(n: u8, radius: usize) -> Result<Self> {
        let source = GroupSpec::standard(Family::FreeMonoid(n));
        let target = GroupSpec::standard(Family::Free(n));
        let pairs =
            ball(&source, radius, DEFAULT_BALL_CAP)?.elements().iter().map(|h| (h.clone(), h.clone())).collect();
        EmbeddingMap::new(source, target, pairs, 1)
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn lipschitz_m(&self) -> usize {
        self.lipschitz_m
    }

    /// Largest `r` with `B_r` of the source inside the table.
    pub fn domain_radius(&self) -> usize {
        self.domain_radius
    }

    /// Smallest integer `c` with `|h|_S ≤ c·|ρ(h)|_T` on the table.
    pub fn colipschitz(&self) -> usize {
        self.colipschitz
    }

    /// Distinct nontrivial displacements `ρ(h)⁻¹ρ(hg)` seen on the table.
    pub fn displacements(&self) -> &BTreeSet<Element> {
        &self.displacements
    }

    /// `Σ_t |t|` over the displacements.
    pub fn displacement_weight(&self) -> usize {
        self.displacement_weight
    }

    pub fn apply(&self, h: &Element) -> Option<&Element> {
        self.table.get(h)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `f∘ρ`. Points of `supp f` outside the image are dropped when the
    /// co-Lipschitz bound places any preimage inside the table domain.
    pub fn pullback(&self, f: &FiniteFunction) -> Result<FiniteFunction> {
        if f.family() != self.target.family {
            return Err(Error::InvalidInput("function lives on another family".into()));
        }
        let reach = self.domain_radius / self.colipschitz;
        let lengths = Lengths::new(&self.target, reach)?;
        let mut out = FiniteFunction::zero(self.source.family);
        for (y, v) in f.iter() {
            match self.inverse.get(y) {
                Some(h) => out.set(h.clone(), *v),
                None => {
                    if lengths.of(y).is_none_or(|l| l > reach) {
                        return Err(Error::DomainExceeded(format!(
                            "{} is outside the table's reach",
                            self.target.format(y)
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> EmbeddingFile {
        EmbeddingFile {
            source: self.source.to_string(),
            target: self.target.to_string(),
            m: self.lipschitz_m,
            pairs: self.table.iter().map(|(h, y)| (self.source.format(h), self.target.format(y))).collect(),
        }
    }

    pub fn from_file(file: &EmbeddingFile) -> Result<Self> {
        let source: GroupSpec = file.source.parse()?;
        let target: GroupSpec = file.target.parse()?;
        let pairs = file
            .pairs
            .iter()
            .map(|(a, b)| Ok((source.parse_word(a)?, target.parse_word(b)?)))
            .collect::<Result<Vec<_>>>()?;
        EmbeddingMap::new(source, target, pairs, file.m)
    }
}

/// On-disk embedding table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub source: String,
    pub target: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub pairs: Vec<(String, String)>,
}
