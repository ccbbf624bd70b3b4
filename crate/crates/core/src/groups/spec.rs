use super::element::{Element, Family};
use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// A family together with an explicit generating set `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub family: Family,
    generators: Vec<Element>,
    standard: bool,
}

impl GroupSpec {
    /// The family with its standard (symmetric, for groups) generators.
    pub fn standard(family: Family) -> Self {
        GroupSpec { family, generators: family.standard_generators(), standard: true }
    }

    /// Explicit generating set, deduplicated, in the given order.
    pub fn with_generators(family: Family, generators: Vec<Element>) -> Result<Self> {
        let mut gens: Vec<Element> = Vec::with_capacity(generators.len());
        for g in generators {
            if g == family.identity() {
                return Err(Error::InvalidInput("identity is not a generator".into()));
            }
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            return Err(Error::InvalidInput("empty generating set".into()));
        }
        let standard = {
            let mut a = gens.clone();
            let mut b = family.standard_generators();
            a.sort();
            b.sort();
            a == b
        };
        Ok(GroupSpec { family, generators: gens, standard })
    }

    /// Append missing inverses so that `K = K⁻¹`.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        if !self.family.has_inverses() {
            return out;
        }
        for g in &self.generators {
            let inv = self.family.inverse(g).expect("group element");
            if !out.generators.contains(&inv) {
                out.generators.push(inv);
            }
        }
        out.standard =
            GroupSpec::with_generators(self.family, out.generators.clone()).map(|s| s.standard).unwrap_or(false);
        out
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn is_symmetric(&self) -> bool {
        self.family.has_inverses()
            && self.generators.iter().all(|g| self.generators.contains(&self.family.inverse(g).expect("group element")))
    }

    pub fn identity(&self) -> Element {
        self.family.identity()
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.family.multiply(a, b)
    }

    pub fn inverse(&self, a: &Element) -> Option<Element> {
        self.family.inverse(a)
    }

    pub fn parse_word(&self, w: &str) -> Result<Element> {
        self.family.parse_word(w)
    }

    pub fn format(&self, a: &Element) -> String {
        self.family.format(a)
    }

    /// Word length for standard generators where a closed form exists.
    pub fn closed_form_length(&self, a: &Element) -> Option<usize> {
        if self.standard {
            self.family.standard_length(a)
        } else {
            None
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.standard {
            let words: Vec<String> = self.generators.iter().map(|g| self.family.format(g)).collect();
            write!(f, ";gens={}", words.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `"free:2"`, `"zd:3"`, `"lamplighter"`, `"heisenberg"`, `"monoid:2"`,
    /// optionally followed by `";gens=w1,w2,…"`. Explicit generators of a
    /// group are closed under inverses.
    fn from_str(s: &str) -> Result<Self> {
        let (head, gens) = match s.split_once(';') {
            Some((h, rest)) => {
                let list = rest
                    .trim()
                    .strip_prefix("gens=")
                    .ok_or_else(|| Error::InvalidInput(format!("expected ';gens=' in {s:?}")))?;
                (h.trim(), Some(list))
            }
            None => (s.trim(), None),
        };
        let rank = |arg: Option<&str>| -> Result<u8> {
            let n: u8 = arg
                .ok_or_else(|| Error::InvalidInput(format!("{head:?} needs a rank")))?
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad rank in {head:?}")))?;
            if n == 0 || n > 26 {
                return Err(Error::InvalidInput(format!("rank {n} out of range 1..=26")));
            }
            Ok(n)
        };
        let (name, arg) = match head.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (head, None),
        };
        let family = match name {
            "free" => Family::Free(rank(arg)?),
            "zd" => Family::FreeAbelian(rank(arg)?),
            "monoid" => Family::FreeMonoid(rank(arg)?),
            "lamplighter" if arg.is_none() => Family::Lamplighter,
            "heisenberg" if arg.is_none() => Family::Heisenberg,
            _ => return Err(Error::InvalidInput(format!("unknown group {head:?}"))),
        };
        match gens {
            None => Ok(GroupSpec::standard(family)),
            Some(list) => {
                let elems = list.split(',').map(|w| family.parse_word(w)).collect::<Result<Vec<_>>>()?;
                Ok(GroupSpec::with_generators(family, elems)?.symmetrized())
            }
        }
    }
}
