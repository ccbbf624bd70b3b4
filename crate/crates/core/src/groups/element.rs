use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// Group family with its rank parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Free group on `n` generators `a, b, …` (inverses `A, B, …`).
    Free(u8),
    /// `Z^d` with unit vectors `a, b, …`.
    FreeAbelian(u8),
    /// `Z/2 ≀ Z`: `t` moves the lamplighter, `a` toggles the lamp under it.
    Lamplighter,
    /// Integer Heisenberg group, generators `x, y`.
    Heisenberg,
    /// Free monoid on `n` letters (no inverses).
    FreeMonoid(u8),
}

/// Canonical form of a group element. Equal elements have identical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Freely reduced word; letter `i` is generator `i`, `-i` its inverse.
    Word(Vec<i8>),
    Vector(Vec<i64>),
    /// Sorted positions of lit lamps and the lamplighter position.
    Lamps {
        lit: Vec<i64>,
        pos: i64,
    },
    /// `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    Heis(i64, i64, i64),
}

impl Family {
    pub fn has_inverses(&self) -> bool {
        !matches!(self, Family::FreeMonoid(_))
    }

    pub fn identity(&self) -> Element {
        match *self {
            Family::Free(_) | Family::FreeMonoid(_) => Element::Word(Vec::new()),
            Family::FreeAbelian(d) => Element::Vector(vec![0; d as usize]),
            Family::Lamplighter => Element::Lamps { lit: Vec::new(), pos: 0 },
            Family::Heisenberg => Element::Heis(0, 0, 0),
        }
    }

    /// The standard generating set, closed under inverses for groups.
    pub fn standard_generators(&self) -> Vec<Element> {
        match *self {
            Family::Free(n) => (1..=n as i8).flat_map(|i| [Element::Word(vec![i]), Element::Word(vec![-i])]).collect(),
            Family::FreeMonoid(n) => (1..=n as i8).map(|i| Element::Word(vec![i])).collect(),
            Family::FreeAbelian(d) => (0..d as usize)
                .flat_map(|i| {
                    let mut p = vec![0; d as usize];
                    p[i] = 1;
                    let mut m = vec![0; d as usize];
                    m[i] = -1;
                    [Element::Vector(p), Element::Vector(m)]
                })
                .collect(),
            Family::Lamplighter => vec![
                Element::Lamps { lit: vec![], pos: 1 },
                Element::Lamps { lit: vec![], pos: -1 },
                Element::Lamps { lit: vec![0], pos: 0 },
            ],
            Family::Heisenberg => {
                vec![Element::Heis(1, 0, 0), Element::Heis(-1, 0, 0), Element::Heis(0, 1, 0), Element::Heis(0, -1, 0)]
            }
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Word(x), Element::Word(y)) => {
                let mut out = x.clone();
                if matches!(self, Family::FreeMonoid(_)) {
                    out.extend_from_slice(y);
                    return Element::Word(out);
                }
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Word(out)
            }
            (Element::Vector(x), Element::Vector(y)) => Element::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            (Element::Lamps { lit: l1, pos: p1 }, Element::Lamps { lit: l2, pos: p2 }) => {
                let mut set: BTreeSet<i64> = l1.iter().copied().collect();
                for &l in l2 {
                    let shifted = l + p1;
                    if !set.remove(&shifted) {
                        set.insert(shifted);
                    }
                }
                Element::Lamps { lit: set.into_iter().collect(), pos: p1 + p2 }
            }
            (Element::Heis(a1, b1, c1), Element::Heis(a2, b2, c2)) => {
                Element::Heis(a1 + a2, b1 + b2, c1 + c2 + a1 * b2)
            }
            _ => panic!("multiply: elements {a:?} and {b:?} from different families"),
        }
    }

    pub fn inverse(&self, a: &Element) -> Option<Element> {
        if !self.has_inverses() {
            return match a {
                Element::Word(w) if w.is_empty() => Some(a.clone()),
                _ => None,
            };
        }
        Some(match a {
            Element::Word(w) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            Element::Vector(v) => Element::Vector(v.iter().map(|x| -x).collect()),
            Element::Lamps { lit, pos } => Element::Lamps { lit: lit.iter().map(|l| l - pos).collect(), pos: -pos },
            Element::Heis(a, b, c) => Element::Heis(-a, -b, a * b - c),
        })
    }

    /// The `x` with `x·g = s`, if it exists.
    pub fn right_divide(&self, s: &Element, g: &Element) -> Option<Element> {
        if let (Family::FreeMonoid(_), Element::Word(sw), Element::Word(gw)) = (self, s, g) {
            return sw.strip_suffix(gw.as_slice()).map(|x| Element::Word(x.to_vec()));
        }
        Some(self.multiply(s, &self.inverse(g)?))
    }

    /// The `x` with `g·x = s`, if it exists.
    pub fn left_divide(&self, g: &Element, s: &Element) -> Option<Element> {
        if let (Family::FreeMonoid(_), Element::Word(sw), Element::Word(gw)) = (self, s, g) {
            return sw.strip_prefix(gw.as_slice()).map(|x| Element::Word(x.to_vec()));
        }
        Some(self.multiply(&self.inverse(g)?, s))
    }

    /// Word length with respect to the standard generators, where a closed
    /// form is available.
    pub fn standard_length(&self, a: &Element) -> Option<usize> {
        match a {
            Element::Word(w) => Some(w.len()),
            Element::Vector(v) => Some(v.iter().map(|x| x.unsigned_abs() as usize).sum()),
            _ => None,
        }
    }

    fn letters(&self) -> u8 {
        match *self {
            Family::Free(n) | Family::FreeMonoid(n) | Family::FreeAbelian(n) => n,
            Family::Lamplighter | Family::Heisenberg => 2,
        }
    }

    /// Parse a word over the family alphabet and return its canonical form.
    /// `""` and `"1"` denote the identity.
    pub fn parse_word(&self, word: &str) -> Result<Element> {
        let word = word.trim();
        let mut acc = self.identity();
        if word.is_empty() || word == "1" {
            return Ok(acc);
        }
        for ch in word.chars() {
            let g = self.letter(ch)?;
            acc = self.multiply(&acc, &g);
        }
        Ok(acc)
    }

    fn letter(&self, ch: char) -> Result<Element> {
        let unknown = || Error::UnknownGenerator(ch);
        match *self {
            Family::Free(_) | Family::FreeMonoid(_) | Family::FreeAbelian(_) => {
                let lower = ch.to_ascii_lowercase();
                if !lower.is_ascii_lowercase() {
                    return Err(unknown());
                }
                let idx = (lower as u8 - b'a') as usize;
                if idx >= self.letters() as usize {
                    return Err(unknown());
                }
                let inverse = ch.is_ascii_uppercase();
                match *self {
                    Family::FreeMonoid(_) if inverse => Err(unknown()),
                    Family::FreeAbelian(d) => {
                        let mut v = vec![0; d as usize];
                        v[idx] = if inverse { -1 } else { 1 };
                        Ok(Element::Vector(v))
                    }
                    _ => {
                        let l = idx as i8 + 1;
                        Ok(Element::Word(vec![if inverse { -l } else { l }]))
                    }
                }
            }
            Family::Lamplighter => match ch {
                't' => Ok(Element::Lamps { lit: vec![], pos: 1 }),
                'T' => Ok(Element::Lamps { lit: vec![], pos: -1 }),
                'a' | 'A' => Ok(Element::Lamps { lit: vec![0], pos: 0 }),
                _ => Err(unknown()),
            },
            Family::Heisenberg => match ch {
                'x' => Ok(Element::Heis(1, 0, 0)),
                'X' => Ok(Element::Heis(-1, 0, 0)),
                'y' => Ok(Element::Heis(0, 1, 0)),
                'Y' => Ok(Element::Heis(0, -1, 0)),
                _ => Err(unknown()),
            },
        }
    }

    /// A word that parses back to `a`.
    pub fn format(&self, a: &Element) -> String {
        fn power(out: &mut String, up: char, down: char, k: i64) {
            let c = if k >= 0 { up } else { down };
            out.extend(std::iter::repeat_n(c, k.unsigned_abs() as usize));
        }
        let mut out = String::new();
        match a {
            Element::Word(w) => {
                for &l in w {
                    let c = (b'a' + (l.unsigned_abs() - 1)) as char;
                    out.push(if l < 0 { c.to_ascii_uppercase() } else { c });
                }
            }
            Element::Vector(v) => {
                for (i, &x) in v.iter().enumerate() {
                    let c = (b'a' + i as u8) as char;
                    power(&mut out, c, c.to_ascii_uppercase(), x);
                }
            }
            Element::Lamps { lit, pos } => {
                let mut here = 0i64;
                for &l in lit {
                    power(&mut out, 't', 'T', l - here);
                    out.push('a');
                    here = l;
                }
                power(&mut out, 't', 'T', pos - here);
            }
            Element::Heis(x, y, z) => {
                power(&mut out, 'x', 'X', *x);
                power(&mut out, 'y', 'Y', *y);
                let k = z - x * y;
                let unit = if k >= 0 { "xyXY" } else { "yxYX" };
                for _ in 0..k.unsigned_abs() {
                    out.push_str(unit);
                }
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Free(n) => write!(f, "free:{n}"),
            Family::FreeAbelian(d) => write!(f, "zd:{d}"),
            Family::Lamplighter => write!(f, "lamplighter"),
            Family::Heisenberg => write!(f, "heisenberg"),
            Family::FreeMonoid(n) => write!(f, "monoid:{n}"),
        }
    }
}
