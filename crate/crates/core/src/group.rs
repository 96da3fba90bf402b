//! Finite abelian coefficient groups, presented as products of cyclic factors.
//!
//! Elements are stored as a single mixed-radix code so that cochain values are
//! `Copy` and cheap to hash. The first factor is the least significant digit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest group order accepted. Enumeration over larger groups is hopeless anyway.
pub const MAX_ORDER: u64 = 1 << 16;

/// An element of a [`CoefficientGroup`], encoded in mixed radix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Element(pub(crate) u32);

impl Element {
    pub const ZERO: Element = Element(0);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The mixed-radix code of this element.
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }
}

/// The group Z_{m_1} x ... x Z_{m_r} with every m_j >= 2.
#[derive(Clone)]
pub struct CoefficientGroup {
    factors: Vec<u32>,
    order: u32,
    exponent: u32,
}

impl PartialEq for CoefficientGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for CoefficientGroup {}

impl fmt::Debug for CoefficientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientGroup({self})")
    }
}

impl CoefficientGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::BadCoefficients(
                "the coefficient group must be non-trivial".into(),
            ));
        }
        let mut order: u64 = 1;
        let mut exponent: u64 = 1;
        for &m in &factors {
            if m < 2 {
                return Err(Error::BadCoefficients(format!("cyclic factor of order {m}")));
            }
            order *= m as u64;
            if order > MAX_ORDER {
                return Err(Error::BadCoefficients(format!("group order exceeds {MAX_ORDER}")));
            }
            exponent = num_integer::lcm(exponent, m as u64);
        }
        Ok(CoefficientGroup {
            factors,
            order: order as u32,
            exponent: exponent as u32,
        })
    }

    /// Z_m.
    pub fn cyclic(m: u32) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn z2() -> Self {
        Self::new(vec![2]).expect("Z2 is valid")
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_z2(&self) -> bool {
        self.factors == [2]
    }

    /// Builds an element from residues; each residue is reduced modulo its factor.
    pub fn element(&self, residues: &[u32]) -> Result<Element> {
        if residues.len() != self.factors.len() {
            return Err(Error::BadCoefficients(format!(
                "expected {} residues, got {}",
                self.factors.len(),
                residues.len()
            )));
        }
        let mut code = 0u32;
        for (&r, &m) in residues.iter().zip(&self.factors).rev() {
            code = code * m + r % m;
        }
        Ok(Element(code))
    }

    pub fn residues(&self, e: Element) -> Vec<u32> {
        let mut code = e.0;
        self.factors
            .iter()
            .map(|&m| {
                let r = code % m;
                code /= m;
                r
            })
            .collect()
    }

    /// The element with residue 1 in every factor.
    pub fn one(&self) -> Element {
        self.element(&vec![1; self.factors.len()]).expect("arity matches")
    }

    /// All elements in code order; the first is zero.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.order).map(Element)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Element> {
        (1..self.order).map(Element)
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.factors.len() == 1 {
            let m = self.factors[0];
            let s = a.0 + b.0;
            return Element(if s >= m { s - m } else { s });
        }
        self.add_multi(a, b)
    }

    fn add_multi(&self, a: Element, b: Element) -> Element {
        let (mut x, mut y) = (a.0, b.0);
        let mut code = 0u32;
        let mut place = 1u32;
        for &m in &self.factors {
            let r = (x % m + y % m) % m;
            x /= m;
            y /= m;
            code += r * place;
            place *= m;
        }
        Element(code)
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        self.scale(-1, a)
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    /// Action of an integer on the group.
    #[inline]
    pub fn scale(&self, k: i64, a: Element) -> Element {
        if self.factors.len() == 1 {
            let m = self.factors[0] as i64;
            return Element(((k.rem_euclid(m) * a.0 as i64) % m) as u32);
        }
        let mut x = a.0;
        let mut code = 0u32;
        let mut place = 1u32;
        for &m in &self.factors {
            let r = x % m;
            x /= m;
            let s = (k.rem_euclid(m as i64) * r as i64) % m as i64;
            code += s as u32 * place;
            place *= m;
        }
        Element(code)
    }

    /// True when `k * a == 0` for every element `a`.
    pub fn annihilates(&self, k: i64) -> bool {
        k.rem_euclid(self.exponent as i64) == 0
    }

    /// Residue of `e` in factor `j`.
    #[inline]
    pub fn component(&self, e: Element, j: usize) -> u32 {
        let mut code = e.0;
        for &m in &self.factors[..j] {
            code /= m;
        }
        code % self.factors[j]
    }

    /// Replaces the residue in factor `j`.
    pub fn with_component(&self, e: Element, j: usize, r: u32) -> Element {
        let mut res = self.residues(e);
        res[j] = r % self.factors[j];
        self.element(&res).expect("arity matches")
    }

    /// Canonical descriptor such as `z2` or `z2xz4`.
    pub fn descriptor(&self) -> String {
        self.factors
            .iter()
            .map(|m| format!("z{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }
}

impl fmt::Display for CoefficientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for CoefficientGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .trim()
            .to_ascii_lowercase()
            .split('x')
            .map(|part| {
                part.strip_prefix('z')
                    .and_then(|digits| digits.parse::<u32>().ok())
                    .ok_or_else(|| Error::BadCoefficients(format!("cannot parse coefficient descriptor {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl Serialize for CoefficientGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.descriptor())
    }
}

impl<'de> Deserialize<'de> for CoefficientGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let g: CoefficientGroup = "z2xz4".parse().unwrap();
        assert_eq!(g.factors(), &[2, 4]);
        assert_eq!(g.order(), 8);
        assert_eq!(g.exponent(), 4);
        assert_eq!(g.to_string(), "z2xz4");
        assert!("z1".parse::<CoefficientGroup>().is_err());
        assert!("".parse::<CoefficientGroup>().is_err());
        assert!("q3".parse::<CoefficientGroup>().is_err());
    }

    #[test]
    fn arithmetic_is_componentwise() {
        let g: CoefficientGroup = "z3xz4".parse().unwrap();
        let a = g.element(&[2, 3]).unwrap();
        let b = g.element(&[2, 2]).unwrap();
        assert_eq!(g.residues(g.add(a, b)), vec![1, 1]);
        assert_eq!(g.residues(g.neg(a)), vec![1, 1]);
        assert_eq!(g.residues(g.scale(-5, a)), vec![2, 1]);
        assert!(g.add(a, g.neg(a)).is_zero());
        assert!(g.annihilates(12));
        assert!(!g.annihilates(6));
        assert_eq!(g.component(a, 1), 3);
    }

    #[test]
    fn addition_matches_residue_arithmetic() {
        let g: CoefficientGroup = "z2xz3xz2".parse().unwrap();
        for a in g.elements() {
            for b in g.elements() {
                let (ra, rb) = (g.residues(a), g.residues(b));
                let want: Vec<u32> = ra
                    .iter()
                    .zip(&rb)
                    .zip(g.factors())
                    .map(|((x, y), m)| (x + y) % m)
                    .collect();
                assert_eq!(g.residues(g.add(a, b)), want);
            }
        }
    }
}
