//! Finite formal sums of canonical diagrams with exact rational coefficients.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diagram::{canonicalize, CanonicalDiagram, Diagram};

pub type Coeff = BigRational;

pub fn q(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector keyed by canonical diagrams; never stores zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct DiagramVector {
    terms: BTreeMap<CanonicalDiagram, Coeff>,
}

impl DiagramVector {
    pub fn zero() -> DiagramVector {
        DiagramVector::default()
    }

    pub fn basis(c: &CanonicalDiagram) -> DiagramVector {
        let mut v = DiagramVector::zero();
        v.add_term(c.clone(), Coeff::one());
        v
    }

    /// The diagram as a vector: its representative times the AS sign.
    pub fn from_diagram(d: &Diagram) -> DiagramVector {
        let mut v = DiagramVector::zero();
        v.add_diagram(d, &Coeff::one());
        v
    }

    pub fn add_diagram(&mut self, d: &Diagram, coeff: &Coeff) {
        let c = canonicalize(d);
        match c.sign {
            0 => {}
            1 => self.add_term(c.diagram, coeff.clone()),
            _ => self.add_term(c.diagram, -coeff.clone()),
        }
    }

    pub fn add_term(&mut self, c: CanonicalDiagram, coeff: Coeff) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(c) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &DiagramVector, scale: &Coeff) {
        if scale.is_zero() {
            return;
        }
        for (c, x) in &other.terms {
            self.add_term(c.clone(), x * scale);
        }
    }

    pub fn scaled(&self, scale: &Coeff) -> DiagramVector {
        let mut out = DiagramVector::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalDiagram, &Coeff)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &CanonicalDiagram> {
        self.terms.keys()
    }

    pub fn coeff(&self, c: &CanonicalDiagram) -> Coeff {
        self.terms.get(c).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Extends `f` (defined on basis diagrams) linearly.
    pub fn map_linear<F>(&self, mut f: F) -> DiagramVector
    where
        F: FnMut(&CanonicalDiagram) -> DiagramVector,
    {
        let mut out = DiagramVector::zero();
        for (c, x) in &self.terms {
            out.add_scaled(&f(c), x);
        }
        out
    }

    /// Like `map_linear` for maps that may fail.
    pub fn try_map_linear<F, E>(&self, mut f: F) -> Result<DiagramVector, E>
    where
        F: FnMut(&CanonicalDiagram) -> Result<DiagramVector, E>,
    {
        let mut out = DiagramVector::zero();
        for (c, x) in &self.terms {
            out.add_scaled(&f(c)?, x);
        }
        Ok(out)
    }

    /// Keeps the terms satisfying `keep`.
    pub fn filter<F: FnMut(&CanonicalDiagram) -> bool>(&self, mut keep: F) -> DiagramVector {
        DiagramVector {
            terms: self.terms.iter().filter(|(c, _)| keep(c)).map(|(c, x)| (c.clone(), x.clone())).collect(),
        }
    }

    /// Common degree of all terms, if there is one.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|c| c.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()))
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|x| x.is_integer())
    }

    /// Scales so that the first nonzero coefficient is positive and the
    /// coefficients are coprime integers.
    pub fn primitive(&self) -> DiagramVector {
        let Some(first) = self.terms.values().next() else {
            return self.clone();
        };
        let den = self.denominator();
        let ints: Vec<BigInt> = self.terms.values().map(|x| (x * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
        let mut s = BigRational::new(den, g);
        if first.is_negative() {
            s = -s;
        }
        self.scaled(&s)
    }
}

impl FromIterator<(CanonicalDiagram, Coeff)> for DiagramVector {
    fn from_iter<I: IntoIterator<Item = (CanonicalDiagram, Coeff)>>(iter: I) -> Self {
        let mut v = DiagramVector::zero();
        for (c, x) in iter {
            v.add_term(c, x);
        }
        v
    }
}

impl fmt::Debug for DiagramVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, x) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({x})·[{}]", c.hex())?;
        }
        Ok(())
    }
}

impl AddAssign<&DiagramVector> for DiagramVector {
    fn add_assign(&mut self, rhs: &DiagramVector) {
        self.add_scaled(rhs, &Coeff::one());
    }
}

impl SubAssign<&DiagramVector> for DiagramVector {
    fn sub_assign(&mut self, rhs: &DiagramVector) {
        self.add_scaled(rhs, &-Coeff::one());
    }
}

impl Add<&DiagramVector> for &DiagramVector {
    type Output = DiagramVector;

    fn add(self, rhs: &DiagramVector) -> DiagramVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&DiagramVector> for &DiagramVector {
    type Output = DiagramVector;

    fn sub(self, rhs: &DiagramVector) -> DiagramVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &DiagramVector {
    type Output = DiagramVector;

    fn neg(self) -> DiagramVector {
        self.scaled(&-Coeff::one())
    }
}

impl Mul<&DiagramVector> for &Coeff {
    type Output = DiagramVector;

    fn mul(self, rhs: &DiagramVector) -> DiagramVector {
        rhs.scaled(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Leg, Skeleton};

    fn chord() -> Diagram {
        Diagram::new(Skeleton::Circles(1), 0, vec![Leg::on(0, 0), Leg::on(0, 1)], &[(0, 1)]).unwrap()
    }

    #[test]
    fn cancellation_leaves_no_zero_entries() {
        let a = DiagramVector::from_diagram(&chord());
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let a = DiagramVector::from_diagram(&chord()).scaled(&frac(-6, 4));
        let p = a.primitive();
        assert_eq!(p.iter().next().unwrap().1, &q(1));
    }
}
