//! Sparse multivariate polynomials keyed by [`Atom`].
//!
//! Monomials are ordered graded-lexicographically with the atom order as
//! variable priority, which is a monomial order: exact division by repeated
//! leading-term cancellation is therefore well defined.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::scalar::Coefficient;
use crate::symcore::atom::Atom;
use crate::{Integer, Rational};

/// Power product of atoms, exponents strictly positive, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Atom, u32)>) -> Monomial {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(pairs.len());
        for (a, e) in pairs {
            match out.last_mut() {
                Some((b, f)) if *b == a => *f += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == *a {
                let f = other.0[j].1;
                if f > *e {
                    return None;
                }
                if f < *e {
                    out.push((a.clone(), e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Total degree in the atoms selected by `pred`.
    pub fn degree_in(&self, pred: &dyn Fn(&Atom) -> bool) -> u32 {
        self.0.iter().filter(|(a, _)| pred(a)).map(|(_, e)| e).sum()
    }

    /// Splits into the part made of atoms selected by `pred` and the rest.
    pub fn split(&self, pred: &dyn Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (x, y) in self.0.iter().zip(other.0.iter()) {
            match x.0.cmp(&y.0) {
                // the monomial carrying the smaller atom is the larger one
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match x.1.cmp(&y.1) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Default for Poly<C> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<C: Coefficient> Poly<C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(C::one())
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Leading term under the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &C) -> Self {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c.clone() * k.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &a.terms {
            for (n, d) in &b.terms {
                out.add_term(m.mul(n), c.clone() * d.clone());
            }
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (dm, dc) = d.leading()?;
        if d.len() == 1 {
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                out.terms.insert(m.div(dm)?, c.clone() / dc.clone());
            }
            return Some(out);
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(dm)?;
            let c = rc.clone() / dc.clone();
            for (n, e) in &d.terms {
                rem.add_term(n.mul(&m), -(e.clone() * c.clone()));
            }
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Maximum total degree over terms, in atoms selected by `pred`.
    pub fn degree_in(&self, pred: &dyn Fn(&Atom) -> bool) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(pred))
            .max()
            .unwrap_or(0)
    }

    /// Monomial gcd of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    /// Groups terms by their part in the atoms selected by `pred`; each
    /// group maps to the polynomial in the remaining atoms.
    pub fn collect_by(&self, pred: &dyn Fn(&Atom) -> bool) -> BTreeMap<Monomial, Poly<C>> {
        let mut out: BTreeMap<Monomial, Poly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.split(pred);
            out.entry(sel).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(a, _)| a.clone()))
            .collect()
    }
}

impl Poly<Rational> {
    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients, signed so that the leading coefficient of the quotient
    /// is positive.
    pub fn content(&self) -> Rational {
        let mut num_gcd = Integer::zero();
        let mut den_lcm = Integer::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        let c = Rational::new(num_gcd, den_lcm);
        match self.leading() {
            Some((_, lc)) if lc.is_negative() => -c,
            _ => c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly<Rational> {
        Poly::atom(Atom::var("x"))
    }
    fn t() -> Poly<Rational> {
        Poly::atom(Atom::var("t"))
    }
    fn r(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    #[test]
    fn binomial_square_expands() {
        let s = x().add(&t());
        let sq = s.pow(2);
        assert_eq!(sq.len(), 3);
        let expected = x().pow(2).add(&x().mul(&t()).scale(&r(2))).add(&t().pow(2));
        assert_eq!(sq, expected);
    }

    #[test]
    fn exact_division() {
        let a = x().sub(&t());
        let b = x().add(&t());
        let prod = a.mul(&b).mul(&a);
        assert_eq!(prod.div_exact(&a), Some(a.mul(&b)));
        assert_eq!(prod.div_exact(&x()), None);
        let xt = x().mul(&t());
        assert_eq!(xt.div_exact(&x()), Some(t()));
    }

    #[test]
    fn content_is_signed_for_positive_lead() {
        let p = x().scale(&Rational::new(Integer::from(-3), Integer::from(4)))
            .add(&t().scale(&Rational::new(Integer::from(3), Integer::from(2))));
        let c = p.content();
        let prim = p.scale(&c.recip());
        assert!(prim.leading().unwrap().1.is_positive());
        assert!(prim.terms().all(|(_, c)| c.is_integer()));
    }

    #[test]
    fn monomial_order_is_graded() {
        let a = Monomial::from_pairs(vec![(Atom::var("x"), 2)]);
        let b = Monomial::from_pairs(vec![(Atom::var("t"), 1), (Atom::var("x"), 1)]);
        let c = Monomial::from_pairs(vec![(Atom::var("t"), 1)]);
        assert!(c < a && c < b);
        // t < x as atoms, so t*x outranks x^2
        assert!(b > a);
    }
}
