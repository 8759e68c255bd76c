//! Canonical polynomial-fraction normal form.
//!
//! A [`NormalForm`] is an expanded numerator polynomial over the rationals
//! divided by a product of denominator factors. Each factor is either a
//! single atom or a primitive multi-term polynomial with coprime integer
//! coefficients and positive leading coefficient. Factors are refined
//! against each other by exact division on insertion, and cancelled against
//! the numerator after every operation.
//!
//! The numerator is zero exactly when the expression is identically zero,
//! so zero testing (and therefore equality via differences) is exact.
//! Representations of equal non-zero values agree whenever their
//! denominators factor over the same set of factors, which holds for every
//! expression built from products and powers of factored denominators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symcore::atom::Atom;
use crate::symcore::expr::{Expr, Node};
use crate::symcore::poly::{Monomial, Poly};
use crate::{Polynomial, Rational};

#[derive(Clone, Debug)]
pub struct NormalForm {
    num: Polynomial,
    den: BTreeMap<Polynomial, u32>,
}

/// Mathematical equality. Structurally equal forms short-circuit; otherwise
/// the difference is normalized and tested for zero.
impl PartialEq for NormalForm {
    fn eq(&self, other: &Self) -> bool {
        (self.num == other.num && self.den == other.den) || self.sub(other).is_zero()
    }
}

impl Eq for NormalForm {}

impl Default for NormalForm {
    fn default() -> Self {
        NormalForm::zero()
    }
}

/// Splits a non-zero polynomial into rational content, atom factors and a
/// primitive remainder.
fn factorize(p: &Polynomial) -> (Rational, Vec<(Polynomial, u32)>) {
    let mono = p.monomial_content();
    let reduced = if mono.is_one() {
        p.clone()
    } else {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            out.add_term(m.div(&mono).expect("monomial content divides"), c.clone());
        }
        out
    };
    let content = reduced.content();
    let prim = reduced.scale(&content.recip());
    let mut factors: Vec<(Polynomial, u32)> = mono
        .factors()
        .iter()
        .map(|(a, e)| (Poly::atom(a.clone()), *e))
        .collect();
    if prim.as_constant().is_none() {
        factors.push((prim, 1));
    }
    (content, factors)
}

fn insert_factor(den: &mut BTreeMap<Polynomial, u32>, mut f: Polynomial, k: u32) {
    if k == 0 {
        return;
    }
    if let Some(m) = den.get_mut(&f) {
        *m += k;
        return;
    }
    if f.len() > 1 {
        let existing: Vec<Polynomial> = den.keys().filter(|g| g.len() > 1).cloned().collect();
        for g in existing {
            while let Some(qt) = f.div_exact(&g) {
                *den.get_mut(&g).unwrap() += k;
                f = qt;
                if f.as_constant().is_some() {
                    return;
                }
            }
        }
        if let Some(m) = den.get_mut(&f) {
            *m += k;
            return;
        }
        let mut split = Vec::new();
        for (g, mg) in den.iter() {
            if g.len() > 1 {
                if let Some(qt) = g.div_exact(&f) {
                    split.push((g.clone(), *mg, qt));
                }
            }
        }
        for (g, mg, qt) in split {
            den.remove(&g);
            *den.entry(f.clone()).or_insert(0) += mg;
            insert_factor(den, qt, mg);
        }
    }
    *den.entry(f).or_insert(0) += k;
}

/// Writes `f` as a product of factors of a refined `base`.
fn decompose(mut f: Polynomial, base: &BTreeMap<Polynomial, u32>) -> Vec<(Polynomial, u32)> {
    let mut out = Vec::new();
    if base.contains_key(&f) {
        return vec![(f, 1)];
    }
    for g in base.keys() {
        let mut k = 0;
        while let Some(qt) = f.div_exact(g) {
            f = qt;
            k += 1;
        }
        if k > 0 {
            out.push((g.clone(), k));
        }
        if f.as_constant().is_some() {
            break;
        }
    }
    debug_assert!(f.as_constant().is_some(), "factor not covered by refined base");
    out
}

/// Rewrites two factored denominators over a common refined factor set.
fn common_base(
    a: &BTreeMap<Polynomial, u32>,
    b: &BTreeMap<Polynomial, u32>,
) -> (BTreeMap<Polynomial, u32>, BTreeMap<Polynomial, u32>) {
    let atoms_only = a.keys().chain(b.keys()).all(|f| f.len() == 1);
    if atoms_only || a.keys().eq(b.keys()) {
        return (a.clone(), b.clone());
    }
    let mut base = BTreeMap::new();
    for f in a.keys().chain(b.keys()) {
        insert_factor(&mut base, f.clone(), 1);
    }
    let rewrite = |d: &BTreeMap<Polynomial, u32>| {
        let mut out = BTreeMap::new();
        for (f, m) in d {
            for (g, k) in decompose(f.clone(), &base) {
                *out.entry(g).or_insert(0) += k * m;
            }
        }
        out
    };
    (rewrite(a), rewrite(b))
}

/// Divides `num` by factors of `den` as long as the division is exact.
fn cancel_pair(num: &mut Polynomial, den: &mut BTreeMap<Polynomial, u32>) {
    if num.is_zero() {
        den.clear();
        return;
    }
    for (f, m) in den.iter_mut() {
        while *m > 0 {
            match num.div_exact(f) {
                Some(q) => {
                    *num = q;
                    *m -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|_, m| *m > 0);
}

fn expand_factors<'a>(it: impl Iterator<Item = (&'a Polynomial, u32)>) -> Polynomial {
    let mut acc = Poly::one();
    for (f, m) in it {
        if m > 0 {
            acc = acc.mul(&f.pow(m));
        }
    }
    acc
}

fn poly_to_expr(p: &Polynomial) -> Expr {
    let terms: Vec<Expr> = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let mut factors = vec![Expr::num(c.clone())];
            for (a, e) in m.factors() {
                factors.push(Expr::atom(a.clone()).pow(*e as i32));
            }
            Expr::mul(factors)
        })
        .collect();
    Expr::add(terms)
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm {
            num: Poly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        NormalForm::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        NormalForm {
            num: Poly::constant(c),
            den: BTreeMap::new(),
        }
    }

    pub fn atom(a: Atom) -> Self {
        NormalForm::from_poly(Poly::atom(a))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        NormalForm {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator_factors(&self) -> impl Iterator<Item = (&Polynomial, u32)> {
        self.den.iter().map(|(f, m)| (f, *m))
    }

    pub fn denominator(&self) -> Polynomial {
        expand_factors(self.denominator_factors())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        NormalForm {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return NormalForm::zero();
        }
        NormalForm {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let mut out = NormalForm {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            };
            out.cancel();
            return out;
        }
        let (ad, bd) = common_base(&self.den, &other.den);
        let mut lcm = ad.clone();
        for (f, m) in &bd {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let lift = |num: &Polynomial, den: &BTreeMap<Polynomial, u32>| {
            let extra = lcm
                .iter()
                .map(|(f, m)| (f, m - den.get(f).copied().unwrap_or(0)));
            num.mul(&expand_factors(extra))
        };
        let num = lift(&self.num, &ad).add(&lift(&other.num, &bd));
        let mut out = NormalForm { num, den: lcm };
        out.cancel();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return NormalForm::zero();
        }
        let (mut an, mut bd) = (self.num.clone(), other.den.clone());
        cancel_pair(&mut an, &mut bd);
        let (mut bn, mut ad) = (other.num.clone(), self.den.clone());
        cancel_pair(&mut bn, &mut ad);
        let mut den = ad;
        for (f, m) in bd {
            insert_factor(&mut den, f, m);
        }
        let mut out = NormalForm {
            num: an.mul(&bn),
            den,
        };
        out.cancel();
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (content, factors) = factorize(&self.num);
        let mut den = BTreeMap::new();
        for (f, m) in factors {
            insert_factor(&mut den, f, m);
        }
        let mut out = NormalForm {
            num: self.denominator().scale(&content.recip()),
            den,
        };
        out.cancel();
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let k = k as u32;
        if k == 0 {
            return Ok(NormalForm::one());
        }
        Ok(NormalForm {
            num: self.num.pow(k),
            den: self.den.iter().map(|(f, m)| (f.clone(), m * k)).collect(),
        })
    }

    fn cancel(&mut self) {
        cancel_pair(&mut self.num, &mut self.den);
    }

    /// Canonical expression: expanded numerator over the product of factors.
    pub fn to_expr(&self) -> Expr {
        let num = poly_to_expr(&self.num);
        if self.den.is_empty() {
            return num;
        }
        let den = Expr::mul(
            self.den
                .iter()
                .map(|(f, m)| poly_to_expr(f).pow(*m as i32)),
        );
        num.div(&den)
    }

    /// Total degree of the numerator in the atoms selected by `pred`, or
    /// `None` when those atoms also occur in the denominator or inside a
    /// function argument (the form is then not polynomial in them).
    pub fn degree_in(&self, pred: &dyn Fn(&Atom) -> bool) -> Option<u32> {
        let nested = |a: &Atom| match a {
            Atom::Func(f) => f.arg.mentions(pred),
            _ => false,
        };
        if self.den.keys().any(|f| f.atoms().iter().any(|a| a.mentions(pred))) {
            return None;
        }
        if self.num.atoms().iter().any(nested) {
            return None;
        }
        Some(self.num.degree_in(pred))
    }

    /// Groups the numerator by its monomial in the atoms selected by `pred`.
    /// Each value carries the full denominator.
    pub fn collect_by(&self, pred: &dyn Fn(&Atom) -> bool) -> BTreeMap<Monomial, NormalForm> {
        self.num
            .collect_by(pred)
            .into_iter()
            .map(|(m, p)| {
                let mut nf = NormalForm {
                    num: p,
                    den: self.den.clone(),
                };
                nf.cancel();
                (m, nf)
            })
            .collect()
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = self.num.atoms();
        for f in self.den.keys() {
            out.extend(f.atoms());
        }
        out
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl Serialize for NormalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct Normalizer {
    memo: HashMap<*const Node, NormalForm>,
}

impl Normalizer {
    fn run(&mut self, e: &Expr) -> Result<NormalForm> {
        if let Some(nf) = self.memo.get(&e.key()) {
            return Ok(nf.clone());
        }
        let nf = match e.node() {
            Node::Num(r) => NormalForm::constant(r.clone()),
            Node::Atom(a) => NormalForm::atom(a.clone()),
            Node::Add(v) => {
                let mut acc = NormalForm::zero();
                for t in v {
                    acc = acc.add(&self.run(t)?);
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = NormalForm::one();
                for t in v {
                    acc = acc.mul(&self.run(t)?);
                    if acc.is_zero() {
                        // remaining factors may still hide a zero division
                        for rest in v {
                            self.run(rest)?;
                        }
                        break;
                    }
                }
                acc
            }
            Node::Pow(b, k) if *k >= 0 => self.run(b)?.pow(*k)?,
            Node::Pow(b, k) => self.reciprocal(b, k.unsigned_abs())?,
            Node::Div(a, b) => {
                let n = self.run(a)?;
                let d = self.reciprocal(b, 1)?;
                n.mul(&d)
            }
        };
        self.memo.insert(e.key(), nf.clone());
        Ok(nf)
    }

    /// `1 / e^k`, inverting `e` factor by factor so that products and
    /// powers in the denominator keep their factorization.
    fn reciprocal(&mut self, e: &Expr, k: u32) -> Result<NormalForm> {
        let mut leaves = Vec::new();
        collect_leaves(e, 1, &mut leaves);
        let mut acc = NormalForm::one();
        for (leaf, j) in leaves {
            let nf = self.run(&leaf)?;
            let exp = -(j as i64) * k as i64;
            let exp = i32::try_from(exp).map_err(|_| Error::InvalidArgument("exponent overflow".into()))?;
            acc = acc.mul(&nf.pow(exp)?);
        }
        Ok(acc)
    }
}

fn collect_leaves(e: &Expr, k: i32, out: &mut Vec<(Expr, i32)>) {
    match e.node() {
        Node::Mul(v) => v.iter().for_each(|c| collect_leaves(c, k, out)),
        Node::Pow(b, j) => collect_leaves(b, k * j, out),
        Node::Div(a, b) => {
            collect_leaves(a, k, out);
            collect_leaves(b, -k, out);
        }
        _ => out.push((e.clone(), k)),
    }
}

/// Canonical normal form of `e`.
pub fn normalize(e: &Expr) -> Result<NormalForm> {
    Normalizer {
        memo: HashMap::new(),
    }
    .run(e)
}

pub fn is_zero(e: &Expr) -> Result<bool> {
    Ok(normalize(e)?.is_zero())
}

/// Exact symbolic equality.
pub fn equivalent(a: &Expr, b: &Expr) -> Result<bool> {
    Ok(normalize(a)?.sub(&normalize(b)?).is_zero())
}
