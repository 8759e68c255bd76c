//! Immutable expression trees.

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::symcore::atom::{Atom, Deriv, Family};
use crate::{Integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Atom(Atom),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i32),
    Div(Expr, Expr),
}

/// Shared, immutable expression. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Pointer identity, used as a memoization key by tree walkers.
    pub(crate) fn key(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    fn from_node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn num(r: Rational) -> Expr {
        Expr::from_node(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from_integer(Integer::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::num(Rational::new(Integer::from(n), Integer::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_node(Node::Atom(a))
    }

    pub fn var(name: &str) -> Expr {
        Expr::atom(Atom::var(name))
    }

    pub fn param(name: &str) -> Expr {
        Expr::atom(Atom::param(name))
    }

    pub fn eps() -> Expr {
        Expr::atom(Atom::eps())
    }

    pub fn theta() -> Expr {
        Expr::atom(Atom::theta())
    }

    pub fn q() -> Expr {
        Expr::atom(Atom::q())
    }

    /// The dependent variable `u` before expansion.
    pub fn dep() -> Expr {
        Expr::atom(Atom::Dep(Deriv::NONE))
    }

    pub fn coeff(family: Family, order: u32) -> Expr {
        Expr::atom(Atom::coeff(family, order, Deriv::NONE))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_one())
    }

    pub fn add<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rational::zero();
        let mut out = Vec::new();
        for t in terms {
            match t.node() {
                Node::Num(r) => constant += r,
                Node::Add(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Num(r) => constant += r,
                            _ => out.push(s.clone()),
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    pub fn mul<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut constant = Rational::one();
        let mut out = Vec::new();
        for f in factors {
            match f.node() {
                Node::Num(r) => constant *= r,
                Node::Mul(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Num(r) => constant *= r,
                            _ => out.push(s.clone()),
                        }
                    }
                }
                _ => out.push(f),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if !constant.is_one() {
            out.insert(0, Expr::num(constant));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(out)),
        }
    }

    pub fn pow(&self, k: i32) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return self.clone();
        }
        match self.node() {
            Node::Num(r) if !(r.is_zero() && k < 0) => {
                let p = num_traits::pow(r.clone(), k.unsigned_abs() as usize);
                Expr::num(if k < 0 { p.recip() } else { p })
            }
            Node::Pow(b, j) => match j.checked_mul(k) {
                Some(jk) => b.pow(jk),
                None => Expr::from_node(Node::Pow(self.clone(), k)),
            },
            _ => Expr::from_node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn div(&self, den: &Expr) -> Expr {
        if den.is_one_literal() {
            return self.clone();
        }
        if let (Node::Num(a), Node::Num(b)) = (self.node(), den.node()) {
            if !b.is_zero() {
                return Expr::num(a / b);
            }
        }
        Expr::from_node(Node::Div(self.clone(), den.clone()))
    }

    /// True if `pred` holds for some atom of the tree, including atoms nested
    /// inside function arguments.
    pub fn mentions(&self, pred: &dyn Fn(&Atom) -> bool) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Atom(a) => a.mentions(pred),
            Node::Add(v) | Node::Mul(v) => v.iter().any(|e| e.mentions(pred)),
            Node::Pow(b, _) => b.mentions(pred),
            Node::Div(a, b) => a.mentions(pred) || b.mentions(pred),
        }
    }

    /// Atoms occurring in the tree. Atoms nested in function arguments are
    /// included when `nested` is set.
    pub fn atoms(&self, nested: bool) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(nested, &mut out);
        out
    }

    fn collect_atoms(&self, nested: bool, out: &mut BTreeSet<Atom>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Atom(a) => {
                if nested {
                    if let Atom::Func(f) = a {
                        f.arg.collect_atoms(nested, out);
                    }
                }
                out.insert(a.clone());
            }
            Node::Add(v) | Node::Mul(v) => v.iter().for_each(|e| e.collect_atoms(nested, out)),
            Node::Pow(b, _) => b.collect_atoms(nested, out),
            Node::Div(a, b) => {
                a.collect_atoms(nested, out);
                b.collect_atoms(nested, out);
            }
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Atom(_) => 1,
            Node::Add(v) | Node::Mul(v) => 1 + v.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, _) => 1 + b.size(),
            Node::Div(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Expr {
        Expr::atom(a)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::num(r)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (&self, rhs);
                $body
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::add([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::mul([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::div(a, b));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self.clone()])
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul(iter)
    }
}

// Printing. The output is accepted by the parser.

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_POW: u8 = 3;
const P_ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(r) if r.is_negative() => P_ADD,
        Node::Num(r) if !r.is_integer() => P_MUL,
        Node::Num(_) | Node::Atom(_) => P_ATOM,
        Node::Add(_) => P_ADD,
        Node::Mul(v) => match v[0].as_num() {
            Some(r) if r.is_negative() => P_ADD,
            _ => P_MUL,
        },
        Node::Div(..) => P_MUL,
        Node::Pow(_, k) if *k < 0 => P_MUL,
        Node::Pow(..) => P_POW,
    }
}

fn write_prec(e: &Expr, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}

/// Splits a term into its sign and magnitude for printing inside sums.
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e.node() {
        Node::Num(r) if r.is_negative() => (true, Expr::num(-r)),
        Node::Mul(v) => match v[0].as_num() {
            Some(r) if r.is_negative() => {
                let mut rest = vec![Expr::num(-r)];
                rest.extend(v[1..].iter().cloned());
                (true, Expr::mul(rest))
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Num(r) => write!(f, "{r}"),
        Node::Atom(a) => write!(f, "{a}"),
        Node::Add(terms) => {
            for (i, t) in terms.iter().enumerate() {
                let (neg, mag) = split_sign(t);
                match (i, neg) {
                    (0, true) => write!(f, "-")?,
                    (0, false) => {}
                    (_, true) => write!(f, " - ")?,
                    (_, false) => write!(f, " + ")?,
                }
                write_prec(&mag, f, P_MUL)?;
            }
            Ok(())
        }
        Node::Mul(factors) => {
            let mut rest: &[Expr] = factors;
            if let Some(r) = factors[0].as_num() {
                if *r == -Rational::one() {
                    write!(f, "-")?;
                    rest = &factors[1..];
                } else if r.is_negative() {
                    write!(f, "-")?;
                    write!(f, "{}*", -r)?;
                    rest = &factors[1..];
                } else {
                    write!(f, "{r}*")?;
                    rest = &factors[1..];
                }
            }
            for (i, x) in rest.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                let need = match x.node() {
                    Node::Div(..) => P_POW,
                    Node::Num(r) if !r.is_integer() => P_POW,
                    _ => P_MUL,
                };
                write_prec(x, f, need)?;
            }
            Ok(())
        }
        Node::Pow(b, k) if *k < 0 => {
            write!(f, "1/")?;
            write_prec(b, f, P_ATOM)?;
            write!(f, "^{}", k.unsigned_abs())
        }
        Node::Pow(b, k) => {
            write_prec(b, f, P_ATOM)?;
            write!(f, "^{k}")
        }
        Node::Div(a, b) => {
            write_prec(a, f, P_MUL)?;
            write!(f, "/")?;
            write_prec(b, f, P_POW)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}
