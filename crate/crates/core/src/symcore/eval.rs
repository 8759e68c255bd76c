//! Point evaluation, exact or in any [`Scalar`].

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};
use crate::symcore::atom::{Atom, Deriv};
use crate::symcore::diff::partial;
use crate::symcore::expr::{Expr, Node};
use crate::Rational;

/// Values for the atoms of an expression.
pub type Point<S = Rational> = BTreeMap<Atom, S>;

/// Closed form for an uninterpreted function, written in the dependent
/// variable `u`. `F^(j)` is obtained by differentiating the body `j` times.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    body: Expr,
}

impl ClosedForm {
    pub fn new(body: Expr) -> ClosedForm {
        ClosedForm { body }
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn derivative(&self, order: u32) -> Expr {
        let slot = Atom::Dep(Deriv::NONE);
        (0..order).fold(self.body.clone(), |e, _| partial(&e, &slot))
    }
}

pub type FuncTable = BTreeMap<String, ClosedForm>;

struct Evaluator<'a, S: Scalar> {
    point: &'a Point<S>,
    funcs: &'a FuncTable,
    memo: HashMap<*const Node, S>,
    derivs: HashMap<(String, u32), Expr>,
}

impl<S: Scalar> Evaluator<'_, S> {
    fn atom(&mut self, a: &Atom) -> Result<S> {
        if let Some(v) = self.point.get(a) {
            return Ok(v.clone());
        }
        match a {
            Atom::Func(fd) => {
                let cf = self
                    .funcs
                    .get(&*fd.name)
                    .ok_or_else(|| Error::UnboundFunction(fd.name.to_string()))?;
                let arg = self.run(&fd.arg)?;
                let body = self
                    .derivs
                    .entry((fd.name.to_string(), fd.order))
                    .or_insert_with(|| cf.derivative(fd.order))
                    .clone();
                let mut inner = Point::new();
                inner.insert(Atom::Dep(Deriv::NONE), arg);
                eval_with(&body, &inner, self.funcs)
            }
            _ => Err(Error::UnboundAtom(a.to_string())),
        }
    }

    fn run(&mut self, e: &Expr) -> Result<S> {
        if let Some(v) = self.memo.get(&e.key()) {
            return Ok(v.clone());
        }
        let v = match e.node() {
            Node::Num(r) => S::from_rational(r),
            Node::Atom(a) => self.atom(a)?,
            Node::Add(v) => {
                let mut acc = S::zero();
                for t in v {
                    acc = acc + self.run(t)?;
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = S::one();
                for t in v {
                    acc = acc * self.run(t)?;
                }
                acc
            }
            Node::Pow(b, k) => {
                let base = self.run(b)?;
                if *k < 0 {
                    if base.is_zero() {
                        return Err(Error::Pole);
                    }
                    S::one() / powi(&base, k.unsigned_abs())
                } else {
                    powi(&base, *k as u32)
                }
            }
            Node::Div(a, b) => {
                let n = self.run(a)?;
                let d = self.run(b)?;
                if d.is_zero() {
                    return Err(Error::Pole);
                }
                n / d
            }
        };
        self.memo.insert(e.key(), v.clone());
        Ok(v)
    }
}

/// Evaluates `e` at `point` in the scalar type `S`.
pub fn eval_with<S: Scalar>(e: &Expr, point: &Point<S>, funcs: &FuncTable) -> Result<S> {
    Evaluator {
        point,
        funcs,
        memo: HashMap::new(),
        derivs: HashMap::new(),
    }
    .run(e)
}

/// Exact rational evaluation.
pub fn eval_exact(e: &Expr, point: &Point, funcs: &FuncTable) -> Result<Rational> {
    eval_with(e, point, funcs)
}
