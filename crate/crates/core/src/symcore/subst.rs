//! Simultaneous substitution.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::symcore::atom::{Atom, Deriv, Family, IndepVar};
use crate::symcore::diff::diff_total;
use crate::symcore::expr::{Expr, Node};

/// Replacement table for [`substitute`].
///
/// Coefficient and dependent-variable bindings are patterns: binding `u_l`
/// to `r` also replaces every derivative of `u_l` by the matching derivative
/// of `r`. Exact atom bindings take precedence over patterns.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    coeffs: BTreeMap<(Family, u32), Expr>,
    dep: Option<Expr>,
    atoms: BTreeMap<Atom, Expr>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty() && self.dep.is_none() && self.atoms.is_empty()
    }

    /// Binds `u_order` of `family` (all derivatives).
    pub fn coeff(mut self, family: Family, order: u32, to: Expr) -> Result<Bindings> {
        if to.mentions(&|a| a.is_coeff_of(family, order)) {
            return Err(Error::SubstitutionCycle(format!("{}{}", family.prefix(), order)));
        }
        self.coeffs.insert((family, order), to);
        Ok(self)
    }

    /// Binds the dependent variable (all derivatives).
    pub fn dep(mut self, to: Expr) -> Result<Bindings> {
        if to.mentions(&|a| matches!(a, Atom::Dep(_))) {
            return Err(Error::SubstitutionCycle("u".into()));
        }
        self.dep = Some(to);
        Ok(self)
    }

    pub fn param(self, name: &str, to: Expr) -> Bindings {
        self.atom(Atom::param(name), to)
    }

    pub fn var(self, name: &str, to: Expr) -> Bindings {
        self.atom(Atom::var(name), to)
    }

    pub fn atom(mut self, a: Atom, to: Expr) -> Bindings {
        self.atoms.insert(a, to);
        self
    }
}

fn differentiate(e: &Expr, d: Deriv) -> Expr {
    let mut out = e.clone();
    for v in IndepVar::all() {
        if d.get(v) > 0 {
            out = diff_total(&out, v, d.get(v));
        }
    }
    out
}

struct Substituter<'a> {
    b: &'a Bindings,
    memo: HashMap<*const Node, Expr>,
    derived: HashMap<Atom, Expr>,
}

impl Substituter<'_> {
    fn atom(&mut self, a: &Atom) -> Result<Option<Expr>> {
        if let Some(r) = self.b.atoms.get(a) {
            return Ok(Some(r.clone()));
        }
        if let Some(r) = self.derived.get(a) {
            return Ok(Some(r.clone()));
        }
        let out = match a {
            Atom::Coeff(c) => self
                .b
                .coeffs
                .get(&(c.family, c.order))
                .map(|r| differentiate(r, c.deriv)),
            Atom::Dep(d) => self.b.dep.as_ref().map(|r| differentiate(r, *d)),
            Atom::Func(fd) => {
                let arg = self.run(&fd.arg)?;
                if arg == fd.arg {
                    None
                } else {
                    Some(Expr::atom(Atom::func(&fd.name, fd.order, &arg)?))
                }
            }
            _ => None,
        };
        if let Some(r) = &out {
            self.derived.insert(a.clone(), r.clone());
        }
        Ok(out)
    }

    fn run(&mut self, e: &Expr) -> Result<Expr> {
        if let Some(r) = self.memo.get(&e.key()) {
            return Ok(r.clone());
        }
        let r = match e.node() {
            Node::Num(_) => e.clone(),
            Node::Atom(a) => self.atom(a)?.unwrap_or_else(|| e.clone()),
            Node::Add(v) => {
                let items = v.iter().map(|t| self.run(t)).collect::<Result<Vec<_>>>()?;
                rebuild(e, v, items, Expr::add)
            }
            Node::Mul(v) => {
                let items = v.iter().map(|t| self.run(t)).collect::<Result<Vec<_>>>()?;
                rebuild(e, v, items, Expr::mul)
            }
            Node::Pow(b, k) => {
                let nb = self.run(b)?;
                if nb.key() == b.key() {
                    e.clone()
                } else {
                    nb.pow(*k)
                }
            }
            Node::Div(a, b) => {
                let na = self.run(a)?;
                let nb = self.run(b)?;
                if na.key() == a.key() && nb.key() == b.key() {
                    e.clone()
                } else {
                    na.div(&nb)
                }
            }
        };
        self.memo.insert(e.key(), r.clone());
        Ok(r)
    }
}

fn rebuild(e: &Expr, old: &[Expr], new: Vec<Expr>, f: fn(Vec<Expr>) -> Expr) -> Expr {
    if old.iter().zip(&new).all(|(a, b)| a.key() == b.key()) {
        e.clone()
    } else {
        f(new)
    }
}

/// Applies all bindings simultaneously. Replacements are not themselves
/// substituted into.
pub fn substitute(e: &Expr, b: &Bindings) -> Result<Expr> {
    if b.is_empty() {
        return Ok(e.clone());
    }
    Substituter {
        b,
        memo: HashMap::new(),
        derived: HashMap::new(),
    }
    .run(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::normal::equivalent;
    use crate::symcore::parse::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn pattern_binding_follows_derivatives() {
        let b = Bindings::new()
            .coeff(Family::Plain, 1, p("eps*(1 - theta)*utilde1"))
            .unwrap();
        let out = substitute(&p("u1_xxxx"), &b).unwrap();
        assert!(equivalent(&out, &p("eps*(1 - theta)*utilde1_xxxx")).unwrap());
    }

    #[test]
    fn empty_bindings_are_identity() {
        let e = p("F(u0)*u1_x + theta");
        assert_eq!(substitute(&e, &Bindings::new()).unwrap().key(), e.key());
    }

    #[test]
    fn cycles_are_rejected() {
        let err = Bindings::new().coeff(Family::Plain, 2, p("u2_x + u1")).unwrap_err();
        assert!(matches!(err, Error::SubstitutionCycle(_)));
    }

    #[test]
    fn simultaneous_not_sequential() {
        let b = Bindings::new()
            .coeff(Family::Plain, 1, p("u2"))
            .unwrap()
            .coeff(Family::Plain, 2, p("u1"))
            .unwrap();
        let out = substitute(&p("u1 - 2*u2"), &b).unwrap();
        assert!(equivalent(&out, &p("u2 - 2*u1")).unwrap());
    }

    #[test]
    fn function_arguments_are_substituted_and_renormalized() {
        let b = Bindings::new().dep(p("x*t + x")).unwrap();
        let out = substitute(&p("F(u)*u_x"), &b).unwrap();
        assert!(equivalent(&out, &p("F(x + t*x)*(t + 1)")).unwrap());
    }

    #[test]
    fn theta_zero_collapses_theorem_map_entry() {
        let b = Bindings::new().param("theta", Expr::zero());
        let out = substitute(&p("eps*(1-theta)*(eps*(1-theta)*utilde2 + theta*utilde1)"), &b).unwrap();
        assert!(equivalent(&out, &p("eps^2*utilde2")).unwrap());
    }
}
