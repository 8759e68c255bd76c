//! Structural differentiation.

use std::collections::HashMap;

use crate::symcore::atom::{Atom, FuncDeriv, IndepVar};
use crate::symcore::expr::{Expr, Node};

struct Differentiator<'a> {
    atom_rule: &'a dyn Fn(&Atom) -> Expr,
    memo: HashMap<*const Node, Expr>,
}

impl Differentiator<'_> {
    fn run(&mut self, e: &Expr) -> Expr {
        if let Some(d) = self.memo.get(&e.key()) {
            return d.clone();
        }
        let d = match e.node() {
            Node::Num(_) => Expr::zero(),
            Node::Atom(Atom::Func(fd)) => {
                let inner = self.run(&fd.arg);
                if inner.is_zero_literal() {
                    Expr::zero()
                } else {
                    let next = Atom::Func(FuncDeriv {
                        name: fd.name.clone(),
                        order: fd.order + 1,
                        arg: fd.arg.clone(),
                    });
                    Expr::mul([Expr::atom(next), inner])
                }
            }
            Node::Atom(a) => (self.atom_rule)(a),
            Node::Add(v) => Expr::add(v.iter().map(|t| self.run(t)).collect::<Vec<_>>()),
            Node::Mul(v) => {
                let mut terms = Vec::with_capacity(v.len());
                for (i, f) in v.iter().enumerate() {
                    let df = self.run(f);
                    if df.is_zero_literal() {
                        continue;
                    }
                    let mut factors: Vec<Expr> = v
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, g)| g.clone())
                        .collect();
                    factors.push(df);
                    terms.push(Expr::mul(factors));
                }
                Expr::add(terms)
            }
            Node::Pow(b, k) => {
                let db = self.run(b);
                Expr::mul([Expr::int(*k as i64), b.pow(k - 1), db])
            }
            Node::Div(a, b) => {
                let da = self.run(a);
                let db = self.run(b);
                let first = da.div(b);
                let second = Expr::mul([a.clone(), db]).div(&b.pow(2));
                first - second
            }
        };
        self.memo.insert(e.key(), d.clone());
        d
    }
}

fn derive(e: &Expr, atom_rule: &dyn Fn(&Atom) -> Expr) -> Expr {
    Differentiator {
        atom_rule,
        memo: HashMap::new(),
    }
    .run(e)
}

/// `n`-th total derivative with respect to an independent variable.
/// Dependent-variable and coefficient atoms are functions of `(x, t)`;
/// parameters are constants.
pub fn diff_total(e: &Expr, v: IndepVar, n: u32) -> Expr {
    let rule = |a: &Atom| match a {
        Atom::Var(name) if &**name == v.name() => Expr::one(),
        Atom::Dep(d) => Expr::atom(Atom::Dep(d.bumped(v, 1))),
        Atom::Coeff(c) => {
            let mut c = *c;
            c.deriv = c.deriv.bumped(v, 1);
            Expr::atom(Atom::Coeff(c))
        }
        _ => Expr::zero(),
    };
    let mut out = e.clone();
    for _ in 0..n {
        out = derive(&out, &rule);
    }
    out
}

/// Partial derivative with respect to `slot`, every other atom held fixed
/// except through function arguments.
pub fn partial(e: &Expr, slot: &Atom) -> Expr {
    let rule = |a: &Atom| {
        if a == slot {
            Expr::one()
        } else {
            Expr::zero()
        }
    };
    derive(e, &rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::atom::Deriv;
    use crate::symcore::normal::{equivalent, normalize};
    use crate::symcore::parse::parse;
    use crate::{Polynomial, Rational};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn product_and_chain_rule() {
        let e = p("F(u0)*u0_x");
        let d = diff_total(&e, IndepVar::X, 1);
        assert!(equivalent(&d, &p("F'(u0)*u0_x^2 + F(u0)*u0_xx")).unwrap());
    }

    #[test]
    fn parameters_are_constant() {
        assert!(diff_total(&p("eps"), IndepVar::X, 1).is_zero_literal());
    }

    #[test]
    fn coefficient_atoms_gain_suffixes() {
        let d = diff_total(&p("u1"), IndepVar::T, 1);
        assert_eq!(d, Expr::atom(Atom::coeff(crate::symcore::Family::Plain, 1, Deriv::new(0, 1))));
    }

    /// d/dx of a rational function N/D done directly on polynomials.
    fn poly_dx(f: &Polynomial) -> Polynomial {
        let x = Atom::var("x");
        let mut out = Polynomial::zero();
        for (m, c) in f.terms() {
            let e = m.exponent(&x);
            if e == 0 {
                continue;
            }
            let rest: Vec<(Atom, u32)> = m
                .factors()
                .iter()
                .map(|(a, k)| if *a == x { (a.clone(), k - 1) } else { (a.clone(), *k) })
                .filter(|(_, k)| *k > 0)
                .collect();
            out.add_term(
                crate::symcore::poly::Monomial::from_pairs(rest),
                c.clone() * Rational::from_integer(e.into()),
            );
        }
        out
    }

    #[test]
    fn fourth_derivative_of_traveling_wave() {
        let e = p("1/(a*(a*t - x))");
        let d4 = diff_total(&e, IndepVar::X, 4);
        assert!(equivalent(&d4, &p("24/(a*(a*t - x)^5)")).unwrap());

        // brute force: quotient rule on expanded numerator and denominator
        let mut num = Polynomial::one();
        let mut den = normalize(&p("a*(a*t - x)")).unwrap().numerator().clone();
        for _ in 0..4 {
            let n2 = poly_dx(&num).mul(&den).sub(&num.mul(&poly_dx(&den)));
            den = den.mul(&den);
            num = n2;
        }
        let lhs = normalize(&d4).unwrap();
        let rhs = crate::symcore::NormalForm::from_poly(num)
            .div(&crate::symcore::NormalForm::from_poly(den))
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_with_respect_to_slot() {
        let e = p("F(u)*u_x^2 + u*u_xx");
        let ux = Atom::Dep(Deriv::new(1, 0));
        assert!(equivalent(&partial(&e, &ux), &p("2*F(u)*u_x")).unwrap());
        let u = Atom::Dep(Deriv::NONE);
        assert!(equivalent(&partial(&e, &u), &p("F'(u)*u_x^2 + u_xx")).unwrap());
    }
}
