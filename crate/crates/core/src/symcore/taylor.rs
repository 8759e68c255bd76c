//! Truncated power-series coefficients in one parameter.

use std::collections::HashMap;
use std::rc::Rc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::symcore::atom::Atom;
use crate::symcore::expr::{Expr, Node};
use crate::symcore::normal::{normalize, NormalForm};
use crate::Rational;

type Series = Rc<Vec<NormalForm>>;

struct Expander<'a> {
    param: &'a Atom,
    n: usize,
    memo: HashMap<*const Node, Series>,
}

impl Expander<'_> {
    fn constant(&self, c: NormalForm) -> Vec<NormalForm> {
        let mut s = vec![NormalForm::zero(); self.n + 1];
        s[0] = c;
        s
    }

    fn add(&self, a: &[NormalForm], b: &[NormalForm]) -> Vec<NormalForm> {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    fn mul(&self, a: &[NormalForm], b: &[NormalForm]) -> Vec<NormalForm> {
        let mut out = vec![NormalForm::zero(); self.n + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(self.n + 1 - i) {
                if !y.is_zero() {
                    out[i + j] = out[i + j].add(&x.mul(y));
                }
            }
        }
        out
    }

    fn pow(&self, a: &[NormalForm], mut k: u32) -> Vec<NormalForm> {
        let mut acc = self.constant(NormalForm::one());
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn inverse(&self, a: &[NormalForm]) -> Result<Vec<NormalForm>> {
        if a[0].is_zero() {
            return Err(Error::InvalidArgument(format!(
                "expression has a pole at {} = 0",
                self.param
            )));
        }
        let inv0 = a[0].inverse()?;
        let mut out = vec![inv0.clone()];
        for m in 1..=self.n {
            let mut acc = NormalForm::zero();
            for k in 1..=m {
                if !a[k].is_zero() && !out[m - k].is_zero() {
                    acc = acc.add(&a[k].mul(&out[m - k]));
                }
            }
            out.push(acc.mul(&inv0).neg());
        }
        Ok(out)
    }

    fn run(&mut self, e: &Expr) -> Result<Series> {
        if let Some(s) = self.memo.get(&e.key()) {
            return Ok(s.clone());
        }
        let s: Vec<NormalForm> = match e.node() {
            Node::Num(r) => self.constant(NormalForm::constant(r.clone())),
            Node::Atom(a) if a == self.param => {
                let mut s = self.constant(NormalForm::zero());
                if self.n >= 1 {
                    s[1] = NormalForm::one();
                }
                s
            }
            Node::Atom(Atom::Func(fd)) if fd.arg.mentions(&|a| a == self.param) => {
                let g = self.run(&fd.arg)?;
                let g0 = g[0].to_expr();
                let mut h = g.to_vec();
                h[0] = NormalForm::zero();
                // F^(j)(g0 + h) = sum_m F^(j+m)(g0) h^m / m!
                let mut out = self.constant(NormalForm::zero());
                let mut hm = self.constant(NormalForm::one());
                let mut fact = Rational::one();
                for m in 0..=self.n {
                    if m > 0 {
                        hm = self.mul(&hm, &h);
                        fact *= Rational::from_integer(m.into());
                    }
                    let atom = NormalForm::atom(Atom::func(&fd.name, fd.order + m as u32, &g0)?);
                    let c = atom.scale(&fact.recip());
                    for (i, t) in hm.iter().enumerate() {
                        if !t.is_zero() {
                            out[i] = out[i].add(&t.mul(&c));
                        }
                    }
                }
                out
            }
            Node::Atom(_) => self.constant(normalize(e)?),
            Node::Add(v) => {
                let mut acc = self.constant(NormalForm::zero());
                for t in v {
                    let s = self.run(t)?;
                    acc = self.add(&acc, &s);
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = self.constant(NormalForm::one());
                for t in v {
                    let s = self.run(t)?;
                    acc = self.mul(&acc, &s);
                }
                acc
            }
            Node::Pow(b, k) => {
                let base = self.run(b)?;
                let p = self.pow(&base, k.unsigned_abs());
                if *k < 0 {
                    self.inverse(&p)?
                } else {
                    p
                }
            }
            Node::Div(a, b) => {
                let num = self.run(a)?;
                let den = self.run(b)?;
                let inv = self.inverse(&den)?;
                self.mul(&num, &inv)
            }
        };
        let s = Rc::new(s);
        self.memo.insert(e.key(), s.clone());
        Ok(s)
    }
}

/// Normal forms of the coefficients of `param^0 .. param^n` in the Taylor
/// expansion of `e` about `param = 0`.
pub fn taylor_coeffs(e: &Expr, param: &Atom, n: usize) -> Result<Vec<NormalForm>> {
    let mut ex = Expander {
        param,
        n,
        memo: HashMap::new(),
    };
    let s = ex.run(e)?;
    Ok(s.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse;

    fn nf(s: &str) -> NormalForm {
        normalize(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_coefficients() {
        let c = taylor_coeffs(&parse("(1 + q*x)^3").unwrap(), &Atom::q(), 4).unwrap();
        assert_eq!(c, vec![nf("1"), nf("3*x"), nf("3*x^2"), nf("x^3"), nf("0")]);
    }

    #[test]
    fn geometric_series() {
        let c = taylor_coeffs(&parse("1/(1 - q*x)").unwrap(), &Atom::q(), 3).unwrap();
        assert_eq!(c, vec![nf("1"), nf("x"), nf("x^2"), nf("x^3")]);
    }

    #[test]
    fn function_composition() {
        let e = parse("F(u0 + q*u1 + q^2*u2)").unwrap();
        let c = taylor_coeffs(&e, &Atom::q(), 2).unwrap();
        assert_eq!(c[0], nf("F(u0)"));
        assert_eq!(c[1], nf("F'(u0)*u1"));
        assert_eq!(c[2], nf("F'(u0)*u2 + F''(u0)*u1^2/2"));
    }

    #[test]
    fn pole_at_origin_is_reported() {
        assert!(taylor_coeffs(&parse("1/q").unwrap(), &Atom::q(), 2).is_err());
    }
}
