//! LaTeX-style pretty printer.

use num_traits::{One, Signed};

use crate::symcore::atom::{Atom, Family};
use crate::symcore::expr::{Expr, Node};
use crate::Rational;

fn atom(a: &Atom) -> String {
    match a {
        Atom::Var(n) => n.to_string(),
        Atom::Param(n) => match &**n {
            "eps" => "\\varepsilon".into(),
            "theta" => "\\theta".into(),
            other => other.to_string(),
        },
        Atom::Dep(d) => {
            if d.order() == 0 {
                "u".into()
            } else {
                format!("u_{{{}}}", d.suffix())
            }
        }
        Atom::Coeff(c) => {
            let base = match c.family {
                Family::Plain => "u",
                Family::Hat => "\\hat{u}",
                Family::Tilde => "\\tilde{u}",
            };
            if c.deriv.order() == 0 {
                format!("{base}_{{{}}}", c.order)
            } else {
                format!("{base}_{{{},{}}}", c.order, c.deriv.suffix())
            }
        }
        Atom::Func(f) => format!(
            "{}{}\\left({}\\right)",
            f.name,
            "'".repeat(f.order as usize),
            to_latex(&f.arg)
        ),
    }
}

fn number(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(_) => 1,
        Node::Num(r) if r.is_negative() => 1,
        Node::Mul(_) => 2,
        Node::Div(..) => 3,
        _ => 4,
    }
}

fn wrapped(e: &Expr, min: u8) -> String {
    if prec(e) < min {
        format!("\\left({}\\right)", to_latex(e))
    } else {
        to_latex(e)
    }
}

pub fn to_latex(e: &Expr) -> String {
    match e.node() {
        Node::Num(r) => number(r),
        Node::Atom(a) => atom(a),
        Node::Add(v) => {
            let mut s = String::new();
            for (i, t) in v.iter().enumerate() {
                let body = to_latex(t);
                if i == 0 {
                    s.push_str(&body);
                } else if let Some(rest) = body.strip_prefix('-') {
                    s.push_str(" - ");
                    s.push_str(rest);
                } else {
                    s.push_str(" + ");
                    s.push_str(&body);
                }
            }
            s
        }
        Node::Mul(v) => {
            let mut parts = Vec::new();
            let mut sign = "";
            for (i, f) in v.iter().enumerate() {
                match f.as_num() {
                    Some(r) if i == 0 && (-r.clone()).is_one() => sign = "-",
                    Some(r) if i == 0 && r.is_negative() => {
                        sign = "-";
                        parts.push(number(&-r.clone()));
                    }
                    _ => parts.push(wrapped(f, 3)),
                }
            }
            format!("{sign}{}", parts.join(" "))
        }
        Node::Pow(b, k) if *k < 0 => format!("\\frac{{1}}{{{}^{{{}}}}}", wrapped(b, 4), -k),
        Node::Pow(b, k) => format!("{}^{{{}}}", wrapped(b, 4), k),
        Node::Div(a, b) => format!("\\frac{{{}}}{{{}}}", to_latex(a), to_latex(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse;

    #[test]
    fn renders_common_shapes() {
        assert_eq!(to_latex(&parse("utilde1_xxxx").unwrap()), "\\tilde{u}_{1,xxxx}");
        assert_eq!(to_latex(&parse("F'(u0)").unwrap()), "F'\\left(u_{0}\\right)");
        assert_eq!(to_latex(&parse("1/(a*t - x)^2").unwrap()), "\\frac{1}{\\left(a t - x\\right)^{2}}");
        assert_eq!(to_latex(&parse("-eps*u1").unwrap()), "-\\varepsilon u_{1}");
    }
}
