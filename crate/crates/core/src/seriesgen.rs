//! Series expansion of the dependent variable and the coupled hierarchies.
//!
//! Every hierarchy is produced by substituting the truncated series into
//! the model and reading off Taylor coefficients. In paper form equation
//! `i` is multiplied by `i!`, so it is the `i`-th derivative at zero rather
//! than the `i`-th coefficient.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symcore::atom::{Atom, Family, EPS, Q, THETA};
use crate::symcore::latex::to_latex;
use crate::symcore::{substitute, taylor_coeffs, Bindings, Expr, NormalForm};
use crate::{Integer, Rational};

/// `E0(u) + eps*E1(u) = 0`.
#[derive(Clone, Debug)]
pub struct PerturbedPde {
    pub name: String,
    pub e0: Expr,
    pub e1: Expr,
}

impl PerturbedPde {
    pub fn new(name: &str, e0: Expr, e1: Expr) -> Result<PerturbedPde> {
        for (label, e) in [("E0", &e0), ("E1", &e1)] {
            let reserved = |a: &Atom| matches!(a, Atom::Param(p) if [EPS, THETA, Q].contains(&&**p));
            if e.mentions(&reserved) {
                return Err(Error::InvalidModel(format!(
                    "{label} must not contain eps, theta or q"
                )));
            }
            if e.mentions(&|a| matches!(a, Atom::Coeff(_))) {
                return Err(Error::InvalidModel(format!(
                    "{label} must be written in u, not in series coefficients"
                )));
            }
            if !e.mentions(&|a| matches!(a, Atom::Dep(_))) {
                return Err(Error::InvalidModel(format!("{label} does not involve u")));
            }
        }
        Ok(PerturbedPde {
            name: name.to_string(),
            e0,
            e1,
        })
    }

    /// `E0 + eps*E1`.
    pub fn full(&self) -> Expr {
        self.e0.clone() + Expr::eps() * self.e1.clone()
    }

    /// `(1 - theta*q)*E0 + q*eps*(1 - theta)*E1`.
    pub fn homotopy(&self) -> Expr {
        let one = Expr::one();
        (one.clone() - Expr::theta() * Expr::q()) * self.e0.clone()
            + Expr::q() * Expr::eps() * (one - Expr::theta()) * self.e1.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HierarchyKind {
    Asm,
    AhsmRaw,
    AhsmRearranged,
}

impl HierarchyKind {
    pub fn name(self) -> &'static str {
        match self {
            HierarchyKind::Asm => "asm",
            HierarchyKind::AhsmRaw => "ahsm-raw",
            HierarchyKind::AhsmRearranged => "ahsm",
        }
    }
}

impl fmt::Display for HierarchyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HierarchyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asm" => Ok(HierarchyKind::Asm),
            "ahsm-raw" => Ok(HierarchyKind::AhsmRaw),
            "ahsm" | "ahsm-rearranged" => Ok(HierarchyKind::AhsmRearranged),
            other => Err(Error::InvalidArgument(format!(
                "unknown hierarchy kind `{other}` (expected asm, ahsm-raw or ahsm)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Hierarchy {
    pub kind: HierarchyKind,
    pub order: usize,
    pub paper_form: bool,
    pub equations: Vec<NormalForm>,
}

impl Hierarchy {
    pub fn expr(&self, i: usize) -> Expr {
        self.equations[i].to_expr()
    }

    /// Same hierarchy in the other normalization.
    pub fn with_paper_form(&self, paper_form: bool) -> Hierarchy {
        if paper_form == self.paper_form {
            return self.clone();
        }
        let equations = self
            .equations
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let f = factorial(i as u32);
                e.scale(&if paper_form { f } else { f.recip() })
            })
            .collect();
        Hierarchy {
            paper_form,
            equations,
            ..self.clone()
        }
    }

    pub fn to_text(&self) -> String {
        self.equations.iter().map(|e| format!("{e} = 0\n")).collect()
    }

    pub fn to_json(&self) -> String {
        let lines: Vec<String> = self.equations.iter().map(|e| e.to_string()).collect();
        serde_json::to_string_pretty(&lines).expect("strings serialize")
    }

    pub fn to_latex(&self) -> String {
        let lines: Vec<String> = self
            .equations
            .iter()
            .map(|e| format!("{} = 0", to_latex(&e.to_expr())))
            .collect();
        format!("\\begin{{aligned}}\n{}\n\\end{{aligned}}\n", lines.join(" \\\\\n"))
    }
}

pub fn factorial(n: u32) -> Rational {
    let mut acc = Integer::one();
    for k in 2..=n {
        acc *= Integer::from(k);
    }
    Rational::from_integer(acc)
}

/// Replaces `u` by `sum_{l=0}^{n} param^l u_l`, derivatives included.
pub fn expand_series(e: &Expr, param: &Atom, n: usize) -> Result<Expr> {
    let series = Expr::add((0..=n as u32).map(|l| {
        Expr::atom(param.clone()).pow(l as i32) * Expr::coeff(Family::Plain, l)
    }));
    substitute(e, &Bindings::new().dep(series)?)
}

fn coefficients(e: &Expr, param: &Atom, n: usize, paper_form: bool) -> Result<Vec<NormalForm>> {
    let expanded = expand_series(e, param, n)?;
    let coeffs = taylor_coeffs(&expanded, param, n)?;
    Ok(coeffs
        .into_iter()
        .enumerate()
        .map(|(i, c)| if paper_form { c.scale(&factorial(i as u32)) } else { c })
        .collect())
}

/// `(d^i e / dq^i)|_{q=0}` for `i = 0..=n` with `u` expanded in `q`.
pub fn qderiv_at0(e: &Expr, n: usize) -> Result<Vec<NormalForm>> {
    coefficients(e, &Atom::q(), n, true)
}

/// Equation `i` is the coefficient of `eps^i` in `(E0 + eps*E1)(sum eps^l u_l)`.
pub fn generate_asm(pde: &PerturbedPde, n: usize, paper_form: bool) -> Result<Hierarchy> {
    Ok(Hierarchy {
        kind: HierarchyKind::Asm,
        order: n,
        paper_form,
        equations: coefficients(&pde.full(), &Atom::eps(), n, paper_form)?,
    })
}

/// Equation `i` is the coefficient of `q^i` in the homotopy model.
pub fn generate_ahsm_raw(pde: &PerturbedPde, n: usize, paper_form: bool) -> Result<Hierarchy> {
    Ok(Hierarchy {
        kind: HierarchyKind::AhsmRaw,
        order: n,
        paper_form,
        equations: coefficients(&pde.homotopy(), &Atom::q(), n, paper_form)?,
    })
}

/// The rearranged hierarchy built directly from its closed form
/// `D^i E0 + eps(1-theta) sum_k theta^(i-1-k) i!/k! D^k E1`, where `D^k`
/// is the `k`-th q-derivative at zero.
pub fn generate_ahsm_rearranged(pde: &PerturbedPde, n: usize, paper_form: bool) -> Result<Hierarchy> {
    let d0 = qderiv_at0(&pde.e0, n)?;
    let d1 = qderiv_at0(&pde.e1, n)?;
    let theta = NormalForm::atom(Atom::theta());
    let coupling = NormalForm::atom(Atom::eps()).mul(&NormalForm::one().sub(&theta));
    let mut equations = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut chain = NormalForm::zero();
        for (k, dk) in d1.iter().enumerate().take(i) {
            let c = factorial(i as u32) / factorial(k as u32);
            let weight = theta.pow((i - 1 - k) as i32)?.scale(&c);
            chain = chain.add(&weight.mul(dk));
        }
        let eq = d0[i].add(&coupling.mul(&chain));
        equations.push(if paper_form {
            eq
        } else {
            eq.scale(&factorial(i as u32).recip())
        });
    }
    Ok(Hierarchy {
        kind: HierarchyKind::AhsmRearranged,
        order: n,
        paper_form,
        equations,
    })
}

/// Per row `i`: the lower raw equations and the multipliers added to raw
/// equation `i` to obtain rearranged equation `i`.
#[derive(Clone, Debug, Serialize)]
pub struct RearrangeCertificate {
    pub rows: Vec<Vec<(usize, Expr)>>,
}

/// Eliminates the lower E0 derivatives from each raw equation by the
/// recurrence `R_i = raw_i + i*theta*R_(i-1)` (paper form), i.e.
/// `R_i = raw_i + sum_{j<i} (i!/j!) theta^(i-j) raw_j`.
pub fn rearrange(h: &Hierarchy) -> Result<(Hierarchy, RearrangeCertificate)> {
    if h.kind != HierarchyKind::AhsmRaw {
        return Err(Error::InvalidArgument(format!(
            "rearrange expects an ahsm-raw hierarchy, got {}",
            h.kind
        )));
    }
    if h.equations.len() != h.order + 1 {
        return Err(Error::InvalidArgument("raw hierarchy is incomplete".into()));
    }
    let mut rows = Vec::with_capacity(h.order + 1);
    let mut equations = Vec::with_capacity(h.order + 1);
    for i in 0..=h.order {
        let mut row = Vec::new();
        let mut eq = h.equations[i].clone();
        for j in 0..i {
            let mut c = Rational::one();
            if h.paper_form {
                c = factorial(i as u32) / factorial(j as u32);
            }
            let m = Expr::num(c) * Expr::theta().pow((i - j) as i32);
            eq = eq.add(&crate::symcore::normalize(&m)?.mul(&h.equations[j]));
            row.push((j, m));
        }
        rows.push(row);
        equations.push(eq);
    }
    Ok((
        Hierarchy {
            kind: HierarchyKind::AhsmRearranged,
            order: h.order,
            paper_form: h.paper_form,
            equations,
        },
        RearrangeCertificate { rows },
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearityReport {
    pub order: usize,
    /// Total degree in `u_order` and its derivatives; `None` when they also
    /// occur in a denominator or a function argument.
    pub degree: Option<u32>,
    pub linear: bool,
}

/// Lemma-1 style check: equation `i` is affine-linear in `u_i` and its
/// derivatives.
pub fn check_linearity(h: &Hierarchy, i: usize) -> Result<LinearityReport> {
    let eq = h
        .equations
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("order {i} exceeds hierarchy order {}", h.order)))?;
    let degree = eq.degree_in(&|a| a.is_coeff_of(Family::Plain, i as u32));
    Ok(LinearityReport {
        order: i,
        degree,
        linear: degree.is_some_and(|d| d <= 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{normalize, parse};

    fn nf(s: &str) -> NormalForm {
        normalize(&parse(s).unwrap()).unwrap()
    }

    fn pde(e0: &str, e1: &str) -> PerturbedPde {
        PerturbedPde::new("test", parse(e0).unwrap(), parse(e1).unwrap()).unwrap()
    }

    fn ch() -> PerturbedPde {
        pde("dt(u) + dx(F(u)*dx(u))", "d(u,x,4)")
    }

    #[test]
    fn expansion_of_u_and_derivative() {
        let e = expand_series(&parse("u").unwrap(), &Atom::q(), 2).unwrap();
        assert_eq!(normalize(&e).unwrap(), nf("u0 + q*u1 + q^2*u2"));
        let e = expand_series(&parse("u_x").unwrap(), &Atom::q(), 1).unwrap();
        assert_eq!(normalize(&e).unwrap(), nf("u0_x + q*u1_x"));
        let e = expand_series(&parse("5").unwrap(), &Atom::q(), 3).unwrap();
        assert_eq!(normalize(&e).unwrap(), nf("5"));
    }

    #[test]
    fn model_validation() {
        assert!(PerturbedPde::new("bad", parse("u + eps").unwrap(), parse("u").unwrap()).is_err());
        assert!(PerturbedPde::new("bad", parse("u1").unwrap(), parse("u").unwrap()).is_err());
        assert!(PerturbedPde::new("bad", parse("x").unwrap(), parse("u").unwrap()).is_err());
    }

    #[test]
    fn asm_first_orders_for_cahn_hilliard() {
        let h = generate_asm(&ch(), 1, true).unwrap();
        assert_eq!(h.equations[0], nf("u0_t + dx(F(u0)*u0_x)"));
        assert_eq!(h.equations[1], nf("u1_t + d(F(u0)*u1, x, 2) + u0_xxxx"));
    }

    #[test]
    fn asm_for_linear_operator() {
        let h = generate_asm(&pde("u_t - u_x", "u_xx"), 4, true).unwrap();
        for k in 1..=4usize {
            let expected = format!("{}*(u{k}_t - u{k}_x + u{}_xx)", factorial(k as u32), k - 1);
            assert_eq!(h.equations[k], nf(&expected));
        }
        for k in 0..=4 {
            assert_eq!(check_linearity(&h, k).unwrap().degree, Some(1));
        }
    }

    #[test]
    fn raw_first_order_and_degenerate_theta() {
        let p = ch();
        let h = generate_ahsm_raw(&p, 3, true).unwrap();
        let d0 = qderiv_at0(&p.e0, 3).unwrap();
        let d1 = qderiv_at0(&p.e1, 3).unwrap();
        assert_eq!(h.equations[0], d0[0]);
        let expected = d0[1]
            .sub(&nf("theta").mul(&d0[0]))
            .add(&nf("eps*(1 - theta)").mul(&d1[0]));
        assert_eq!(h.equations[1], expected);
        // theta = 1 leaves only q-derivatives of E0
        let b = Bindings::new().param("theta", Expr::one());
        let raw_one = generate_ahsm_raw(&p, 3, true).unwrap();
        for i in 0..=3 {
            let at_one = normalize(&substitute(&raw_one.expr(i), &b).unwrap()).unwrap();
            let pure = if i == 0 { d0[0].clone() } else { d0[i].sub(&d0[i - 1].scale(&Rational::from_integer((i as i64).into()))) };
            assert_eq!(at_one, pure);
        }
    }

    #[test]
    fn rearrange_matches_closed_form_and_certificate() {
        let p = ch();
        let raw = generate_ahsm_raw(&p, 4, true).unwrap();
        let (re, cert) = rearrange(&raw).unwrap();
        let closed = generate_ahsm_rearranged(&p, 4, true).unwrap();
        for i in 0..=4 {
            assert_eq!(re.equations[i], closed.equations[i], "row {i}");
            let mut acc = raw.equations[i].clone();
            for (j, m) in &cert.rows[i] {
                acc = acc.add(&normalize(m).unwrap().mul(&raw.equations[*j]));
            }
            assert!(acc.sub(&re.equations[i]).is_zero());
        }
        assert_eq!(cert.rows[2][1].1.to_string(), "2*theta");
        let coef = rearrange(&raw.with_paper_form(false)).unwrap().0;
        assert_eq!(coef.with_paper_form(true).equations[3], re.equations[3]);
    }

    #[test]
    fn rearranged_second_equation_shape() {
        let h = generate_ahsm_rearranged(&ch(), 2, true).unwrap();
        let d0 = qderiv_at0(&ch().e0, 2).unwrap();
        let expected = d0[2].add(&nf("2*eps*(1-theta)*(theta*u0_xxxx + u1_xxxx)"));
        assert_eq!(h.equations[2], expected);
    }

    #[test]
    fn linearity_discriminates_orders() {
        let h = generate_ahsm_rearranged(&ch(), 3, true).unwrap();
        assert!(check_linearity(&h, 3).unwrap().linear);
        let deg_u1 = h.equations[2].degree_in(&|a| a.is_coeff_of(Family::Plain, 1));
        assert_eq!(deg_u1, Some(2));
    }

    #[test]
    fn truncation_does_not_change_low_coefficients() {
        let p = ch();
        let a = generate_ahsm_raw(&p, 3, false).unwrap();
        let b = generate_ahsm_raw(&p, 4, false).unwrap();
        for i in 0..=3 {
            assert_eq!(a.equations[i], b.equations[i]);
        }
    }

    #[test]
    fn paper_form_is_factorial_multiple() {
        let p = ch();
        let a = generate_asm(&p, 3, true).unwrap();
        let b = generate_asm(&p, 3, false).unwrap();
        for i in 0..=3 {
            assert_eq!(a.equations[i], b.equations[i].scale(&factorial(i as u32)));
        }
    }
}
