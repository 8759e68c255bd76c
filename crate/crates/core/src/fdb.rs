//! Faa di Bruno oracle for q-derivatives at `q = 0`.
//!
//! Each derivative `u^(lambda)` occurring in the target is an independent
//! slot. The `n`-th q-derivative of the target is a sum over the
//! nonnegative solutions of
//!
//! ```text
//! r_1 + 2 r_2 + ... + n r_n = n
//! p_m1 + ... + p_ms = r_m          (m = 1..n, s slots)
//! ```
//!
//! of `n! / (prod (m!)^r_m prod p_mj!) * d^r E / prod d[slot_j]^(p_j)`
//! times `prod (d^m slot_j / dq^m)^p_mj`, everything at `q = 0`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::Result;
use crate::seriesgen::factorial;
use crate::symcore::atom::{Atom, Deriv, Family};
use crate::symcore::{partial, substitute, Bindings, Expr};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DioSolution {
    /// `r[m-1]` is `r_m`.
    pub r: Vec<u32>,
    /// `p[m-1][j]`, one row per `m`, one column per slot.
    pub p: Vec<Vec<u32>>,
}

impl DioSolution {
    pub fn r_total(&self) -> u32 {
        self.r.iter().sum()
    }

    /// Column sums `p_j`.
    pub fn columns(&self) -> Vec<u32> {
        let s = self.p.first().map_or(0, Vec::len);
        (0..s).map(|j| self.p.iter().map(|row| row[j]).sum()).collect()
    }
}

/// Partitions `r_1 + 2 r_2 + ... + n r_n = n`, lexicographic in `r`.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(m: u32, n: u32, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if m > n {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for r in 0..=rest / m {
            cur.push(r);
            go(m + 1, n, rest - r * m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, n, &mut Vec::new(), &mut out);
    out
}

/// Weak compositions of `total` into `parts` parts, lexicographic.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut tail in compositions(total - first, parts - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// All solutions for order `n` over `slots` columns, ordered by `r` then by
/// the rows of `p`.
pub fn enumerate_with_slots(n: u32, slots: usize) -> Vec<DioSolution> {
    let mut out = Vec::new();
    for r in partitions(n) {
        let mut rows: Vec<Vec<Vec<u32>>> = vec![vec![]];
        for &rm in &r {
            let choices = compositions(rm, slots);
            rows = rows
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut next = prefix.clone();
                        next.push(c.clone());
                        next
                    })
                })
                .collect();
        }
        out.extend(rows.into_iter().map(|p| DioSolution { r: r.clone(), p }));
    }
    out
}

/// Solutions for a `k`-th order operator with the dense slots
/// `u^(0) .. u^(k)`.
pub fn enumerate_dio(n: u32, k: u32) -> Vec<DioSolution> {
    enumerate_with_slots(n, k as usize + 1)
}

/// `d^i u^(slot) / dq^i = sum_{l=i}^{n} l!/(l-i)! q^(l-i) u_l^(slot)` for the
/// series truncated at order `n`.
pub fn qderiv_series(slot: Deriv, i: u32, n: u32) -> Expr {
    Expr::add((i..=n).map(|l| {
        Expr::num(factorial(l) / factorial(l - i))
            * Expr::q().pow((l - i) as i32)
            * Expr::atom(Atom::coeff(Family::Plain, l, slot))
    }))
}

/// The dependent-variable slots occurring in `e`, function arguments
/// included, in atom order.
pub fn slots_of(e: &Expr) -> Vec<Deriv> {
    e.atoms(true)
        .into_iter()
        .filter_map(|a| match a {
            Atom::Dep(d) => Some(d),
            _ => None,
        })
        .collect()
}

/// `(d^n target / dq^n)|_{q=0}` assembled term by term from the
/// enumeration.
pub fn fdb_qderiv_at0(target: &Expr, n: u32) -> Result<Expr> {
    let slots = slots_of(target);
    let at_zero_u = Bindings::new().dep(Expr::coeff(Family::Plain, 0))?;
    let at_zero_q = Bindings::new().param("q", Expr::zero());
    let mut partials: HashMap<Vec<u32>, Expr> = HashMap::new();
    let mut terms = Vec::new();
    for sol in enumerate_with_slots(n, slots.len()) {
        let cols = sol.columns();
        let d = match partials.get(&cols) {
            Some(d) => d.clone(),
            None => {
                let mut d = target.clone();
                for (j, &pj) in cols.iter().enumerate() {
                    for _ in 0..pj {
                        d = partial(&d, &Atom::Dep(slots[j]));
                    }
                }
                let d = substitute(&d, &at_zero_u)?;
                partials.insert(cols.clone(), d.clone());
                d
            }
        };
        if d.is_zero_literal() {
            continue;
        }
        let mut denom = crate::Rational::from_integer(1.into());
        let mut factors = vec![d];
        for (m, row) in sol.p.iter().enumerate() {
            let m = m as u32 + 1;
            for _ in 0..sol.r[m as usize - 1] {
                denom *= factorial(m);
            }
            for (j, &pmj) in row.iter().enumerate() {
                denom *= factorial(pmj);
                if pmj > 0 {
                    let dq = substitute(&qderiv_series(slots[j], m, n), &at_zero_q)?;
                    factors.push(dq.pow(pmj as i32));
                }
            }
        }
        factors.insert(0, Expr::num(factorial(n) / denom));
        terms.push(Expr::mul(factors));
    }
    Ok(Expr::add(terms))
}
