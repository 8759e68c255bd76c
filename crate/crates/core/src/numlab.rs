//! Exact residuals of assembled series solutions, theta sweeps and theta
//! optimization.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chmodel::{builtin_asm_solution, ch_pde, homotopy_solution, ChCase};
use crate::error::{Error, Result};
use crate::seriesgen::PerturbedPde;
use crate::symcore::rational::{format_significant, to_f64};
use crate::symcore::{eval_exact, normalize, substitute, Atom, Bindings, Expr, FuncTable, Point};
use crate::Rational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    pub x: Rational,
    pub t: Rational,
    pub eps: Rational,
    pub q: Rational,
    pub theta: Rational,
    /// Wave speed, used by the `F = 1/u` case only.
    pub a: Rational,
}

impl Default for EvalPoint {
    /// `x = 1, t = 1/10, eps = 1/100, q = 1, theta = 0, a = 1`.
    fn default() -> Self {
        EvalPoint {
            x: Rational::one(),
            t: rat(1, 10),
            eps: rat(1, 100),
            q: Rational::one(),
            theta: Rational::zero(),
            a: Rational::one(),
        }
    }
}

impl EvalPoint {
    pub fn with_theta(&self, theta: Rational) -> EvalPoint {
        EvalPoint { theta, ..self.clone() }
    }
}

/// The residual at a fixed `(x, t, eps, q, a)` as an exact rational
/// function of `theta`.
#[derive(Clone, Debug)]
pub struct ResidualProfile {
    body: Expr,
}

impl ResidualProfile {
    /// Substitutes `series` for `u` in `E0 + eps E1`. `series` may carry
    /// `eps`, `q`, `a` and `theta`; everything except `theta` is fixed
    /// from `base`.
    pub fn from_series(pde: &PerturbedPde, series: &Expr, base: &EvalPoint) -> Result<ResidualProfile> {
        let fixed = Bindings::new()
            .param("eps", Expr::num(base.eps.clone()))
            .param("q", Expr::num(base.q.clone()))
            .param("a", Expr::num(base.a.clone()));
        let series = substitute(series, &fixed)?;
        let full = substitute(&pde.full(), &fixed)?;
        let e = substitute(&full, &Bindings::new().dep(series)?)?;
        let at = Bindings::new()
            .var("x", Expr::num(base.x.clone()))
            .var("t", Expr::num(base.t.clone()));
        let e = substitute(&e, &at)?;
        let body = match normalize(&e) {
            Ok(nf) => nf.to_expr(),
            Err(Error::DivisionByZero) => return Err(Error::Pole),
            Err(e) => return Err(e),
        };
        if let Some(a) = body.atoms(true).into_iter().find(|a| *a != Atom::theta()) {
            return Err(Error::UnboundAtom(a.to_string()));
        }
        Ok(ResidualProfile { body })
    }

    /// Homotopy solution of `case` truncated at `order` (all of it if
    /// `None`).
    pub fn homotopy(case: ChCase, base: &EvalPoint, order: Option<usize>) -> Result<ResidualProfile> {
        let mut sol = homotopy_solution(case, None)?;
        if let Some(n) = order {
            sol = sol.truncated(n);
        }
        ResidualProfile::from_series(&ch_pde(case), &sol.assembled(), base)
    }

    /// Built-in ASM series in `eps`, independent of `theta`.
    pub fn asm(case: ChCase, base: &EvalPoint) -> Result<ResidualProfile> {
        let sol = builtin_asm_solution(case)?;
        ResidualProfile::from_series(&ch_pde(case), &sol.assembled(), base)
    }

    pub fn expr(&self) -> &Expr {
        &self.body
    }

    pub fn at(&self, theta: &Rational) -> Result<Rational> {
        if theta.is_one() {
            return Err(Error::DegenerateTheta);
        }
        let point: Point = [(Atom::theta(), theta.clone())].into();
        eval_exact(&self.body, &point, &FuncTable::new())
    }
}

/// Exact residual of the homotopy solution of `case` at `point`.
pub fn residual(case: ChCase, point: &EvalPoint) -> Result<Rational> {
    if point.theta.is_one() {
        return Err(Error::DegenerateTheta);
    }
    ResidualProfile::homotopy(case, point, None)?.at(&point.theta)
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub theta: Rational,
    pub residual: Result<Rational>,
}

impl SweepRow {
    pub fn abs_residual(&self) -> Option<Rational> {
        self.residual.as_ref().ok().map(Signed::abs)
    }
}

fn check_range(theta_min: &Rational, theta_max: &Rational, step: &Rational) -> Result<()> {
    if !step.is_positive() {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if theta_min.is_negative() || theta_min >= theta_max || *theta_max >= Rational::one() {
        return Err(Error::InvalidArgument("need 0 <= theta_min < theta_max < 1".into()));
    }
    Ok(())
}

/// `theta_min, theta_min + step, ...` up to and including `theta_max`.
pub fn theta_grid(theta_min: &Rational, theta_max: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    check_range(theta_min, theta_max, step)?;
    let count = ((theta_max - theta_min) / step).floor().to_integer();
    let count: usize = count
        .try_into()
        .map_err(|_| Error::InvalidArgument("grid too large".into()))?;
    Ok((0..=count)
        .map(|k| theta_min + step * Rational::from_integer(k.into()))
        .collect())
}

/// Rows evaluated in parallel, returned in increasing `theta`.
pub fn sweep(
    profile: &ResidualProfile,
    theta_min: &Rational,
    theta_max: &Rational,
    step: &Rational,
) -> Result<Vec<SweepRow>> {
    let grid = theta_grid(theta_min, theta_max, step)?;
    Ok(evaluate_all(profile, grid))
}

fn evaluate_all(profile: &ResidualProfile, thetas: Vec<Rational>) -> Vec<SweepRow> {
    thetas
        .into_par_iter()
        .map(|theta| SweepRow {
            residual: profile.at(&theta),
            theta,
        })
        .collect()
}

pub const CSV_HEADER: &str = "theta,residual,abs_residual";

/// One line per row; failed rows carry the error text in the residual
/// column and an empty magnitude.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let theta = format_significant(&row.theta, 17);
        match &row.residual {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "{theta},{},{}",
                    format_significant(r, 17),
                    format_significant(&r.abs(), 17)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{theta},\"error: {}\",", e.to_string().replace('"', "'"));
            }
        }
    }
    out
}

/// Single polyline of `|residual|` against `theta`, linear axes.
pub fn to_svg(rows: &[SweepRow]) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((to_f64(&r.theta), to_f64(&r.abs_residual()?))))
        .filter(|(_, y)| y.is_finite())
        .collect();
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let y1 = pts.iter().fold(0.0f64, |m, p| m.max(p.1));
    let sx = if x1 > x0 { (w - 2.0 * pad) / (x1 - x0) } else { 0.0 };
    let sy = if y1 > 0.0 { (h - 2.0 * pad) / y1 } else { 0.0 };
    let mut poly = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            poly.push(' ');
        }
        let _ = write!(poly, "{:.3},{:.3}", pad + (x - x0) * sx, h - pad - y * sy);
    }
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black" stroke-width="1"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">theta</text>"#, w / 2.0, h - 8.0);
    let _ = writeln!(svg, r#"<text x="8" y="{}" font-size="12">|residual| max {y1:.3e}</text>"#, pad - 12.0);
    let _ = writeln!(svg, r#"<polyline points="{poly}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    svg.push_str("</svg>\n");
    svg
}

#[derive(Clone, Debug, Serialize)]
pub struct OptResult {
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub residual: Rational,
    pub grid_points: usize,
    pub refinement_iterations: usize,
    #[serde(serialize_with = "ser_bracket")]
    pub bracket: (Rational, Rational),
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_bracket<S: serde::Serializer>(b: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&b.0.to_string())?;
    t.serialize_element(&b.1.to_string())?;
    t.end()
}

/// Probe spacing for the refinement stage.
fn probe_quantum() -> Rational {
    rat(1, 1_000_000_000)
}

fn round_to(r: &Rational, quantum: &Rational) -> Rational {
    (r / quantum).round() * quantum
}

/// Better of two evaluated points: smaller `|residual|`, then smaller theta.
fn better(a: &(Rational, Rational), b: &(Rational, Rational)) -> bool {
    let (aa, ba) = (a.1.abs(), b.1.abs());
    aa < ba || (aa == ba && a.0 < b.0)
}

/// Coarse grid, then golden-section search on `|residual|` inside the
/// bracket around the best grid point until it is at most `width` wide.
pub fn optimize_theta(
    profile: &ResidualProfile,
    theta_min: &Rational,
    theta_max: &Rational,
    step: &Rational,
    width: &Rational,
) -> Result<OptResult> {
    let rows = sweep(profile, theta_min, theta_max, step)?;
    let grid_points = rows.len();
    let mut evaluated: Vec<(Rational, Rational)> = rows
        .iter()
        .filter_map(|r| Some((r.theta.clone(), r.residual.as_ref().ok()?.clone())))
        .collect();
    let best_idx = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.residual.is_ok())
        .min_by(|(_, a), (_, b)| {
            let (aa, ba) = (a.abs_residual().unwrap(), b.abs_residual().unwrap());
            aa.cmp(&ba).then(a.theta.cmp(&b.theta))
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("no grid point could be evaluated".into()))?;
    let mut lo = rows[best_idx.saturating_sub(1)].theta.clone();
    let mut hi = rows[(best_idx + 1).min(rows.len() - 1)].theta.clone();
    let q = probe_quantum();
    let inv_phi = rat(6_180_339_887, 10_000_000_000);
    let eval = |theta: Rational, evaluated: &mut Vec<(Rational, Rational)>| -> Option<Rational> {
        let r = profile.at(&theta).ok()?;
        let a = r.abs();
        evaluated.push((theta, r));
        Some(a)
    };
    let mut iterations = 0;
    let mut c = round_to(&(&hi - (&hi - &lo) * &inv_phi), &q);
    let mut d = round_to(&(&lo + (&hi - &lo) * &inv_phi), &q);
    let mut fc = eval(c.clone(), &mut evaluated);
    let mut fd = eval(d.clone(), &mut evaluated);
    while &hi - &lo > *width && c < d {
        iterations += 1;
        // A failed probe is treated as worse than any finite value.
        let left = match (&fc, &fd) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            _ => false,
        };
        if left {
            hi = d;
            d = c;
            fd = fc;
            c = round_to(&(&hi - (&hi - &lo) * &inv_phi), &q);
            fc = eval(c.clone(), &mut evaluated);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = round_to(&(&lo + (&hi - &lo) * &inv_phi), &q);
            fd = eval(d.clone(), &mut evaluated);
        }
    }
    let best = evaluated
        .iter()
        .fold(None::<&(Rational, Rational)>, |acc, p| match acc {
            Some(b) if !better(p, b) => Some(b),
            _ => Some(p),
        })
        .cloned()
        .expect("at least one evaluated point");
    Ok(OptResult {
        theta: best.0,
        residual: best.1,
        grid_points,
        refinement_iterations: iterations,
        bracket: (lo, hi),
    })
}

/// Default grid `[0, 0.999]` in steps of `1/1000`.
pub fn default_grid() -> (Rational, Rational, Rational) {
    (Rational::zero(), rat(999, 1000), rat(1, 1000))
}

pub fn default_width() -> Rational {
    rat(1, 1_000_000)
}
