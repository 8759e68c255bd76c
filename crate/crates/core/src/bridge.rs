//! Coefficient maps between the hierarchies and the checks built on them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chmodel::{Flavor, SeriesSolution};
use crate::error::{Error, Result};
use crate::seriesgen::{factorial, generate_ahsm_raw, generate_asm, qderiv_at0, rearrange, PerturbedPde};
use crate::symcore::atom::{Atom, Family};
use crate::symcore::{normalize, substitute, Bindings, Expr, NormalForm};
use crate::Rational;

pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::from_integer(0.into());
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MapKind {
    /// `u_l = sum_j C(l-1, j) theta^j uhat_(l-j)`
    ThetaOnly,
    /// `uhat_l = [eps(1-theta)]^l utilde_l`
    Scaling,
    /// `u_l = sum_j C(l-1, j) theta^j [eps(1-theta)]^(l-j) utilde_(l-j)`
    Theorem1,
    /// `u_l = sum_i C(l-1, i) (l-i)/l theta^i utilde_(l-i)`
    OperatorAlt,
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta-only" => Ok(MapKind::ThetaOnly),
            "scaling" => Ok(MapKind::Scaling),
            "theorem1" => Ok(MapKind::Theorem1),
            "operator-alt" => Ok(MapKind::OperatorAlt),
            other => Err(Error::InvalidArgument(format!("unknown map kind `{other}`"))),
        }
    }
}

/// Triangular linear substitution `from_l = sum_j entries[l][j] * to_(l-j)`.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientMap {
    pub kind: MapKind,
    pub order: usize,
    pub from: Family,
    pub to: Family,
    pub entries: Vec<Vec<Expr>>,
}

fn coupling() -> Expr {
    Expr::eps() * (Expr::one() - Expr::theta())
}

pub fn build_map(kind: MapKind, n: usize) -> CoefficientMap {
    let (from, to) = match kind {
        MapKind::ThetaOnly => (Family::Plain, Family::Hat),
        MapKind::Scaling => (Family::Hat, Family::Tilde),
        MapKind::Theorem1 | MapKind::OperatorAlt => (Family::Plain, Family::Tilde),
    };
    let mut entries = vec![vec![Expr::one()]];
    for l in 1..=n as u32 {
        let row = (0..l)
            .map(|j| {
                let c = binomial(l - 1, j);
                match kind {
                    MapKind::ThetaOnly => Expr::num(c) * Expr::theta().pow(j as i32),
                    MapKind::Scaling if j == 0 => coupling().pow(l as i32),
                    MapKind::Scaling => Expr::zero(),
                    MapKind::Theorem1 => {
                        Expr::num(c) * Expr::theta().pow(j as i32) * coupling().pow((l - j) as i32)
                    }
                    MapKind::OperatorAlt => {
                        let w = Rational::new(((l - j) as i64).into(), (l as i64).into());
                        Expr::num(c * w) * Expr::theta().pow(j as i32)
                    }
                }
            })
            .collect();
        entries.push(row);
    }
    CoefficientMap {
        kind,
        order: n,
        from,
        to,
        entries,
    }
}

impl CoefficientMap {
    /// Replacement for `from_l`.
    pub fn image(&self, l: usize) -> Expr {
        Expr::add(
            self.entries[l]
                .iter()
                .enumerate()
                .map(|(j, e)| e.clone() * Expr::coeff(self.to, (l - j) as u32)),
        )
    }

    pub fn bindings(&self) -> Result<Bindings> {
        let mut b = Bindings::new();
        for l in 0..=self.order {
            b = b.coeff(self.from, l as u32, self.image(l))?;
        }
        Ok(b)
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        substitute(e, &self.bindings()?)
    }

    /// Entry matrix as normal forms, `m[l][k]` the coefficient of `to_k`.
    fn matrix(&self) -> Result<Vec<Vec<NormalForm>>> {
        let n = self.order;
        let mut m = vec![vec![NormalForm::zero(); n + 1]; n + 1];
        for (l, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[l][l - j] = normalize(e)?;
            }
        }
        Ok(m)
    }

    fn from_matrix(kind: MapKind, from: Family, to: Family, m: &[Vec<NormalForm>]) -> CoefficientMap {
        let entries = m
            .iter()
            .enumerate()
            .map(|(l, row)| (0..=l).map(|j| row[l - j].to_expr()).collect())
            .collect();
        CoefficientMap {
            kind,
            order: m.len() - 1,
            from,
            to,
            entries,
        }
    }

    /// `self` followed by `next` (which must start where `self` ends).
    pub fn then(&self, next: &CoefficientMap, kind: MapKind) -> Result<CoefficientMap> {
        if self.to != next.from || self.order != next.order {
            return Err(Error::InvalidArgument("maps do not compose".into()));
        }
        let a = self.matrix()?;
        let b = next.matrix()?;
        let n = self.order;
        let mut c = vec![vec![NormalForm::zero(); n + 1]; n + 1];
        for l in 0..=n {
            for m in 0..=l {
                for k in 0..=m {
                    c[l][k] = c[l][k].add(&a[l][m].mul(&b[m][k]));
                }
            }
        }
        Ok(CoefficientMap::from_matrix(kind, self.from, next.to, &c))
    }

    /// Triangular inverse, `to_l` in terms of `from`. Needs nonzero
    /// diagonal entries (formally theta != 1 and eps != 0).
    pub fn inverse(&self) -> Result<CoefficientMap> {
        let m = invert_lower(&self.matrix()?)?;
        Ok(CoefficientMap::from_matrix(self.kind, self.to, self.from, &m))
    }
}

fn invert_lower(a: &[Vec<NormalForm>]) -> Result<Vec<Vec<NormalForm>>> {
    let n = a.len();
    let mut inv = vec![vec![NormalForm::zero(); n]; n];
    for l in 0..n {
        let diag = a[l][l].inverse()?;
        for k in 0..=l {
            let mut acc = if k == l { NormalForm::one() } else { NormalForm::zero() };
            for m in k..l {
                acc = acc.sub(&a[l][m].mul(&inv[m][k]));
            }
            inv[l][k] = acc.mul(&diag);
        }
    }
    Ok(inv)
}

/// Renames coefficient atoms of one family to another.
pub fn rename_family(e: &Expr, from: Family, to: Family, n: usize) -> Result<Expr> {
    let mut b = Bindings::new();
    for l in 0..=n as u32 {
        b = b.coeff(from, l, Expr::coeff(to, l))?;
    }
    substitute(e, &b)
}

/// Homotopy-flavor coefficients `u_l = sum_j entries[l][j] * sol_(l-j)`.
pub fn apply_map_to_solution(map: &CoefficientMap, sol: &SeriesSolution) -> Result<SeriesSolution> {
    if sol.flavor != Flavor::Asm {
        return Err(Error::InvalidArgument("expected an ASM-flavor solution".into()));
    }
    let n = sol.order();
    if map.order < n {
        return Err(Error::InvalidArgument(format!(
            "map order {} is below solution order {n}",
            map.order
        )));
    }
    let mut coefficients = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let e = Expr::add(
            map.entries[l]
                .iter()
                .enumerate()
                .map(|(j, c)| c.clone() * sol.coefficients[l - j].clone()),
        );
        coefficients.push(normalize(&e)?.to_expr());
    }
    Ok(SeriesSolution {
        flavor: Flavor::Homotopy,
        coefficients,
    })
}

/// `l!/(i-1)! C(l-1, i-2) theta^(l-i+1)`, the weight of the `i`-th
/// (one-based) reduced equation when reducing equation `l`.
pub fn reduction_multiplier(l: u32, i: u32) -> Expr {
    Expr::num(factorial(l) / factorial(i - 1) * binomial(l - 1, i - 2)) * Expr::theta().pow((l - i + 1) as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateEntry {
    /// Order of the reduced equation being subtracted.
    pub source_order: usize,
    pub multiplier: Expr,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionCertificate {
    pub rows: Vec<Vec<CertificateEntry>>,
}

/// Applies `map` to each rearranged equation and subtracts the weighted
/// lower reduced equations.
pub fn reduce_hierarchy(
    rearranged: &[NormalForm],
    map: &CoefficientMap,
    theta: Option<&Rational>,
) -> Result<(Vec<NormalForm>, ReductionCertificate)> {
    let spec = specializer(theta);
    let mut reduced: Vec<NormalForm> = Vec::with_capacity(rearranged.len());
    let mut cert = ReductionCertificate::default();
    for (l, eq) in rearranged.iter().enumerate() {
        let mut acc = normalize(&substitute(&map.apply(&eq.to_expr())?, &spec)?)?;
        let mut row = Vec::new();
        for i in 2..=l {
            let m = reduction_multiplier(l as u32, i as u32);
            let mn = normalize(&substitute(&m, &spec)?)?;
            acc = acc.sub(&mn.mul(&reduced[i - 1]));
            row.push(CertificateEntry {
                source_order: i - 1,
                multiplier: m,
            });
        }
        reduced.push(acc);
        cert.rows.push(row);
    }
    Ok((reduced, cert))
}

fn specializer(theta: Option<&Rational>) -> Bindings {
    match theta {
        Some(v) => Bindings::new().param("theta", Expr::num(v.clone())),
        None => Bindings::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub order: usize,
    pub status: Status,
    pub residual_normal_form: String,
    pub certificate: Vec<CertificateEntry>,
}

/// For each order `l <= n`: map the rearranged homotopy equation, reduce
/// it, and compare with `[eps(1-theta)]^l` times the ASM equation in the
/// target atoms. `theta` optionally specializes the check.
pub fn verify_theorem1(pde: &PerturbedPde, n: usize, theta: Option<&Rational>) -> Result<Vec<OrderReport>> {
    let raw = generate_ahsm_raw(pde, n, true)?;
    let (rearranged, _) = rearrange(&raw)?;
    let asm = generate_asm(pde, n, true)?;
    let map = build_map(MapKind::Theorem1, n);
    let (reduced, cert) = reduce_hierarchy(&rearranged.equations, &map, theta)?;
    let spec = specializer(theta);
    let mut out = Vec::with_capacity(n + 1);
    for (l, (red, row)) in reduced.iter().zip(cert.rows).enumerate() {
        let asm_tilde = rename_family(&asm.expr(l), Family::Plain, Family::Tilde, n)?;
        let target = substitute(&(coupling().pow(l as i32) * asm_tilde), &spec)?;
        let residual = red.sub(&normalize(&target)?);
        out.push(OrderReport {
            order: l,
            status: Status::from_bool(residual.is_zero()),
            residual_normal_form: residual.to_string(),
            certificate: row,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Report {
    pub order: usize,
    pub status: Status,
    pub residual_normal_form: String,
}

/// The theta-only map applied to `D^n E0` (hats deleted) equals
/// `D^n E0 + sum_{i=2}^n m(n, i) D^(i-1) E0`.
pub fn verify_lemma2(pde: &PerturbedPde, n: usize) -> Result<Lemma2Report> {
    if n < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let d = qderiv_at0(&pde.e0, n)?;
    let map = build_map(MapKind::ThetaOnly, n);
    let mapped = map.apply(&d[n].to_expr())?;
    let lhs = normalize(&rename_family(&mapped, Family::Hat, Family::Plain, n)?)?;
    let mut rhs = d[n].clone();
    for i in 2..=n {
        let m = normalize(&reduction_multiplier(n as u32, i as u32))?;
        rhs = rhs.add(&m.mul(&d[i - 1]));
    }
    let residual = lhs.sub(&rhs);
    Ok(Lemma2Report {
        order: n,
        status: Status::from_bool(residual.is_zero()),
        residual_normal_form: residual.to_string(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorRow {
    pub order: usize,
    /// Map read as `u_l = M(utilde)`.
    pub forward_difference: String,
    /// Map read as `utilde_l = M(u)`.
    pub reverse_difference: String,
}

/// Generator coefficients on `d/du_l`: `l u_l - (l-1) theta u_(l-1)` for
/// the homotopy operator and `l utilde_l` for the ASM one. For each order
/// the ASM coefficient is pushed through the map, written in `u`, and the
/// homotopy coefficient is subtracted.
pub fn operator_diagnostic(n: usize, theta: Option<&Rational>) -> Result<Vec<OperatorRow>> {
    let spec = specializer(theta);
    let map = build_map(MapKind::OperatorAlt, n);
    let mut m = map.matrix()?;
    for row in m.iter_mut() {
        for c in row.iter_mut() {
            *c = normalize(&substitute(&c.to_expr(), &spec)?)?;
        }
    }
    let th = normalize(&substitute(&Expr::theta(), &spec)?)?;
    let inv = invert_lower(&m)?;
    let forward = operator_difference(&m, &inv, &th);
    let reverse = operator_difference(&inv, &m, &th);
    Ok((0..=n)
        .map(|l| OperatorRow {
            order: l,
            forward_difference: forward[l].to_string(),
            reverse_difference: reverse[l].to_string(),
        })
        .collect())
}

/// `a` gives `u` in `utilde`, `b` gives `utilde` in `u`.
fn operator_difference(a: &[Vec<NormalForm>], b: &[Vec<NormalForm>], theta: &NormalForm) -> Vec<NormalForm> {
    let n = a.len();
    let k_nf = |k: usize| NormalForm::constant(Rational::from_integer((k as i64).into()));
    (0..n)
        .map(|l| {
            let mut acc = NormalForm::zero();
            for m in 0..n {
                let mut c = NormalForm::zero();
                for k in m..=l {
                    c = c.add(&a[l][k].mul(&k_nf(k)).mul(&b[k][m]));
                }
                if m == l {
                    c = c.sub(&k_nf(l));
                }
                if l >= 1 && m == l - 1 {
                    c = c.add(&k_nf(l - 1).mul(theta));
                }
                acc = acc.add(&c.mul(&NormalForm::atom(Atom::coeff(Family::Plain, m as u32, Default::default()))));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse;

    fn nf(s: &str) -> NormalForm {
        normalize(&parse(s).unwrap()).unwrap()
    }

    fn image(kind: MapKind, n: usize, l: usize) -> NormalForm {
        normalize(&build_map(kind, n).image(l)).unwrap()
    }

    #[test]
    fn theorem1_entries_match_listing() {
        assert_eq!(image(MapKind::Theorem1, 3, 1), nf("eps*(1-theta)*utilde1"));
        assert_eq!(
            image(MapKind::Theorem1, 3, 2),
            nf("eps*(1-theta)*(eps*(1-theta)*utilde2 + theta*utilde1)")
        );
        assert_eq!(
            image(MapKind::Theorem1, 3, 3),
            nf("eps*(1-theta)*(eps^2*(1-theta)^2*utilde3 + 2*theta*eps*(1-theta)*utilde2 + theta^2*utilde1)")
        );
    }

    #[test]
    fn theta_zero_is_pure_scaling() {
        let b = Bindings::new().param("theta", Expr::zero());
        for l in 0..=4 {
            let e = substitute(&build_map(MapKind::Theorem1, 4).image(l), &b).unwrap();
            assert_eq!(normalize(&e).unwrap(), nf(&format!("eps^{l}*utilde{l}")));
        }
    }

    #[test]
    fn composition_of_theta_map_and_scaling() {
        let theta = build_map(MapKind::ThetaOnly, 4);
        let scale = build_map(MapKind::Scaling, 4);
        let composed = theta.then(&scale, MapKind::Theorem1).unwrap();
        let direct = build_map(MapKind::Theorem1, 4);
        for l in 0..=4 {
            assert_eq!(normalize(&composed.image(l)).unwrap(), normalize(&direct.image(l)).unwrap());
        }
    }

    #[test]
    fn inverse_round_trips() {
        let map = build_map(MapKind::Theorem1, 4);
        let inv = map.inverse().unwrap();
        for l in 0..=4 {
            let back = map.apply(&inv.image(l)).unwrap();
            assert_eq!(normalize(&back).unwrap(), nf(&format!("utilde{l}")));
        }
    }

    #[test]
    fn multipliers_closed_form() {
        assert_eq!(normalize(&reduction_multiplier(2, 2)).unwrap(), nf("2*theta"));
        assert_eq!(normalize(&reduction_multiplier(3, 2)).unwrap(), nf("6*theta^2"));
        assert_eq!(normalize(&reduction_multiplier(3, 3)).unwrap(), nf("6*theta"));
    }

    #[test]
    fn lemma2_on_linear_operator() {
        let pde = PerturbedPde::new("lin", parse("u_t - u_x").unwrap(), parse("u_xx").unwrap()).unwrap();
        for n in 2..=4 {
            assert_eq!(verify_lemma2(&pde, n).unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn theorem1_for_a_quadratic_model() {
        let pde = PerturbedPde::new("burgers", parse("u_t + u*u_x").unwrap(), parse("u_xx").unwrap()).unwrap();
        for r in verify_theorem1(&pde, 4, None).unwrap() {
            assert_eq!(r.status, Status::Pass, "order {} residual {}", r.order, r.residual_normal_form);
        }
        let cert = verify_theorem1(&pde, 3, None).unwrap();
        assert_eq!(cert[3].certificate.len(), 2);
        assert_eq!(cert[3].certificate[0].source_order, 1);
    }

    #[test]
    fn operator_diagnostic_low_orders() {
        let rows = operator_diagnostic(3, None).unwrap();
        assert_eq!(rows[0].forward_difference, "0");
        assert_eq!(rows[1].forward_difference, "0");
        assert_eq!(rows[1].reverse_difference, "0");
        assert_eq!(nf(&rows[2].forward_difference), nf("theta*u1/2"));
        assert_eq!(nf(&rows[2].reverse_difference), nf("3*theta*u1/2"));
        let flat = operator_diagnostic(4, Some(&Rational::from_integer(0.into()))).unwrap();
        assert!(flat.iter().all(|r| r.forward_difference == "0" && r.reverse_difference == "0"));
    }
}
