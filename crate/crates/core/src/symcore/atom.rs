//! Atoms are the indeterminates of the engine.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symcore::expr::Expr;

/// Names of the independent variables, in derivative-index order.
pub const INDEP_VARS: [&str; 2] = ["x", "t"];

pub const NUM_INDEP: usize = INDEP_VARS.len();

pub const EPS: &str = "eps";
pub const THETA: &str = "theta";
pub const Q: &str = "q";

/// Index of an independent variable in [`INDEP_VARS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndepVar(usize);

impl IndepVar {
    pub const X: IndepVar = IndepVar(0);
    pub const T: IndepVar = IndepVar(1);

    pub fn from_name(name: &str) -> Result<IndepVar> {
        INDEP_VARS
            .iter()
            .position(|v| *v == name)
            .map(IndepVar)
            .ok_or_else(|| Error::NotIndependent {
                name: name.to_string(),
            })
    }

    pub fn all() -> impl Iterator<Item = IndepVar> {
        (0..NUM_INDEP).map(IndepVar)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn name(self) -> &'static str {
        INDEP_VARS[self.0]
    }
}

/// Multi-index of a partial derivative with respect to the independent
/// variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deriv(pub [u32; NUM_INDEP]);

impl Deriv {
    pub const NONE: Deriv = Deriv([0; NUM_INDEP]);

    pub fn new(dx: u32, dt: u32) -> Deriv {
        Deriv([dx, dt])
    }

    pub fn get(&self, v: IndepVar) -> u32 {
        self.0[v.0]
    }

    pub fn bumped(&self, v: IndepVar, n: u32) -> Deriv {
        let mut d = *self;
        d.0[v.0] += n;
        d
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Parses a suffix such as `xxt`.
    pub fn from_suffix(s: &str) -> Option<Deriv> {
        let mut d = Deriv::NONE;
        for c in s.chars() {
            let idx = INDEP_VARS
                .iter()
                .position(|v| v.len() == 1 && v.starts_with(c))?;
            d.0[idx] += 1;
        }
        Some(d)
    }

    /// Suffix form, variables in index order: `u1_xxt`.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.0.iter().enumerate() {
            for _ in 0..*n {
                s.push_str(INDEP_VARS[i]);
            }
        }
        s
    }
}

/// Which copy of the series coefficients an atom belongs to: the original
/// `u_l`, the intermediate `û_l` or the target `ũ_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Plain,
    Hat,
    Tilde,
}

impl Family {
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Plain => "u",
            Family::Hat => "uhat",
            Family::Tilde => "utilde",
        }
    }

    pub fn all() -> [Family; 3] {
        [Family::Plain, Family::Hat, Family::Tilde]
    }
}

/// `∂^|deriv| u_order / ∂x^dx ∂t^dt` within a coefficient family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesCoeff {
    pub family: Family,
    pub order: u32,
    pub deriv: Deriv,
}

impl SeriesCoeff {
    pub fn new(family: Family, order: u32, deriv: Deriv) -> SeriesCoeff {
        SeriesCoeff {
            family,
            order,
            deriv,
        }
    }

    pub fn plain(order: u32) -> SeriesCoeff {
        SeriesCoeff::new(Family::Plain, order, Deriv::NONE)
    }
}

/// `F^(order)(arg)` for an uninterpreted function `F`.
///
/// `arg` is always the canonical expression of its normal form, so two
/// atoms with equal arguments compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncDeriv {
    pub name: Arc<str>,
    pub order: u32,
    pub arg: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Independent variable.
    Var(Arc<str>),
    /// Constant parameter (eps, theta, q, wave speed ...).
    Param(Arc<str>),
    /// The dependent variable (and its derivatives) before series expansion.
    Dep(Deriv),
    Coeff(SeriesCoeff),
    Func(FuncDeriv),
}

impl Atom {
    pub fn var(name: &str) -> Atom {
        Atom::Var(Arc::from(name))
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(Arc::from(name))
    }

    pub fn eps() -> Atom {
        Atom::param(EPS)
    }

    pub fn theta() -> Atom {
        Atom::param(THETA)
    }

    pub fn q() -> Atom {
        Atom::param(Q)
    }

    pub fn coeff(family: Family, order: u32, deriv: Deriv) -> Atom {
        Atom::Coeff(SeriesCoeff::new(family, order, deriv))
    }

    /// Builds `F^(order)(arg)`, normalizing the argument first.
    pub fn func(name: &str, order: u32, arg: &Expr) -> Result<Atom> {
        let canonical = crate::symcore::normal::normalize(arg)?.to_expr();
        Ok(Atom::Func(FuncDeriv {
            name: Arc::from(name),
            order,
            arg: canonical,
        }))
    }

    pub fn is_coeff_of(&self, family: Family, order: u32) -> bool {
        matches!(self, Atom::Coeff(c) if c.family == family && c.order == order)
    }

    /// True if `pred` holds for this atom or any atom nested in a function
    /// argument.
    pub fn mentions(&self, pred: &dyn Fn(&Atom) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Atom::Func(f) => f.arg.mentions(pred),
            _ => false,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(n) | Atom::Param(n) => write!(f, "{n}"),
            Atom::Dep(d) => {
                if *d == Deriv::NONE {
                    write!(f, "u")
                } else {
                    write!(f, "u_{}", d.suffix())
                }
            }
            Atom::Coeff(c) => {
                write!(f, "{}{}", c.family.prefix(), c.order)?;
                if c.deriv != Deriv::NONE {
                    write!(f, "_{}", c.deriv.suffix())?;
                }
                Ok(())
            }
            Atom::Func(fd) => {
                write!(f, "{}", fd.name)?;
                for _ in 0..fd.order {
                    write!(f, "'")?;
                }
                write!(f, "({})", fd.arg)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deriv_suffix_round_trip() {
        let d = Deriv::new(2, 1);
        assert_eq!(d.suffix(), "xxt");
        assert_eq!(Deriv::from_suffix("xtx"), Some(d));
        assert_eq!(Deriv::from_suffix("xy"), None);
    }

    #[test]
    fn coefficient_atoms_print_with_family_prefix() {
        assert_eq!(Atom::coeff(Family::Plain, 1, Deriv::new(2, 1)).to_string(), "u1_xxt");
        assert_eq!(Atom::coeff(Family::Tilde, 3, Deriv::NONE).to_string(), "utilde3");
        assert_eq!(Atom::Dep(Deriv::new(4, 0)).to_string(), "u_xxxx");
    }

    #[test]
    fn indep_var_lookup() {
        assert_eq!(IndepVar::from_name("t").unwrap(), IndepVar::T);
        assert!(IndepVar::from_name("eps").is_err());
    }
}
