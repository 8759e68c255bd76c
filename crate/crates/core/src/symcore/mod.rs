//! Exact symbolic core.
//!
//! Expressions are immutable trees over exact rationals. Equality questions
//! are answered by [`normalize`], which maps an expression to an expanded
//! polynomial fraction in its atoms.

pub mod atom;
pub mod diff;
pub mod eval;
pub mod expr;
pub mod latex;
pub mod normal;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod subst;
pub mod taylor;

pub use atom::{Atom, Deriv, Family, FuncDeriv, IndepVar, SeriesCoeff};
pub use diff::{diff_total, partial};
pub use eval::{eval_exact, eval_with, ClosedForm, FuncTable, Point};
pub use expr::{Expr, Node};
pub use normal::{equivalent, is_zero, normalize, NormalForm};
pub use parse::{parse, parse_with, Context};
pub use subst::{substitute, Bindings};
pub use taylor::taylor_coeffs;
