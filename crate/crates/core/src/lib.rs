//! Symbolic engine for perturbation hierarchies of perturbed PDEs.
//!
//! A perturbed PDE `E0(u) + eps*E1(u) = 0` can be expanded either in powers of
//! `eps` (approximate symmetry expansion) or embedded in the homotopy
//! `(1 - theta*q)*E0 + q*eps*(1 - theta)*E1` and expanded in powers of `q`.
//! This crate generates both coupled hierarchies exactly, checks the
//! triangular coefficient map that carries one onto the other, and evaluates
//! the resulting homotopy series solutions of the Cahn-Hilliard equation.
//!
//! Module map:
//!
//! - [`symcore`]: exact expression trees, differentiation, substitution,
//!   canonical normal forms, parsing and evaluation.
//! - [`seriesgen`]: series expansion and hierarchy generation.
//! - [`fdb`]: Faa di Bruno oracle for q-derivatives at `q = 0`.
//! - [`bridge`]: coefficient maps and the hierarchy equivalence checks.
//! - [`chmodel`]: the Cahn-Hilliard instantiation and its series solutions.
//! - [`numlab`]: exact residuals, theta sweeps and theta optimization.
//! - [`model`]: the text model-file format.

pub mod bridge;
pub mod chmodel;
pub mod error;
pub mod fdb;
pub mod model;
pub mod numlab;
pub mod sample;
pub mod scalar;
pub mod seriesgen;
pub mod symcore;

pub use error::{Error, Result};
pub use scalar::{Coefficient, Scalar};
pub use symcore::{Atom, Expr, NormalForm};

/// Exact rational numbers used for every coefficient in the engine.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision integers.
pub type Integer = num_bigint::BigInt;

/// Multivariate polynomials over the rationals.
pub type Polynomial = symcore::poly::Poly<Rational>;

/// Floating-point view used only for diagnostics.
pub type Float = f64;
