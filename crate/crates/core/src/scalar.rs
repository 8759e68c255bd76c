//! Numeric traits shared by the polynomial layer and the evaluator.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Num, ToPrimitive};

use crate::Rational;

/// Coefficient ring of a [`Poly`](crate::symcore::poly::Poly).
///
/// Exact division is required: polynomial exact division and content
/// extraction only make sense over a field.
pub trait Coefficient: Num + Clone + Ord + Debug + Neg<Output = Self> + Send + Sync {}

impl Coefficient for Rational {}

/// Field used when evaluating an expression at a point.
pub trait Scalar: Num + Clone + Debug + Neg<Output = Self> + Send + Sync {
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

/// Raises a scalar to a non-negative integer power by repeated squaring.
pub fn powi<S: Scalar>(base: &S, mut exp: u32) -> S {
    let mut acc = S::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn powi_matches_repeated_product() {
        let r = Rational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(
            powi(&r, 5),
            Rational::new(BigInt::from(243), BigInt::from(32))
        );
        assert_eq!(powi(&2.0f64, 10), 1024.0);
        assert_eq!(powi(&r, 0), Rational::from_integer(BigInt::from(1)));
    }
}
