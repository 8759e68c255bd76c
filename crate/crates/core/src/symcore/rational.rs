//! Rational literals and decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

fn bad(s: &str) -> Error {
    Error::InvalidArgument(format!("not a rational number: `{s}`"))
}

/// Parses `INT`, `INT/INT`, decimals and exponent notation exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = body[i + 1..].parse().map_err(|_| bad(s))?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits_ok = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty() || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(bad(s));
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad(s))? / 10;
    let scale = exp - frac_part.len() as i32;
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * pow10(scale as u32))
    } else {
        Rational::new(digits, pow10(scale.unsigned_abs()))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Nearest double.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with `sig` significant digits, rounded half away from
/// zero from the exact value. Positional notation for moderate exponents,
/// scientific otherwise.
pub fn format_significant(r: &Rational, sig: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let neg = r.is_negative();
    let a = r.abs();
    // decimal exponent e with 10^e <= a < 10^(e+1)
    let mut e = a.numer().to_string().len() as i32 - a.denom().to_string().len() as i32;
    let ten_pow = |k: i32| -> Rational {
        if k >= 0 {
            Rational::from_integer(pow10(k as u32))
        } else {
            Rational::new(BigInt::from(1), pow10(k.unsigned_abs()))
        }
    };
    while a < ten_pow(e) {
        e -= 1;
    }
    while a >= ten_pow(e + 1) {
        e += 1;
    }
    let scaled = &a * ten_pow(sig as i32 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = if Rational::new(rem * 2, scaled.denom().clone()) >= Rational::from_integer(1.into()) {
        q + 1
    } else {
        q
    };
    if digits == pow10(sig) {
        digits /= 10;
        e += 1;
    }
    let ds = digits.to_string();
    let sign = if neg { "-" } else { "" };
    if (-5..sig as i32).contains(&e) {
        if e >= 0 {
            let (i, f) = ds.split_at(e as usize + 1);
            if f.is_empty() {
                format!("{sign}{i}")
            } else {
                format!("{sign}{i}.{f}")
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("{sign}0.{zeros}{ds}")
        }
    } else {
        let (i, f) = ds.split_at(1);
        if f.is_empty() {
            format!("{sign}{i}e{e}")
        } else {
            format!("{sign}{i}.{f}e{e}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.5478").unwrap(), r(5478, 10000));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("-2.5E2").unwrap(), r(-250, 1));
        assert_eq!(parse_rational("7015/10000").unwrap(), r(1403, 2000));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(format_significant(&r(1, 3), 5), "0.33333");
        assert_eq!(format_significant(&r(2, 3), 5), "0.66667");
        assert_eq!(format_significant(&r(-15944, 10_000_000_000), 3), "-1.59e-6");
        assert_eq!(format_significant(&r(5478, 10000), 17), "0.54780000000000000");
        assert_eq!(format_significant(&r(99999, 100000), 3), "1.00");
        assert_eq!(format_significant(&r(12, 1), 2), "12");
        assert_eq!(format_significant(&Rational::zero(), 17), "0");
    }

    #[test]
    fn rendering_round_trips_through_parser() {
        let x = r(-123456789, 987654321);
        let s = format_significant(&x, 17);
        let back = parse_rational(&s).unwrap();
        assert!((back - x).abs() < r(1, 100_000_000_000_000_000));
    }
}
