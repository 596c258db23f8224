//! Exact rational scalars.
//!
//! [`Rational`] is `num_rational::BigRational`: always reduced, denominator
//! positive, arbitrary precision. This module adds the textual form used by
//! definition files, certificates and CLI output (`num/den` or an integer,
//! never a decimal).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational")]
    Empty,
    #[error("decimal notation is not accepted in `{0}`; write num/den")]
    Decimal(String),
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `num/den` or a bare integer. Signs are allowed on either part.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(ParseRationalError::Decimal(s.to_string()));
    }
    let parse_int = |part: &str| -> Result<BigInt, ParseRationalError> {
        let p = part.trim();
        let digits = p.strip_prefix(['+', '-']).unwrap_or(p);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        p.parse::<BigInt>()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Always renders `num/den`, including for integers (`2/1`).
pub struct Fraction<'a>(pub &'a Rational);

impl fmt::Display for Fraction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// `base^exp` by repeated squaring.
pub fn pow(base: &Rational, exp: u64) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

/// `Some(k)` when the denominator is exactly `2^k`.
pub fn dyadic_exponent(r: &Rational) -> Option<u64> {
    let d = r.denom();
    if d.is_zero() {
        return None;
    }
    let k = d.trailing_zeros().unwrap_or(0);
    if (d >> k).is_one() {
        Some(k)
    } else {
        None
    }
}

/// Smallest integer `k ≥ 1` with `span / k < eps`, i.e. `k = ⌊span/eps⌋ + 1`.
pub fn min_divisions(span: &Rational, eps: &Rational) -> BigInt {
    let q = span / eps;
    let (fl, _) = q.numer().div_mod_floor(q.denom());
    let k = fl + BigInt::one();
    if k < BigInt::one() {
        BigInt::one()
    } else {
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("  6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        assert!(matches!(parse_rational("0.5"), Err(ParseRationalError::Decimal(_))));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("a/2"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse_rational("1//2"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse_rational(""), Err(ParseRationalError::Empty)));
    }

    #[test]
    fn fraction_display_keeps_denominator() {
        assert_eq!(Fraction(&int(2)).to_string(), "2/1");
        assert_eq!(Fraction(&rat(6, 8)).to_string(), "3/4");
        assert_eq!(int(2).to_string(), "2");
    }

    #[test]
    fn pow_and_dyadic() {
        assert_eq!(pow(&rat(1, 2), 10), rat(1, 1024));
        assert_eq!(pow(&rat(2, 3), 0), int(1));
        assert_eq!(dyadic_exponent(&rat(3, 8)), Some(3));
        assert_eq!(dyadic_exponent(&int(1)), Some(0));
        assert_eq!(dyadic_exponent(&rat(1, 6)), None);
    }

    #[test]
    fn min_divisions_is_strict() {
        // 1 / 3 = 1/3 is not < 1/3, so four pieces are needed.
        assert_eq!(min_divisions(&int(1), &rat(1, 3)), BigInt::from(4));
        assert_eq!(min_divisions(&int(1), &rat(2, 5)), BigInt::from(3));
        assert_eq!(min_divisions(&int(0), &rat(1, 5)), BigInt::from(1));
    }
}
