//! The binary-expansion map `f(x) = Σ 2⁻ⁱxᵢ` from `{0, 1}^ℕ` onto `[0, 1]`.
//!
//! Only eventually-constant sequences are representable, so `f` takes
//! exactly the dyadic values. Each dyadic in `(0, 1)` has two preimages
//! (`…1000…` and `…0111…`), the endpoints one each; identifying points with
//! equal image gives the quotient, represented here by a canonical member
//! of each class.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::product::ProductPoint;
use crate::rational::{dyadic_exponent, pow, Rational};
use crate::space::Point;

/// An eventually-constant bit sequence: `prefix`, then `tail` forever.
/// Normalised so that the prefix never ends with the tail bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinarySeq {
    prefix: Vec<bool>,
    tail: bool,
}

impl BinarySeq {
    pub fn new(mut prefix: Vec<bool>, tail: bool) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        BinarySeq { prefix, tail }
    }

    pub fn zeros() -> Self {
        BinarySeq::new(Vec::new(), false)
    }

    pub fn ones() -> Self {
        BinarySeq::new(Vec::new(), true)
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn tail(&self) -> bool {
        self.tail
    }

    /// Bit `i`, 1-based.
    pub fn bit(&self, i: usize) -> bool {
        self.prefix.get(i - 1).copied().unwrap_or(self.tail)
    }

    /// Parses `PREFIX` or `PREFIX;TAIL`, bits optionally comma-separated:
    /// `101`, `1,0,1;0`, `;1`. A missing tail means 0.
    pub fn parse(text: &str) -> Result<Self, QuotientError> {
        let bad = || QuotientError::BadBits(text.to_string());
        let (head, tail) = match text.trim().split_once(';') {
            Some((h, t)) => (h, t.trim()),
            None => (text.trim(), "0"),
        };
        let tail = match tail {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        let mut prefix = Vec::new();
        for ch in head.chars() {
            match ch {
                '0' => prefix.push(false),
                '1' => prefix.push(true),
                ',' | ' ' => {}
                _ => return Err(bad()),
            }
        }
        Ok(BinarySeq::new(prefix, tail))
    }

    /// The same point in the countable binary product (anchor `0` is bit 0).
    pub fn to_product_point(&self) -> ProductPoint {
        ProductPoint::new(
            self.prefix.iter().map(|&b| Point::Discrete(b as usize)).collect(),
            self.tail as usize,
        )
    }

    /// Inverse of [`BinarySeq::to_product_point`] for binary coordinates.
    pub fn from_product_point(p: &ProductPoint) -> Option<Self> {
        let bit = |c: &Point| match c {
            Point::Discrete(0) => Some(false),
            Point::Discrete(1) => Some(true),
            _ => None,
        };
        let prefix = p.prefix.iter().map(bit).collect::<Option<Vec<_>>>()?;
        let tail = match p.tail_anchor {
            0 => false,
            1 => true,
            _ => return None,
        };
        Some(BinarySeq::new(prefix, tail))
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        write!(f, ";{}", self.tail as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("{0} is outside [0, 1]")]
    OutOfRange(Rational),
    #[error("{0} is not dyadic")]
    NotDyadic(Rational),
    #[error("malformed bit sequence `{0}`")]
    BadBits(String),
}

/// A rational `a/2^k` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic(Rational);

impl Dyadic {
    pub fn new(value: Rational) -> Result<Self, QuotientError> {
        if value.is_negative() || value > Rational::one() {
            return Err(QuotientError::OutOfRange(value));
        }
        if dyadic_exponent(&value).is_none() {
            return Err(QuotientError::NotDyadic(value));
        }
        Ok(Dyadic(value))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `k` with denominator `2^k`.
    pub fn exponent(&self) -> u64 {
        dyadic_exponent(&self.0).expect("checked at construction")
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn half_pow(k: usize) -> Rational {
    pow(&Rational::new(BigInt::one(), BigInt::from(2)), k as u64)
}

/// `f(x) = Σ_{i≤m} 2⁻ⁱxᵢ + tail·2⁻ᵐ` for prefix length `m`.
pub fn f_eval(x: &BinarySeq) -> Dyadic {
    let m = x.prefix.len();
    // Accumulate the prefix as an integer over 2^m.
    let mut numer = BigInt::zero();
    for &b in &x.prefix {
        numer <<= 1;
        if b {
            numer += 1;
        }
    }
    if x.tail {
        numer += 1;
    }
    Dyadic(Rational::new(numer, BigInt::one() << m))
}

/// Every eventually-constant sequence with `f(x) = q`: two for `0 < q < 1`
/// (terminating form first), one for `q ∈ {0, 1}`.
pub fn f_preimages(q: &Dyadic) -> Vec<BinarySeq> {
    let v = q.value();
    if v.is_zero() {
        return vec![BinarySeq::zeros()];
    }
    if v.is_one() {
        return vec![BinarySeq::ones()];
    }
    let k = q.exponent() as usize;
    // numerator is odd and < 2^k
    let numer = v.numer();
    let bits: Vec<bool> = (0..k).rev().map(|j| numer.bit(j as u64)).collect();
    debug_assert!(numer.is_odd());
    let mut other = bits.clone();
    *other.last_mut().expect("k ≥ 1") = false;
    vec![BinarySeq::new(bits, false), BinarySeq::new(other, true)]
}

/// `x ≡ y` iff `f(x) = f(y)`.
pub fn equiv_wrt_f(x: &BinarySeq, y: &BinarySeq) -> bool {
    f_eval(x) == f_eval(y)
}

/// Canonical member of the class of `x`: the terminating (0-tail) expansion,
/// or all ones for `f(x) = 1`.
pub fn canonical(x: &BinarySeq) -> BinarySeq {
    f_preimages(&f_eval(x))
        .into_iter()
        .next()
        .expect("every dyadic has a preimage")
}

/// The induced map on classes, evaluated at a canonical member.
pub fn g_eval(class: &BinarySeq) -> Dyadic {
    f_eval(&canonical(class))
}

/// `D(x, y) = Σ 2⁻ⁱ|xᵢ − yᵢ|`, computed bitwise.
pub fn cantor_distance(x: &BinarySeq, y: &BinarySeq) -> Rational {
    let m = x.prefix.len().max(y.prefix.len());
    let mut sum = Rational::zero();
    for i in 1..=m {
        if x.bit(i) != y.bit(i) {
            sum += half_pow(i);
        }
    }
    if x.tail != y.tail {
        sum += half_pow(m);
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzWitness {
    pub image_gap: Rational,
    pub distance: Rational,
    pub holds: bool,
}

/// `(|f(x) − f(y)|, D(x, y), |f(x) − f(y)| ≤ D(x, y))`.
pub fn lipschitz_witness(x: &BinarySeq, y: &BinarySeq) -> LipschitzWitness {
    let image_gap = (f_eval(x).0 - f_eval(y).0).abs();
    let distance = cantor_distance(x, y);
    let holds = image_gap <= distance;
    LipschitzWitness {
        image_gap,
        distance,
        holds,
    }
}

/// All sequences with explicit bits only in positions `1..=k`, both tails:
/// `2^(k+1)` distinct points.
pub fn support_universe(k: usize) -> Vec<BinarySeq> {
    let mut out = Vec::with_capacity(2 << k);
    for tail in [false, true] {
        for n in 0u64..(1u64 << k) {
            let bits = (0..k).rev().map(|j| (n >> j) & 1 == 1).collect();
            out.push(BinarySeq::new(bits, tail));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn seq(bits: &[u8], tail: u8) -> BinarySeq {
        BinarySeq::new(bits.iter().map(|&b| b == 1).collect(), tail == 1)
    }

    fn dy(n: i64, d: i64) -> Dyadic {
        Dyadic::new(rat(n, d)).unwrap()
    }

    #[test]
    fn normalisation() {
        assert_eq!(seq(&[1, 0, 0], 0), seq(&[1], 0));
        assert_eq!(seq(&[1, 1], 1), BinarySeq::ones());
        assert_eq!(seq(&[1, 0, 1], 0).prefix().len(), 3);
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(&BinarySeq::zeros()), dy(0, 1));
        assert_eq!(f_eval(&seq(&[1, 0, 1], 0)), dy(5, 8));
        assert_eq!(f_eval(&BinarySeq::ones()), dy(1, 1));
        assert_eq!(f_eval(&seq(&[0], 1)), dy(1, 2));
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(f_preimages(&dy(1, 2)), vec![seq(&[1], 0), seq(&[0], 1)]);
        assert_eq!(f_preimages(&dy(0, 1)), vec![BinarySeq::zeros()]);
        assert_eq!(f_preimages(&dy(1, 1)), vec![BinarySeq::ones()]);
        assert_eq!(f_preimages(&dy(3, 4)), vec![seq(&[1, 1], 0), seq(&[1, 0], 1)]);
    }

    #[test]
    fn dyadic_validation() {
        assert!(matches!(Dyadic::new(rat(3, 2)), Err(QuotientError::OutOfRange(_))));
        assert!(matches!(Dyadic::new(int(-1)), Err(QuotientError::OutOfRange(_))));
        assert!(matches!(Dyadic::new(rat(1, 3)), Err(QuotientError::NotDyadic(_))));
    }

    #[test]
    fn equivalence_examples() {
        let x = seq(&[1], 0);
        assert!(equiv_wrt_f(&x, &x));
        assert!(equiv_wrt_f(&x, &seq(&[0], 1)));
        assert!(!equiv_wrt_f(&x, &BinarySeq::zeros()));
        assert_eq!(canonical(&seq(&[0], 1)), x);
        assert_eq!(canonical(&BinarySeq::ones()), BinarySeq::ones());
        assert_eq!(g_eval(&seq(&[0, 1], 1)), dy(1, 2));
    }

    #[test]
    fn lipschitz_examples() {
        let x = seq(&[1, 0, 1], 1);
        let w = lipschitz_witness(&x, &x);
        assert_eq!((w.image_gap, w.distance, w.holds), (int(0), int(0), true));
        let w = lipschitz_witness(&seq(&[1], 0), &seq(&[0], 1));
        assert_eq!((w.image_gap, w.distance, w.holds), (int(0), int(1), true));
        let w = lipschitz_witness(&BinarySeq::zeros(), &seq(&[1], 0));
        assert_eq!((w.image_gap, w.distance, w.holds), (rat(1, 2), rat(1, 2), true));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(BinarySeq::parse("101").unwrap(), seq(&[1, 0, 1], 0));
        assert_eq!(BinarySeq::parse("1,0,1;1").unwrap(), seq(&[1, 0, 1], 1));
        assert_eq!(BinarySeq::parse(";1").unwrap(), BinarySeq::ones());
        assert_eq!(BinarySeq::parse("").unwrap(), BinarySeq::zeros());
        assert!(BinarySeq::parse("12").is_err());
        assert!(BinarySeq::parse("1;2").is_err());
        assert_eq!(seq(&[0], 1).to_string(), "0;1");
    }

    #[test]
    fn product_point_conversion() {
        let x = seq(&[1, 1, 0], 1);
        assert_eq!(BinarySeq::from_product_point(&x.to_product_point()), Some(x));
        assert_eq!(BinarySeq::from_product_point(&ProductPoint::anchor(2)), None);
    }

    #[test]
    fn universe_size() {
        let u = support_universe(6);
        assert_eq!(u.len(), 128);
        let distinct: std::collections::HashSet<_> = u.iter().collect();
        assert_eq!(distinct.len(), 128);
    }
}
