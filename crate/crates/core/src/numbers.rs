//! Exact numbers: dyadic rationals for probabilities and Kraft sums, and
//! general rationals for quotients of them. Nothing here ever rounds.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bits::BitString;

/// `numerator / 2^exponent` in canonical form: when `exponent > 0` the
/// numerator is odd, and zero is always `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u64,
}

impl Dyadic {
    pub fn new(numerator: BigInt, exponent: u64) -> Self {
        if numerator.is_zero() {
            return Dyadic::zero();
        }
        let twos = numerator.trailing_zeros().unwrap_or(0).min(exponent);
        Dyadic {
            numerator: numerator >> twos,
            exponent: exponent - twos,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_integer(BigInt::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Dyadic {
            numerator: n.into(),
            exponent: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic {
            numerator: BigInt::one(),
            exponent: k,
        }
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic::from_integer(BigInt::one() << k as u64)
        } else {
            Dyadic::pow2_neg(k.unsigned_abs())
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    /// Multiplies by `2^k`.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            let k = k as u64;
            if k >= self.exponent {
                Dyadic::from_integer(&self.numerator << (k - self.exponent))
            } else {
                Dyadic::new(self.numerator.clone(), self.exponent - k)
            }
        } else {
            Dyadic::new(self.numerator.clone(), self.exponent + k.unsigned_abs())
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.numerator.clone(), BigInt::from(self.denominator()))
    }

    /// The first `count` digits of the binary expansion of a value in
    /// `[0, 1]`. The value 1 is read as `0.111…`.
    pub fn expansion_bits(&self, count: usize) -> Option<BitString> {
        if self.is_negative() || *self > Dyadic::one() {
            return None;
        }
        if *self == Dyadic::one() {
            return Some(BitString::ones(count));
        }
        // floor(value * 2^count) written on `count` bits
        let scaled = self.scale_pow2(count as i64);
        let floor = &scaled.numerator >> scaled.exponent;
        let (_, magnitude) = floor.into_parts();
        Some((0..count).rev().map(|i| magnitude.bit(i as u64)).collect())
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u64) {
    let e = a.exponent.max(b.exponent);
    (&a.numerator << (e - a.exponent), &b.numerator << (e - b.exponent), e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> core::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        dyadic_sum(iter)
    }
}

impl core::iter::Sum<Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

/// Exact sum of a sequence of dyadics.
pub fn dyadic_sum<'a>(terms: impl IntoIterator<Item = &'a Dyadic>) -> Dyadic {
    terms.into_iter().fold(Dyadic::zero(), |acc, x| &acc + x)
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumberParseError {
    Syntax(String),
    ZeroDenominator,
    NotDyadic,
}

impl fmt::Display for NumberParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberParseError::Syntax(s) => write!(f, "malformed fraction {s:?}"),
            NumberParseError::ZeroDenominator => f.write_str("zero denominator"),
            NumberParseError::NotDyadic => f.write_str("denominator is not a power of two"),
        }
    }
}

impl core::error::Error for NumberParseError {}

fn parse_fraction(s: &str) -> Result<(BigInt, BigInt), NumberParseError> {
    let syntax = || NumberParseError::Syntax(s.into());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| syntax())?;
    let den = BigInt::from_str(den).map_err(|_| syntax())?;
    if den.is_zero() {
        return Err(NumberParseError::ZeroDenominator);
    }
    Ok((num, den))
}

impl FromStr for Dyadic {
    type Err = NumberParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = parse_fraction(s)?;
        let (sign, den) = den.into_parts();
        let num = if sign == Sign::Minus { -num } else { num };
        let exp = den.trailing_zeros().unwrap_or(0);
        if den != BigUint::one() << exp {
            return Err(NumberParseError::NotDyadic);
        }
        Ok(Dyadic::new(num, exp))
    }
}

/// Exact reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionByZero;

impl fmt::Display for DivisionByZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("division by zero")
    }
}

impl core::error::Error for DivisionByZero {}

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        Rational(BigRational::new(numerator, denominator))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, DivisionByZero> {
        if rhs.is_zero() {
            Err(DivisionByZero)
        } else {
            Ok(Rational(&self.0 / &rhs.0))
        }
    }

    pub fn square(&self) -> Rational {
        Rational(&self.0 * &self.0)
    }
}

impl From<&Dyadic> for Rational {
    fn from(d: &Dyadic) -> Self {
        d.to_rational()
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumberParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = parse_fraction(s)?;
        Ok(Rational::new(num, den))
    }
}

/// `a / b` as an exact reduced fraction.
pub fn rational_div(a: &Dyadic, b: &Dyadic) -> Result<Rational, DivisionByZero> {
    a.to_rational().checked_div(&b.to_rational())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn sums() {
        assert_eq!(dyadic_sum(&[d("1/2"), d("1/4")]), d("3/4"));
        assert_eq!(dyadic_sum(&[]), Dyadic::zero());
        for n in 1..80u64 {
            let terms: alloc::vec::Vec<_> = (1..=n).map(Dyadic::pow2_neg).collect();
            assert_eq!(dyadic_sum(&terms), Dyadic::one() - Dyadic::pow2_neg(n));
        }
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Dyadic::new(BigInt::from(6), 3), d("3/4"));
        assert_eq!(d("6/8").exponent(), 2);
        assert_eq!(d("0/16"), Dyadic::zero());
        assert_eq!(d("0/16").exponent(), 0);
        assert_eq!(d("8/2").to_string(), "4/1");
        assert_eq!("1/3".parse::<Dyadic>(), Err(NumberParseError::NotDyadic));
    }

    #[test]
    fn divisions() {
        assert_eq!(rational_div(&d("1/4"), &d("3/4")), Ok(q("1/3")));
        assert_eq!(rational_div(&d("3/8"), &d("7/8")), Ok(q("3/7")));
        assert_eq!(rational_div(&d("5/32"), &d("5/32")), Ok(Rational::one()));
        assert_eq!(rational_div(&d("1/2"), &Dyadic::zero()), Err(DivisionByZero));
    }

    #[test]
    fn expansion() {
        assert_eq!(d("3/4").expansion_bits(4).unwrap().to_string(), "1100");
        assert_eq!(d("7/8").expansion_bits(2).unwrap().to_string(), "11");
        assert_eq!(Dyadic::one().expansion_bits(3).unwrap().to_string(), "111");
        assert_eq!(Dyadic::zero().expansion_bits(2).unwrap().to_string(), "00");
        assert!(d("3/2").expansion_bits(2).is_none());
    }

    #[test]
    fn scaling() {
        assert_eq!(d("3/4").scale_pow2(2), d("3"));
        assert_eq!(d("3").scale_pow2(-3), d("3/8"));
        assert_eq!(Dyadic::pow2(-5) * Dyadic::pow2(5), Dyadic::one());
    }

    fn arb_dyadic() -> impl Strategy<Value = Dyadic> {
        (any::<i64>(), 0u64..200).prop_map(|(n, e)| Dyadic::new(BigInt::from(n), e))
    }

    proptest! {
        #[test]
        fn add_then_subtract_is_identity(a in arb_dyadic(), b in arb_dyadic()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn sum_is_order_independent(mut v in proptest::collection::vec(arb_dyadic(), 0..12)) {
            let forward = dyadic_sum(&v);
            v.reverse();
            prop_assert_eq!(dyadic_sum(&v), forward);
        }

        #[test]
        fn display_parses_back(a in arb_dyadic()) {
            prop_assert_eq!(a.to_string().parse::<Dyadic>().unwrap(), a);
        }

        #[test]
        fn ordering_matches_rationals(a in arb_dyadic(), b in arb_dyadic()) {
            prop_assert_eq!(a.cmp(&b), a.to_rational().cmp(&b.to_rational()));
        }
    }
}
