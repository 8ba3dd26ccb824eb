//! Exact rational arithmetic and the coefficient conventions shared by every
//! other module: the standard set `{(n-1)/n} ∪ {1}`, Cartier indices and the
//! level-`N` coefficient replacement `m/N ↦ (m-1)/(N-1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::is_prime;

/// An exact fraction, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// True when `0 <= self <= 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Lossy conversion, for progress output only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `a/b` or a bare integer `a`, with an optional leading sign on the
/// numerator. Decimal notation is rejected.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedFraction(s.to_string());
        let parse_int = |t: &str, signed: bool| -> Option<BigInt> {
            let digits = if signed {
                t.strip_prefix(['-', '+']).unwrap_or(t)
            } else {
                t
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            t.parse().ok()
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let num = parse_int(n, true).ok_or_else(bad)?;
                let den = parse_int(d, false).ok_or_else(bad)?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(num, den))
            }
            None => Ok(Rational::from_integer(parse_int(s, true).ok_or_else(bad)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Coefficients of a boundary divisor, keyed by curve id. Every value lies in
/// `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Rational>", into = "BTreeMap<String, Rational>")]
pub struct CoeffVector {
    entries: BTreeMap<String, Rational>,
}

impl CoeffVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, K>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Rational)>,
        K: Into<String>,
    {
        let mut v = CoeffVector::new();
        for (k, c) in pairs {
            let k = k.into();
            if v.entries.contains_key(&k) {
                return Err(Error::DuplicateVertex(k));
            }
            v.set(k, c)?;
        }
        Ok(v)
    }

    /// Inserts or overwrites the coefficient of `id`.
    pub fn set(&mut self, id: impl Into<String>, c: Rational) -> Result<()> {
        if !c.in_unit_interval() {
            return Err(Error::CoefficientOutOfRange(c.to_string()));
        }
        self.entries.insert(id.into(), c);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Rational> {
        self.entries.get(id)
    }

    /// Coefficient of `id`, zero when absent.
    pub fn coeff(&self, id: &str) -> Rational {
        self.entries.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.entries.values()
    }

    /// Componentwise `self >= other` over the union of both supports.
    pub fn dominates(&self, other: &CoeffVector) -> bool {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .all(|k| self.coeff(k) >= other.coeff(k))
    }

    /// Smallest positive `m` with `m * c` integral for every entry.
    pub fn cartier_index(&self) -> BigUint {
        cartier_index(self.entries.values())
    }

    pub fn as_map(&self) -> &BTreeMap<String, Rational> {
        &self.entries
    }
}

impl TryFrom<BTreeMap<String, Rational>> for CoeffVector {
    type Error = Error;

    fn try_from(map: BTreeMap<String, Rational>) -> Result<Self> {
        CoeffVector::from_pairs(map)
    }
}

impl From<CoeffVector> for BTreeMap<String, Rational> {
    fn from(v: CoeffVector) -> Self {
        v.entries
    }
}

impl fmt::Display for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// True iff `c = (n-1)/n` for some `n >= 1`, or `c = 1`.
pub fn is_standard(c: &Rational) -> Result<bool> {
    if !c.in_unit_interval() {
        return Err(Error::CoefficientOutOfRange(c.to_string()));
    }
    Ok(c.is_one() || c.numer() + BigInt::one() == *c.denom())
}

/// Least common multiple of the denominators; `1` for an empty input.
pub fn cartier_index<'a>(coeffs: impl IntoIterator<Item = &'a Rational>) -> BigUint {
    coeffs.into_iter().fold(BigUint::one(), |acc, c| {
        let d = c.denom().magnitude();
        acc.lcm(d)
    })
}

pub fn p_divides_index<'a>(
    coeffs: impl IntoIterator<Item = &'a Rational>,
    p: u64,
) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((cartier_index(coeffs) % BigUint::from(p)).is_zero())
}

/// The level-`den` replacement `num/den ↦ (num-1)/(den-1)`.
///
/// The fraction is taken unreduced: `den` is the complement level, so
/// `(3, 6)` (that is, `1/2` at level 6) maps to `2/5`.
pub fn std_replace(num: u64, den: u64) -> Result<Rational> {
    if den < 2 {
        return Err(Error::InvalidArgument(format!(
            "replacement level must be at least 2, got {den}"
        )));
    }
    if num == 0 || num > den {
        return Err(Error::InvalidArgument(format!(
            "numerator {num} outside 1..={den}"
        )));
    }
    Ok(Rational::new(num - 1, den - 1))
}

/// Writes `c` as `m / level`, if `level * c` is an integer.
pub fn numerator_at_level(c: &Rational, level: u64) -> Option<BigInt> {
    let scaled = c * Rational::from_integer(level);
    scaled.is_integer().then(|| scaled.numer().clone())
}

/// Converts a nonnegative integer to `u64`, if it fits.
pub(crate) fn to_u64(n: &BigInt) -> Option<u64> {
    match n.sign() {
        Sign::Minus => None,
        _ => n.to_u64(),
    }
}
