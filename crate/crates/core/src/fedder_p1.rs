//! Global F-regularity of `(P¹, c₁·0 + c₂·∞ + c₃·1)` by the monomial test.
//!
//! With `q = p^e` and `aₘ = ⌈(q-1)cₘ⌉`, the pair is globally F-regular as soon
//! as `x^{a₁} y^{a₂} (x+y)^{a₃}` has a monomial `x^i y^j` with nonzero
//! coefficient mod `p` and `i, j <= q-2`. Writing `i = a₁ + k`, the
//! coefficient is `C(a₃, k)`, so the test is a digit-dominance search for `k`
//! in an interval.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::Rational;
use crate::padic::{binom_nonzero_mod_p, ceil_mul, exists_dominated_in_interval, is_prime};

/// Boundary on `P¹` supported on `0, ∞, 1` (in that order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Pair {
    coeffs: [Rational; 3],
}

impl P1Pair {
    pub fn new(c1: Rational, c2: Rational, c3: Rational) -> Result<Self> {
        let coeffs = [c1, c2, c3];
        for c in &coeffs {
            if c.is_negative() || *c >= Rational::one() {
                return Err(Error::CoefficientOutOfRange(format!(
                    "{c} (marked points need coefficients in [0, 1))"
                )));
            }
        }
        Ok(P1Pair { coeffs })
    }

    /// Builds a pair from a list of point coefficients. Zero entries are
    /// dropped; more than three nonzero entries are unsupported.
    pub fn from_points(points: &[Rational]) -> Result<Self> {
        let nonzero: Vec<Rational> = points.iter().filter(|c| !c.is_zero()).cloned().collect();
        if nonzero.len() > 3 {
            return Err(Error::Unsupported(format!(
                "{} marked points; at most 3 are supported",
                nonzero.len()
            )));
        }
        let mut it = nonzero.into_iter();
        let mut next = || it.next().unwrap_or_else(Rational::zero);
        P1Pair::new(next(), next(), next())
    }

    pub fn coeffs(&self) -> &[Rational; 3] {
        &self.coeffs
    }

    pub fn degree(&self) -> Rational {
        self.coeffs.iter().sum()
    }

    pub fn marked_points(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl std::fmt::Display for P1Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c] = &self.coeffs;
        write!(f, "({a}, {b}, {c})")
    }
}

/// A witness monomial `x^i y^j` of `x^{a₁} y^{a₂} (x+y)^{a₃}` at `q = p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FRegCertificate {
    pub p: u64,
    pub e: u32,
    #[serde(with = "decimal::triple")]
    pub a: [BigUint; 3],
    #[serde(with = "decimal::pair")]
    pub witness: (BigUint, BigUint),
}

impl FRegCertificate {
    /// Rechecks the witness and that the exponents belong to `pair`.
    pub fn verify_for(&self, pair: &P1Pair) -> bool {
        fedder_exponents(pair, self.p, self.e) == self.a
            && verify_witness(&self.a, &self.witness.0, &self.witness.1, self.p, self.e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularReason {
    Certificate(FRegCertificate),
    /// At most two marked points: the pair is toric.
    Toric { points: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FRegVerdict {
    Regular { reason: RegularReason },
    /// `deg D >= 2`, so `-(K + D)` is not big.
    NotRegular { degree: Rational },
    /// No witness for any `e <= e_max`. The monomial test is only
    /// sufficient, so this is not a negative answer.
    Inconclusive { e_max: u32 },
}

impl FRegVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, FRegVerdict::Regular { .. })
    }

    pub fn certificate(&self) -> Option<&FRegCertificate> {
        match self {
            FRegVerdict::Regular {
                reason: RegularReason::Certificate(c),
            } => Some(c),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FRegVerdict::Regular { .. } => "regular",
            FRegVerdict::NotRegular { .. } => "not-regular",
            FRegVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn frobenius_modulus(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize) - 1u32
}

/// `aₘ = ⌈(p^e - 1)·cₘ⌉`.
pub fn fedder_exponents(pair: &P1Pair, p: u64, e: u32) -> [BigUint; 3] {
    let m = frobenius_modulus(p, e);
    pair.coeffs.clone().map(|c| ceil_mul(&c, &m))
}

/// Whether `x^i y^j` occurs in `x^{a₁} y^{a₂} (x+y)^{a₃}` mod `p`, with
/// `i, j <= p^e - 2`.
pub fn verify_witness(a: &[BigUint; 3], i: &BigUint, j: &BigUint, p: u64, e: u32) -> bool {
    if !is_prime(p) || e == 0 {
        return false;
    }
    let bound = frobenius_modulus(p, e) - 1u32;
    let [a1, a2, a3] = a;
    if i + j != a1 + a2 + a3 || i < a1 || j < a2 || *i > bound || *j > bound {
        return false;
    }
    binom_nonzero_mod_p(a3, &(i - a1), p).unwrap_or(false)
}

/// Runs the monomial test at a single `e`, returning the witness with the
/// smallest power of `x`.
pub fn test_at(pair: &P1Pair, p: u64, e: u32) -> Result<Option<FRegCertificate>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::InvalidArgument("e must be positive".into()));
    }
    let a = fedder_exponents(pair, p, e);
    let bound: BigInt = BigInt::from(frobenius_modulus(p, e)) - 1;
    let [a1, a2, a3]: [BigInt; 3] = a.clone().map(BigInt::from);
    let lo = (&a2 + &a3 - &bound).max(BigInt::zero());
    let hi = (&bound - &a1).min(a3.clone());
    let Some(k) = exists_dominated_in_interval(a3.magnitude(), &lo, &hi, p, e as usize)? else {
        return Ok(None);
    };
    let i = a1.magnitude() + &k;
    let j = a2.magnitude() + a3.magnitude() - &k;
    Ok(Some(FRegCertificate {
        p,
        e,
        a,
        witness: (i, j),
    }))
}

/// Degree precheck, toric shortcut, then the monomial test for
/// `e = 1..=e_max`.
pub fn is_globally_f_regular(pair: &P1Pair, p: u64, e_max: u32) -> Result<FRegVerdict> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let degree = pair.degree();
    if degree >= Rational::from(2) {
        return Ok(FRegVerdict::NotRegular { degree });
    }
    let points = pair.marked_points();
    if points <= 2 {
        return Ok(FRegVerdict::Regular {
            reason: RegularReason::Toric { points },
        });
    }
    for e in 1..=e_max {
        if let Some(cert) = test_at(pair, p, e)? {
            return Ok(FRegVerdict::Regular {
                reason: RegularReason::Certificate(cert),
            });
        }
    }
    Ok(FRegVerdict::Inconclusive { e_max })
}

/// The two boundaries every standard triple reduces to.
pub fn d1() -> P1Pair {
    P1Pair::new(Rational::new(2, 5), Rational::new(2, 3), Rational::new(5, 6)).unwrap()
}

pub fn d2() -> P1Pair {
    P1Pair::new(Rational::new(1, 3), Rational::new(3, 4), Rational::new(3, 4)).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaraCase {
    D1,
    D2,
}

impl HaraCase {
    pub fn pair(self) -> P1Pair {
        match self {
            HaraCase::D1 => d1(),
            HaraCase::D2 => d2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HaraCase::D1 => "D1",
            HaraCase::D2 => "D2",
        }
    }

    /// Primes `> 5` for which the exponent-one test fails and `e = 2` is
    /// needed.
    pub fn needs_second_power(self, p: u64) -> bool {
        match self {
            HaraCase::D1 => p < 31,
            HaraCase::D2 => p < 13,
        }
    }
}

/// Reference row at `e = 2`: exponents and a known witness `(i, j)`.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceRow {
    pub case: HaraCase,
    pub p: u64,
    pub a: [u64; 3],
    pub witness: (u64, u64),
}

pub const REFERENCE_ROWS: [ReferenceRow; 9] = [
    ReferenceRow { case: HaraCase::D1, p: 7, a: [20, 32, 40], witness: (46, 46) },
    ReferenceRow { case: HaraCase::D1, p: 11, a: [48, 80, 100], witness: (115, 113) },
    ReferenceRow { case: HaraCase::D1, p: 13, a: [68, 112, 140], witness: (166, 154) },
    ReferenceRow { case: HaraCase::D1, p: 17, a: [116, 192, 240], witness: (287, 261) },
    ReferenceRow { case: HaraCase::D1, p: 19, a: [144, 240, 300], witness: (357, 327) },
    ReferenceRow { case: HaraCase::D1, p: 23, a: [212, 352, 440], witness: (491, 513) },
    ReferenceRow { case: HaraCase::D1, p: 29, a: [336, 560, 700], witness: (775, 821) },
    ReferenceRow { case: HaraCase::D2, p: 7, a: [16, 36, 36], witness: (44, 44) },
    ReferenceRow { case: HaraCase::D2, p: 11, a: [40, 90, 90], witness: (108, 112) },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaraRow {
    pub case: HaraCase,
    pub p: u64,
    pub e: u32,
    #[serde(with = "decimal::triple")]
    pub a: [BigUint; 3],
    /// Canonical (smallest `i`) witness, if one exists at this `e`.
    #[serde(with = "decimal::opt_pair")]
    pub witness: Option<(BigUint, BigUint)>,
    pub verified: bool,
    /// Reference exponents agree with the recomputed ones.
    pub reference_exponents_match: Option<bool>,
    pub reference_witness: Option<(u64, u64)>,
    pub reference_witness_verified: Option<bool>,
}

impl HaraRow {
    pub fn passes(&self) -> bool {
        self.verified
            && self.reference_exponents_match != Some(false)
            && self.reference_witness_verified != Some(false)
    }
}

fn hara_row(case: HaraCase, p: u64, e_max: u32) -> Result<HaraRow> {
    let pair = case.pair();
    let reference = REFERENCE_ROWS.iter().find(|r| r.case == case && r.p == p);
    let (e, cert) = match reference {
        Some(_) => (2, test_at(&pair, p, 2)?),
        None => {
            let mut found = (e_max, None);
            for e in 1..=e_max {
                if let Some(c) = test_at(&pair, p, e)? {
                    found = (e, Some(c));
                    break;
                }
            }
            found
        }
    };
    let a = fedder_exponents(&pair, p, e);
    let witness = cert.map(|c| c.witness);
    let verified = witness
        .as_ref()
        .is_some_and(|(i, j)| verify_witness(&a, i, j, p, e));
    let reference_exponents_match = reference.map(|r| r.a.map(BigUint::from) == a);
    let reference_witness_verified = reference.map(|r| {
        verify_witness(
            &r.a.map(BigUint::from),
            &BigUint::from(r.witness.0),
            &BigUint::from(r.witness.1),
            p,
            2,
        )
    });
    Ok(HaraRow {
        case,
        p,
        e,
        a,
        witness,
        verified,
        reference_exponents_match,
        reference_witness: reference.map(|r| r.witness),
        reference_witness_verified,
    })
}

/// Table of `D₁` rows for every prime and `D₂` rows for the primes where
/// `D₂` needs `e = 2`. Reference rows use `e = 2`; other rows use the
/// smallest successful `e <= e_max`. Sorted by `(case, p)`.
pub fn hara_table(primes: &[u64], e_max: u32) -> Result<Vec<HaraRow>> {
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
    }
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let jobs: Vec<(HaraCase, u64)> = [HaraCase::D1, HaraCase::D2]
        .into_iter()
        .flat_map(|case| {
            primes
                .iter()
                .filter(move |&&p| case == HaraCase::D1 || case.needs_second_power(p))
                .map(move |&p| (case, p))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(case, p)| hara_row(case, p, e_max))
        .collect()
}

/// Decimal-string serde for big exponents.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    fn parse<E: serde::de::Error>(s: &str) -> Result<BigUint, E> {
        s.parse().map_err(E::custom)
    }

    pub mod triple {
        use super::*;

        pub fn serialize<S: Serializer>(a: &[BigUint; 3], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(a.iter().map(ToString::to_string))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigUint; 3], D::Error> {
            let [x, y, z] = <[String; 3]>::deserialize(d)?;
            Ok([parse(&x)?, parse(&y)?, parse(&z)?])
        }
    }

    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(a: &(BigUint, BigUint), s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq([a.0.to_string(), a.1.to_string()])
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<(BigUint, BigUint), D::Error> {
            let [x, y] = <[String; 2]>::deserialize(d)?;
            Ok((parse(&x)?, parse(&y)?))
        }
    }

    pub mod opt_pair {
        use super::*;

        pub fn serialize<S: Serializer>(
            a: &Option<(BigUint, BigUint)>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match a {
                Some(w) => super::pair::serialize(w, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<(BigUint, BigUint)>, D::Error> {
            let v = Option::<[String; 2]>::deserialize(d)?;
            v.map(|[x, y]| Ok((parse(&x)?, parse(&y)?))).transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn exps(a: [u64; 3]) -> [BigUint; 3] {
        a.map(BigUint::from)
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(fedder_exponents(&d1(), 7, 2), exps([20, 32, 40]));
        assert_eq!(fedder_exponents(&d2(), 7, 2), exps([16, 36, 36]));
        let zero = P1Pair::new(q(0, 1), q(0, 1), q(0, 1)).unwrap();
        assert_eq!(fedder_exponents(&zero, 11, 3), exps([0, 0, 0]));
    }

    #[test]
    fn witness_examples() {
        assert!(verify_witness(&exps([20, 32, 40]), &big(46), &big(46), 7, 2));
        assert!(verify_witness(&exps([48, 80, 100]), &big(115), &big(113), 11, 2));
        assert!(!verify_witness(&exps([20, 32, 40]), &big(47), &big(45), 7, 2));
        // degree mismatch and the i, j <= p^e - 2 bound
        assert!(!verify_witness(&exps([20, 32, 40]), &big(46), &big(45), 7, 2));
        assert!(!verify_witness(&exps([0, 0, 48]), &big(48), &big(0), 7, 2));
    }

    #[test]
    fn test_at_examples() {
        let c = test_at(&d1(), 7, 2).unwrap().unwrap();
        assert_eq!(c.a, exps([20, 32, 40]));
        assert!(c.verify_for(&d1()));
        let c = test_at(&d1(), 37, 1).unwrap().unwrap();
        assert!(c.verify_for(&d1()));
        let zero = P1Pair::new(q(0, 1), q(0, 1), q(0, 1)).unwrap();
        let c = test_at(&zero, 7, 1).unwrap().unwrap();
        assert_eq!(c.witness, (big(0), big(0)));
        assert!(test_at(&d1(), 29, 1).unwrap().is_none());
    }

    #[test]
    fn verdict_examples() {
        assert!(is_globally_f_regular(&d1(), 7, 2).unwrap().is_regular());
        let cy = P1Pair::new(q(1, 2), q(2, 3), q(5, 6)).unwrap();
        for p in [7, 11, 101] {
            assert_eq!(
                is_globally_f_regular(&cy, p, 3).unwrap(),
                FRegVerdict::NotRegular { degree: q(2, 1) }
            );
        }
        let one_point = P1Pair::new(q(1, 2), q(0, 1), q(0, 1)).unwrap();
        assert_eq!(
            is_globally_f_regular(&one_point, 7, 1).unwrap(),
            FRegVerdict::Regular {
                reason: RegularReason::Toric { points: 1 }
            }
        );
        assert_eq!(is_globally_f_regular(&d1(), 9, 2), Err(Error::NotPrime(9)));
    }

    #[test]
    fn pair_validation() {
        assert!(P1Pair::new(q(1, 1), q(0, 1), q(0, 1)).is_err());
        assert!(P1Pair::from_points(&vec![q(1, 2); 4]).is_err());
        let p = P1Pair::from_points(&[q(1, 2), q(0, 1), q(1, 2), q(0, 1), q(1, 3)]).unwrap();
        assert_eq!(p.coeffs(), &[q(1, 2), q(1, 2), q(1, 3)]);
    }

    #[test]
    fn certificate_json_roundtrip() {
        let c = test_at(&d1(), 7, 2).unwrap().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#""a":["20","32","40"]"#), "{json}");
        let back: FRegCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
