//! Base-`p` digit combinatorics.
//!
//! By Lucas' theorem `C(n, k) mod p` is the product of the digitwise
//! binomials, so `C(n, k) ≢ 0 (mod p)` exactly when every base-`p` digit of
//! `k` is at most the corresponding digit of `n`. The interval search below
//! looks for such a `k` with a digit DP instead of scanning the interval, so
//! it stays linear in the number of digits even for exponents with 10^5
//! digits.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::Rational;

/// Deterministic trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 || p % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 || p % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes in `lo..=hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

fn check_prime(p: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    u32::try_from(p).map_err(|_| Error::InvalidArgument(format!("prime {p} exceeds 32 bits")))
}

/// Little-endian base-`p` expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitVector {
    base: u32,
    digits: Vec<u32>,
}

impl DigitVector {
    /// Expansion of `n`, padded with zeros to at least `min_len` digits.
    pub fn from_biguint(n: &BigUint, base: u32, min_len: usize) -> Self {
        assert!(base >= 2);
        let mut digits = Vec::with_capacity(min_len);
        // peel off as many digits per bignum division as fit in a u64
        let mut chunk_len = 1usize;
        let mut chunk = base as u64;
        while let Some(next) = chunk.checked_mul(base as u64) {
            chunk = next;
            chunk_len += 1;
        }
        let divisor = BigUint::from(chunk);
        let mut rest = n.clone();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(&divisor);
            let mut r = r.to_u64().expect("remainder below a u64 modulus");
            if q.is_zero() {
                while r > 0 {
                    digits.push((r % base as u64) as u32);
                    r /= base as u64;
                }
            } else {
                for _ in 0..chunk_len {
                    digits.push((r % base as u64) as u32);
                    r /= base as u64;
                }
            }
            rest = q;
        }
        if digits.len() < min_len {
            digits.resize(min_len, 0);
        }
        DigitVector { base, digits }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Number of digits up to and including the most significant nonzero one.
    pub fn significant_len(&self) -> usize {
        self.digits.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1)
    }

    pub fn digit(&self, i: usize) -> u32 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn to_biguint(&self) -> BigUint {
        let base = self.base as u64;
        let mut chunk_len = 1usize;
        let mut chunk = base;
        while let Some(next) = chunk.checked_mul(base) {
            chunk = next;
            chunk_len += 1;
        }
        let mut acc = BigUint::zero();
        let top = self.significant_len();
        let mut end = top;
        // Horner over chunks, most significant first
        let first = top % chunk_len;
        let mut cuts = Vec::new();
        if first > 0 {
            cuts.push(first);
        }
        while end > first {
            cuts.push(chunk_len);
            end -= chunk_len;
        }
        let mut hi = top;
        for len in cuts {
            let lo = hi - len;
            let mut word = 0u64;
            for i in (lo..hi).rev() {
                word = word * base + self.digits[i] as u64;
            }
            let mult = if len == chunk_len {
                chunk
            } else {
                base.pow(len as u32)
            };
            acc = acc * mult + word;
            hi = lo;
        }
        acc
    }

    /// True iff every digit of `self` is at most the matching digit of `other`.
    pub fn dominated_by(&self, other: &DigitVector) -> bool {
        assert_eq!(self.base, other.base);
        let len = self.digits.len().max(other.digits.len());
        (0..len).all(|i| self.digit(i) <= other.digit(i))
    }
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u128;
    let mut den = 1u128;
    let p128 = p as u128;
    for i in 0..k {
        num = num * ((n - i) as u128) % p128;
        den = den * ((i + 1) as u128) % p128;
    }
    (num * mod_inverse(den as u64, p) as u128 % p128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime and a is nonzero mod p
    let mut result = 1u128;
    let mut base = (a % p) as u128;
    let mut exp = p - 2;
    let m = p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    result as u64
}

/// `C(n, k) mod p`, digit by digit.
pub fn binom_mod_p(n: &BigUint, k: &BigUint, p: u64) -> Result<u64> {
    let base = check_prime(p)?;
    if k > n {
        return Ok(0);
    }
    let nd = DigitVector::from_biguint(n, base, 0);
    let kd = DigitVector::from_biguint(k, base, 0);
    let mut acc = 1u64;
    for i in 0..nd.digits.len() {
        let (ni, ki) = (nd.digit(i) as u64, kd.digit(i) as u64);
        if ki > ni {
            return Ok(0);
        }
        acc = ((acc as u128 * small_binom_mod(ni, ki, p) as u128) % p as u128) as u64;
    }
    Ok(acc)
}

/// Whether `C(n, k) ≢ 0 (mod p)`, i.e. the digits of `k` sit under those of
/// `n`. Cheaper than [`binom_mod_p`] when only nonvanishing matters.
pub fn binom_nonzero_mod_p(n: &BigUint, k: &BigUint, p: u64) -> Result<bool> {
    let base = check_prime(p)?;
    if k > n {
        return Ok(false);
    }
    let nd = DigitVector::from_biguint(n, base, 0);
    let kd = DigitVector::from_biguint(k, base, 0);
    Ok(kd.dominated_by(&nd))
}

/// `⌈m·c⌉` for `c >= 0`.
pub fn ceil_mul(c: &Rational, m: &BigUint) -> BigUint {
    assert!(!c.is_negative(), "ceil_mul expects a nonnegative coefficient");
    let num = c.numer().magnitude() * m;
    let den = c.denom().magnitude();
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

fn clamp_to_biguint(x: &BigInt) -> BigUint {
    match x.sign() {
        Sign::Minus => BigUint::zero(),
        _ => x.magnitude().clone(),
    }
}

const FREE: usize = 0b00;
const TIGHT_LO: usize = 0b01;
const TIGHT_HI: usize = 0b10;

/// Smallest `k` in `[max(lo, 0), min(hi, p^e - 1)]` whose base-`p` digits are
/// all at most those of `a`, or `None` if there is none.
///
/// `a` must fit in `e` digits. The search is a digit DP over the states
/// "still equal to the lower bound" / "still equal to the upper bound":
/// feasibility is tabulated from the least significant digit up, then the
/// witness is read off greedily from the top.
pub fn exists_dominated_in_interval(
    a: &BigUint,
    lo: &BigInt,
    hi: &BigInt,
    p: u64,
    e: usize,
) -> Result<Option<BigUint>> {
    let base = check_prime(p)?;
    if e == 0 {
        return Err(Error::InvalidArgument("digit length must be positive".into()));
    }
    if hi.sign() == Sign::Minus || hi < lo {
        return Ok(None);
    }
    let ad = DigitVector::from_biguint(a, base, e);
    if ad.digits.len() > e {
        return Err(Error::InvalidArgument(format!(
            "{a} needs more than {e} base-{p} digits"
        )));
    }
    let lo = clamp_to_biguint(lo);
    let hi = clamp_to_biguint(hi);
    let ld = DigitVector::from_biguint(&lo, base, e);
    if ld.digits.len() > e {
        // lo >= p^e: nothing representable
        return Ok(None);
    }
    let mut hd = DigitVector::from_biguint(&hi, base, e);
    if hd.digits.len() > e {
        hd = DigitVector {
            base,
            digits: vec![base - 1; e],
        };
    }
    Ok(dominated_search(&ad.digits, &ld.digits, &hd.digits, base).map(|digits| {
        DigitVector { base, digits }.to_biguint()
    }))
}

/// Core DP on equal-length little-endian digit slices.
fn dominated_search(a: &[u32], lo: &[u32], hi: &[u32], base: u32) -> Option<Vec<u32>> {
    let e = a.len();
    let step = |pos: usize, state: usize, d: u32| -> usize {
        let mut next = FREE;
        if state & TIGHT_LO != 0 && d == lo[pos] {
            next |= TIGHT_LO;
        }
        if state & TIGHT_HI != 0 && d == hi[pos] {
            next |= TIGHT_HI;
        }
        next
    };
    let range = |pos: usize, state: usize| -> (u32, u32) {
        let from = if state & TIGHT_LO != 0 { lo[pos] } else { 0 };
        let to = if state & TIGHT_HI != 0 { hi[pos] } else { base - 1 };
        (from, to.min(a[pos]))
    };

    // feasible[i][s]: the lowest i digits can be completed from state s
    let mut feasible = vec![[false; 4]; e + 1];
    feasible[0] = [true; 4];
    for i in 1..=e {
        let pos = i - 1;
        for state in 0..4 {
            let (from, to) = range(pos, state);
            feasible[i][state] = (from..=to).any(|d| feasible[i - 1][step(pos, state, d)]);
        }
    }

    let mut state = TIGHT_LO | TIGHT_HI;
    if !feasible[e][state] {
        return None;
    }
    let mut digits = vec![0u32; e];
    for i in (1..=e).rev() {
        let pos = i - 1;
        let (from, to) = range(pos, state);
        let d = (from..=to)
            .find(|&d| feasible[i - 1][step(pos, state, d)])
            .expect("feasible state has a successor");
        digits[pos] = d;
        state = step(pos, state, d);
    }
    Some(digits)
}
