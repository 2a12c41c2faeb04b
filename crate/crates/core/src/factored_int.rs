//! Positive integers stored as prime → exponent maps.
//!
//! Every order, codegree and index handled by the verifier is a
//! [`FactoredInteger`]. Divisibility, valuations and parity become exponent
//! comparisons, and nothing ever goes through floating point. The machine
//! value is only materialized on demand by [`FactoredInteger::to_int`], which
//! uses a 128-bit accumulator and refuses values at or above 2¹²⁷.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

/// Exclusive upper bound for [`FactoredInteger::to_int`] and
/// [`FactoredInteger::factorize`].
pub const INT_LIMIT: u128 = 1u128 << 127;

/// Errors raised by the arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// `factorize(0)`: zero has no factorization.
    Zero,
    /// The value is not below 2¹²⁷.
    Overflow,
    /// A prime factor does not fit in 64 bits (never happens for in-scope data).
    PrimeTooLarge,
    /// A key handed to a constructor is not prime.
    NotPrime(u64),
    /// `div_exact(a, b)` with `b ∤ a`; carries the first offending prime.
    NotDivisible { prime: u64 },
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::Zero => write!(f, "zero has no prime factorization"),
            ArithError::Overflow => write!(f, "value does not fit below 2^127"),
            ArithError::PrimeTooLarge => write!(f, "prime factor exceeds 64 bits"),
            ArithError::NotPrime(p) => write!(f, "{p} is not prime"),
            ArithError::NotDivisible { prime } => {
                write!(f, "exact division failed at prime {prime}")
            }
        }
    }
}

/// Errors from parsing the textual form `2^8*3^2*5^2*17`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseFactoredError {
    Empty,
    /// A token is not of the form `p` or `p^e`.
    BadToken(String),
    /// A base is not prime.
    NotPrime(u64),
    /// Exponents must be written only when ≥ 2 (`p^1` and `p^0` are rejected).
    BadExponent(String),
    /// Primes must appear strictly ascending.
    NotAscending,
}

impl fmt::Display for ParseFactoredError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseFactoredError::Empty => write!(f, "empty factorization"),
            ParseFactoredError::BadToken(t) => write!(f, "malformed factor `{t}`"),
            ParseFactoredError::NotPrime(p) => write!(f, "base {p} is not prime"),
            ParseFactoredError::BadExponent(t) => write!(f, "bad exponent in `{t}`"),
            ParseFactoredError::NotAscending => write!(f, "primes must be strictly ascending"),
        }
    }
}

/// A positive integer as a map from prime to exponent ≥ 1; the empty map is 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FactoredInteger {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInteger {
    /// The empty product.
    pub fn one() -> Self {
        FactoredInteger { factors: BTreeMap::new() }
    }

    /// Builds `p^e`, checking that `p` is prime. `e = 0` gives 1.
    pub fn prime_power(p: u64, e: u32) -> Result<Self, ArithError> {
        Self::from_factors([(p, e)])
    }

    /// Builds a value from `(prime, exponent)` pairs. Repeated primes are
    /// merged, zero exponents dropped, and every key is checked for primality.
    pub fn from_factors<I>(pairs: I) -> Result<Self, ArithError>
    where
        I: IntoIterator<Item = (u64, u32)>,
    {
        let mut factors = BTreeMap::new();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(ArithError::NotPrime(p));
            }
            if e > 0 {
                *factors.entry(p).or_insert(0) += e;
            }
        }
        Ok(FactoredInteger { factors })
    }

    /// Factorizes `n` by trial division, stopping early once the remaining
    /// cofactor passes a deterministic primality test.
    ///
    /// Accepts `1 ≤ n < 2¹²⁷`. Every in-scope input has only small prime
    /// factors, so trial division is fast. A cofactor that is a product of two
    /// huge primes would be slow, and that case is deliberately out of scope.
    pub fn factorize(n: u128) -> Result<Self, ArithError> {
        if n == 0 {
            return Err(ArithError::Zero);
        }
        if n >= INT_LIMIT {
            return Err(ArithError::Overflow);
        }
        let mut factors = BTreeMap::new();
        let mut rest = n;
        let push = |p: u128, factors: &mut BTreeMap<u64, u32>| -> Result<(), ArithError> {
            let p = u64::try_from(p).map_err(|_| ArithError::PrimeTooLarge)?;
            *factors.entry(p).or_insert(0) += 1;
            Ok(())
        };
        for p in [2u128, 3, 5] {
            while rest % p == 0 {
                rest /= p;
                push(p, &mut factors)?;
            }
        }
        // 30-wheel: candidates coprime to 2, 3 and 5.
        const STEPS: [u128; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
        let mut d: u128 = 7;
        let mut step = 0;
        let mut check_prime = true;
        while rest > 1 {
            if check_prime {
                if is_prime_u128(rest) {
                    push(rest, &mut factors)?;
                    break;
                }
                check_prime = false;
            }
            if d * d > rest {
                push(rest, &mut factors)?;
                break;
            }
            if rest % d == 0 {
                while rest % d == 0 {
                    rest /= d;
                    push(d, &mut factors)?;
                }
                check_prime = true;
            }
            d += STEPS[step];
            step = (step + 1) % STEPS.len();
        }
        Ok(FactoredInteger { factors })
    }

    /// Convenience constructor for non-zero machine integers.
    ///
    /// # Panics
    /// Panics when `n == 0`.
    pub fn of(n: u64) -> Self {
        Self::factorize(u128::from(n)).expect("FactoredInteger::of(0)")
    }

    /// Iterates `(prime, exponent)` in ascending prime order.
    pub fn factors(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    /// The primes dividing the value, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when the value is `p^a` with `a ≥ 1` for a single prime `p`.
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// Product; exponentwise sum. The factored form itself never overflows.
    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        FactoredInteger { factors }
    }

    /// Exact quotient `self / other`; fails unless `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Result<Self, ArithError> {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            match factors.get_mut(&p) {
                Some(a) if *a > e => *a -= e,
                Some(a) if *a == e => {
                    factors.remove(&p);
                }
                _ => return Err(ArithError::NotDivisible { prime: p }),
            }
        }
        Ok(FactoredInteger { factors })
    }

    /// `self | other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.factors
            .iter()
            .all(|(p, &e)| other.factors.get(p).is_some_and(|&b| b >= e))
    }

    /// ν_p: the exponent of `p`, zero when absent.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn is_odd(&self) -> bool {
        self.valuation(2) == 0
    }

    /// `self^k`.
    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        FactoredInteger {
            factors: self.factors.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    /// The p-part `p^{ν_p(self)}`.
    pub fn p_part(&self, p: u64) -> Self {
        let mut factors = BTreeMap::new();
        if let Some(&e) = self.factors.get(&p) {
            factors.insert(p, e);
        }
        FactoredInteger { factors }
    }

    /// The p′-part: the value with every factor of `p` removed.
    pub fn p_prime_part(&self, p: u64) -> Self {
        let mut factors = self.factors.clone();
        factors.remove(&p);
        FactoredInteger { factors }
    }

    /// Greatest common divisor (exponentwise minimum).
    pub fn gcd(&self, other: &Self) -> Self {
        FactoredInteger {
            factors: self
                .factors
                .iter()
                .filter_map(|(&p, &e)| other.factors.get(&p).map(|&b| (p, e.min(b))))
                .collect(),
        }
    }

    /// The machine value, if it is below 2¹²⁷.
    pub fn to_int(&self) -> Result<u128, ArithError> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                acc = acc
                    .checked_mul(u128::from(p))
                    .filter(|&v| v < INT_LIMIT)
                    .ok_or(ArithError::Overflow)?;
            }
        }
        Ok(acc)
    }

    /// The machine value, if it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        self.to_int().ok().and_then(|v| u64::try_from(v).ok())
    }

    /// Little-endian base-2³² limbs of the exact value (used for ordering
    /// values beyond the 128-bit window).
    fn limbs(&self) -> Vec<u32> {
        let mut limbs = alloc::vec![1u32];
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                // p < 2^64 is split into two 32-bit halves and multiplied in.
                let lo = p & 0xffff_ffff;
                let hi = p >> 32;
                let a = mul_small(&limbs, lo as u32);
                limbs = if hi == 0 {
                    a
                } else {
                    let mut b = alloc::vec![0u32];
                    b.extend(mul_small(&limbs, hi as u32));
                    add_limbs(&a, &b)
                };
            }
        }
        while limbs.len() > 1 && *limbs.last().unwrap() == 0 {
            limbs.pop();
        }
        limbs
    }
}

fn mul_small(a: &[u32], m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut carry = 0u64;
    for &x in a {
        let t = u64::from(x) * u64::from(m) + carry;
        out.push(t as u32);
        carry = t >> 32;
    }
    out.push(carry as u32);
    out
}

fn add_limbs(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n + 1);
    let mut carry = 0u64;
    for i in 0..n {
        let t = u64::from(*a.get(i).unwrap_or(&0)) + u64::from(*b.get(i).unwrap_or(&0)) + carry;
        out.push(t as u32);
        carry = t >> 32;
    }
    out.push(carry as u32);
    out
}

fn cmp_limbs(a: &[u32], b: &[u32]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

impl Ord for FactoredInteger {
    /// Numeric order.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.to_int(), other.to_int()) {
            (Ok(a), Ok(b)) => a.cmp(&b),
            _ => cmp_limbs(&self.limbs(), &other.limbs()),
        }
    }
}

impl PartialOrd for FactoredInteger {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_decimal(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for FactoredInteger {
    type Err = ParseFactoredError;

    /// Accepts exactly `1` or `p1^e1*p2*...` with strictly ascending primes,
    /// no whitespace, and exponents written only when at least 2.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ParseFactoredError::Empty);
        }
        if s == "1" {
            return Ok(Self::one());
        }
        let mut factors = BTreeMap::new();
        let mut last = 0u64;
        for tok in s.split('*') {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e = parse_decimal(e)
                        .and_then(|e| u32::try_from(e).ok())
                        .ok_or_else(|| ParseFactoredError::BadToken(tok.into()))?;
                    if e < 2 {
                        return Err(ParseFactoredError::BadExponent(tok.into()));
                    }
                    (b, e)
                }
                None => (tok, 1),
            };
            let p = parse_decimal(base).ok_or_else(|| ParseFactoredError::BadToken(tok.into()))?;
            if !is_prime(p) {
                return Err(ParseFactoredError::NotPrime(p));
            }
            if p <= last {
                return Err(ParseFactoredError::NotAscending);
            }
            last = p;
            factors.insert(p, exp);
        }
        Ok(FactoredInteger { factors })
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for FactoredInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for FactoredInteger {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // m < 2^127, so a + a never overflows.
    if let (Ok(a64), Ok(b64)) = (u64::try_from(a), u64::try_from(b)) {
        return (u128::from(a64) * u128::from(b64)) % m;
    }
    let (mut a, mut b, mut acc) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Miller–Rabin with the first twelve prime bases: deterministic for
/// n < 3.3·10²⁴ and a strong probable-prime test beyond (only reachable for
/// cofactors of inputs far outside the verifier's data).
fn is_prime_u128(n: u128) -> bool {
    const BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    is_prime_u128(u128::from(n))
}

/// If `n = p^a` for a prime `p` and `a ≥ 1`, returns `(p, a)`.
pub fn prime_power_decomposition(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = FactoredInteger::of(n);
    let mut it = f.factors();
    match (it.next(), it.next()) {
        (Some(pe), None) => Some(pe),
        _ => None,
    }
}
