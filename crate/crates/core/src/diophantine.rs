//! Exact root finding for the closed-form codegree expressions of the
//! parametric candidate families, plus the small residue, parity and
//! valuation helpers the eliminations rely on.
//!
//! Every expression is strictly increasing in its parameter on the domain it
//! is used with, so a target has at most one preimage per branch. Polynomial
//! branches are solved by doubling and bisection over the integers, followed
//! by an admissibility test; expressions only defined on a geometric sequence
//! of parameters (e.g. powers of three) walk that sequence instead. Every
//! answer carries a bracket that can be re-evaluated independently.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::catalog::CodegreeSet;
use crate::factored_int::{is_prime, prime_power_decomposition, FactoredInteger};

// ---------------------------------------------------------------------------
// Parameter domains
// ---------------------------------------------------------------------------

/// Coarse shape of an admissible parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// 2^f, f ≥ 1.
    PowerOfTwo,
    /// 2^(2f+1).
    OddPowerOfTwo,
    /// 3^(2f+1).
    OddPowerOfThree,
    /// Any prime power p^f, f ≥ 1.
    PrimePower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// `x mod modulus ∈ residues`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub modulus: u64,
    pub residues: &'static [u64],
}

/// The admissibility predicate of a family parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamDomain {
    pub shape: Shape,
    /// Admissible parameters are strictly greater than this.
    pub min_exclusive: u64,
    pub parity: Option<Parity>,
    pub congruence: Option<Congruence>,
}

impl ParamDomain {
    pub fn admits(&self, x: u64) -> bool {
        if x <= self.min_exclusive {
            return false;
        }
        let shape_ok = match (self.shape, prime_power_decomposition(x)) {
            (_, None) => false,
            (Shape::PowerOfTwo, Some((p, _))) => p == 2,
            (Shape::OddPowerOfTwo, Some((p, f))) => p == 2 && f % 2 == 1,
            (Shape::OddPowerOfThree, Some((p, f))) => p == 3 && f % 2 == 1,
            (Shape::PrimePower, Some(_)) => true,
        };
        let parity_ok = match self.parity {
            None => true,
            Some(Parity::Odd) => x % 2 == 1,
            Some(Parity::Even) => x % 2 == 0,
        };
        let congruence_ok = self.congruence.is_none_or(|c| c.residues.contains(&(x % c.modulus)));
        shape_ok && parity_ok && congruence_ok
    }

    /// True when the admissible parameters form a geometric sequence.
    pub fn is_geometric(&self) -> bool {
        !matches!(self.shape, Shape::PrimePower) || self.parity == Some(Parity::Even)
    }

    /// The least admissible parameter strictly greater than `x`, if it fits
    /// in 64 bits.
    pub fn next_after(&self, x: u64) -> Option<u64> {
        let (base, step) = match self.shape {
            // Even prime powers are powers of two.
            Shape::PowerOfTwo | Shape::PrimePower if self.parity == Some(Parity::Even) => (2u64, 2u64),
            Shape::PowerOfTwo => (2, 2),
            Shape::OddPowerOfTwo => (2, 4),
            Shape::OddPowerOfThree => (3, 9),
            Shape::PrimePower => {
                let mut y = x.max(self.min_exclusive).checked_add(1)?;
                while !self.admits(y) {
                    y = y.checked_add(1)?;
                }
                return Some(y);
            }
        };
        let mut y = base;
        loop {
            if y > x && self.admits(y) {
                return Some(y);
            }
            y = y.checked_mul(step)?;
        }
    }

    /// Admissible parameters in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        core::iter::successors(self.next_after(0), move |&x| self.next_after(x))
    }
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// The closed-form codegree expressions that appear in the eliminations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ExprFamily {
    /// k² − 1, k = 2^f ≥ 4.
    K2m1,
    /// k(k − ε)/2 with ε = 1 for k ≡ 1 (mod 4) and −1 otherwise; k an odd
    /// prime power > 5.
    Psl2Half,
    /// (q − 1)(q² + 1), q = 2^(2f+1) ≥ 8.
    SzOdd,
    /// q³(q² + q + 1).
    Psl3Odd,
    /// q³(q² − q + 1).
    Psu3Odd,
    /// (q² + q + 1)(q² − 1)(q − 1).
    Psl3Even,
    /// (q² − q + 1)(q + 1)²(q − 1).
    Psu3Even,
    /// q³(q² + q + 1)/3.
    Psl3ThirdOdd,
    /// (q² + q + 1)(q² − 1)(q − 1)/3.
    Psl3ThirdEven,
    /// q³(q² − q + 1)/3.
    Psu3ThirdOdd,
    /// (q² − q + 1)(q + 1)²(q − 1)/3.
    Psu3ThirdEven,
    /// (q² + 1)(q − 1)²(q + 1)², q = 2^f > 4.
    Sp4Odd,
    /// q⁴(q − 1)², q = 2^f > 4.
    Sp4Q4,
    /// 2q³(q − 1)²(q + 1)², q = 2^f > 4.
    Sp4TwoQ3,
    /// 3^(5f+3)(q² − q + 1), q = 3^(2f+1) ≥ 27.
    Ree33,
    /// q³(q + 1 ∓ 3m), q = 3^(2f+1) ≥ 27, m ∈ {3^f} ∪ [1, q].
    ReePm,
    /// (q² − 1)(q² − q + 1), q = 3^(2f+1) ≥ 27.
    ReeQ2,
    /// (q⁶ − 1)(q² − 1), q ≥ 7 a prime power with q mod 6 ∈ {2, 3, 4}.
    G2Q61,
}

const ONE_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[1] });
const TWO_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[2] });
const NOT_ONE_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[0, 2] });
const NOT_TWO_MOD_3: Option<Congruence> = Some(Congruence { modulus: 3, residues: &[0, 1] });

const fn pp(min_exclusive: u64, parity: Option<Parity>, congruence: Option<Congruence>) -> ParamDomain {
    ParamDomain { shape: Shape::PrimePower, min_exclusive, parity, congruence }
}

const fn geometric(shape: Shape, min_exclusive: u64) -> ParamDomain {
    ParamDomain { shape, min_exclusive, parity: None, congruence: None }
}

/// A strictly increasing polynomial piece of an expression.
#[derive(Clone, Copy)]
struct Branch {
    name: &'static str,
    eval: fn(u128) -> Option<u128>,
    /// Extra condition a root of this piece must meet (beyond the domain).
    accept: fn(u64) -> bool,
    /// The piece equals `eval / scale`; roots are searched on `scale · target`.
    scale: u128,
}

fn any(_: u64) -> bool {
    true
}

fn mul_all(xs: &[u128]) -> Option<u128> {
    xs.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x))
}

fn psl3_odd(q: u128) -> Option<u128> {
    mul_all(&[q, q, q, q.checked_mul(q)?.checked_add(q + 1)?])
}
fn psu3_odd(q: u128) -> Option<u128> {
    mul_all(&[q, q, q, q.checked_mul(q)?.checked_sub(q)?.checked_add(1)?])
}
fn psl3_even(q: u128) -> Option<u128> {
    mul_all(&[q.checked_mul(q)?.checked_add(q + 1)?, q.checked_mul(q)?.checked_sub(1)?, q.checked_sub(1)?])
}
fn psu3_even(q: u128) -> Option<u128> {
    mul_all(&[q.checked_mul(q)?.checked_sub(q)?.checked_add(1)?, q + 1, q + 1, q.checked_sub(1)?])
}

const B_K2M1: &[Branch] = &[Branch { name: "k^2-1", eval: |k| k.checked_mul(k)?.checked_sub(1), accept: any, scale: 1 }];
const B_PSL2_HALF: &[Branch] = &[
    Branch { name: "k(k-1)/2", eval: |k| k.checked_mul(k.checked_sub(1)?), accept: |k| k % 4 == 1, scale: 2 },
    Branch { name: "k(k+1)/2", eval: |k| k.checked_mul(k + 1), accept: |k| k % 4 == 3, scale: 2 },
];
const B_SZ_ODD: &[Branch] = &[Branch {
    name: "(q-1)(q^2+1)",
    eval: |q| mul_all(&[q.checked_sub(1)?, q.checked_mul(q)?.checked_add(1)?]),
    accept: any,
    scale: 1,
}];
const B_PSL3_ODD: &[Branch] = &[Branch { name: "q^3(q^2+q+1)", eval: psl3_odd, accept: any, scale: 1 }];
const B_PSU3_ODD: &[Branch] = &[Branch { name: "q^3(q^2-q+1)", eval: psu3_odd, accept: any, scale: 1 }];
const B_PSL3_EVEN: &[Branch] = &[Branch { name: "(q^2+q+1)(q^2-1)(q-1)", eval: psl3_even, accept: any, scale: 1 }];
const B_PSU3_EVEN: &[Branch] = &[Branch { name: "(q^2-q+1)(q+1)^2(q-1)", eval: psu3_even, accept: any, scale: 1 }];
const B_PSL3_THIRD_ODD: &[Branch] = &[Branch { name: "q^3(q^2+q+1)/3", eval: psl3_odd, accept: any, scale: 3 }];
const B_PSL3_THIRD_EVEN: &[Branch] =
    &[Branch { name: "(q^2+q+1)(q^2-1)(q-1)/3", eval: psl3_even, accept: any, scale: 3 }];
const B_PSU3_THIRD_ODD: &[Branch] = &[Branch { name: "q^3(q^2-q+1)/3", eval: psu3_odd, accept: any, scale: 3 }];
const B_PSU3_THIRD_EVEN: &[Branch] =
    &[Branch { name: "(q^2-q+1)(q+1)^2(q-1)/3", eval: psu3_even, accept: any, scale: 3 }];
const B_SP4_ODD: &[Branch] = &[Branch {
    name: "(q^2+1)(q-1)^2(q+1)^2",
    eval: |q| {
        let m = q.checked_mul(q)?.checked_sub(1)?;
        mul_all(&[q.checked_mul(q)?.checked_add(1)?, m, m])
    },
    accept: any,
    scale: 1,
}];
const B_SP4_Q4: &[Branch] = &[Branch {
    name: "q^4(q-1)^2",
    eval: |q| mul_all(&[q, q, q, q, q.checked_sub(1)?, q.checked_sub(1)?]),
    accept: any,
    scale: 1,
}];
const B_SP4_TWO_Q3: &[Branch] = &[Branch {
    name: "2q^3(q-1)^2(q+1)^2",
    eval: |q| {
        let m = q.checked_mul(q)?.checked_sub(1)?;
        mul_all(&[2, q, q, q, m, m])
    },
    accept: any,
    scale: 1,
}];
const B_REE_Q2: &[Branch] = &[Branch {
    name: "(q^2-1)(q^2-q+1)",
    eval: |q| mul_all(&[q.checked_mul(q)?.checked_sub(1)?, q.checked_mul(q)?.checked_sub(q)?.checked_add(1)?]),
    accept: any,
    scale: 1,
}];
const B_G2_Q61: &[Branch] = &[Branch {
    name: "(q^6-1)(q^2-1)",
    eval: |q| {
        let q2 = q.checked_mul(q)?;
        mul_all(&[q2.checked_mul(q2)?.checked_mul(q2)?.checked_sub(1)?, q2.checked_sub(1)?])
    },
    accept: any,
    scale: 1,
}];
const B_REE_33: &[Branch] = &[Branch { name: "3^(5f+3)(q^2-q+1)", eval: ree33, accept: any, scale: 1 }];

/// 3^(5f+3)(q² − q + 1) where q = 3^(2f+1); `None` off that sequence.
fn ree33(q: u128) -> Option<u128> {
    let (p, e) = prime_power_decomposition(u64::try_from(q).ok()?)?;
    if p != 3 || e % 2 == 0 {
        return None;
    }
    let f = (e - 1) / 2;
    3u128.checked_pow(5 * f + 3)?.checked_mul(q.checked_mul(q)?.checked_sub(q)?.checked_add(1)?)
}

impl ExprFamily {
    pub const ALL: [ExprFamily; 18] = [
        ExprFamily::K2m1,
        ExprFamily::Psl2Half,
        ExprFamily::SzOdd,
        ExprFamily::Psl3Odd,
        ExprFamily::Psu3Odd,
        ExprFamily::Psl3Even,
        ExprFamily::Psu3Even,
        ExprFamily::Psl3ThirdOdd,
        ExprFamily::Psl3ThirdEven,
        ExprFamily::Psu3ThirdOdd,
        ExprFamily::Psu3ThirdEven,
        ExprFamily::Sp4Odd,
        ExprFamily::Sp4Q4,
        ExprFamily::Sp4TwoQ3,
        ExprFamily::Ree33,
        ExprFamily::ReePm,
        ExprFamily::ReeQ2,
        ExprFamily::G2Q61,
    ];

    /// Tag used in recipe files and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            ExprFamily::K2m1 => "K2M1",
            ExprFamily::Psl2Half => "PSL2_HALF",
            ExprFamily::SzOdd => "SZ_ODD",
            ExprFamily::Psl3Odd => "PSL3_ODD",
            ExprFamily::Psu3Odd => "PSU3_ODD",
            ExprFamily::Psl3Even => "PSL3_EVEN",
            ExprFamily::Psu3Even => "PSU3_EVEN",
            ExprFamily::Psl3ThirdOdd => "PSL3_THIRD_ODD",
            ExprFamily::Psl3ThirdEven => "PSL3_THIRD_EVEN",
            ExprFamily::Psu3ThirdOdd => "PSU3_THIRD_ODD",
            ExprFamily::Psu3ThirdEven => "PSU3_THIRD_EVEN",
            ExprFamily::Sp4Odd => "SP4_ODD",
            ExprFamily::Sp4Q4 => "SP4_Q4",
            ExprFamily::Sp4TwoQ3 => "SP4_2Q3",
            ExprFamily::Ree33 => "REE_33",
            ExprFamily::ReePm => "REE_PM",
            ExprFamily::ReeQ2 => "REE_Q2",
            ExprFamily::G2Q61 => "G2_Q61",
        }
    }

    /// The expression in the notation of the literature.
    pub fn formula(&self) -> &'static str {
        match self {
            ExprFamily::ReePm => "q^3(q+1-3m) or q^3(q+1+3m)",
            ExprFamily::Psl2Half => "k(k-e)/2",
            _ => self.branches()[0].name,
        }
    }

    /// Default parameter domain of the expression (that of the family it is
    /// quoted for). Solvers accept any other domain via [`solve_in`].
    pub fn domain(&self) -> ParamDomain {
        match self {
            ExprFamily::K2m1 => geometric(Shape::PowerOfTwo, 2),
            ExprFamily::Psl2Half => pp(5, Some(Parity::Odd), None),
            ExprFamily::SzOdd => geometric(Shape::OddPowerOfTwo, 2),
            ExprFamily::Psl3Odd => pp(4, Some(Parity::Odd), NOT_ONE_MOD_3),
            ExprFamily::Psu3Odd => pp(4, Some(Parity::Odd), NOT_TWO_MOD_3),
            ExprFamily::Psl3Even => pp(4, Some(Parity::Even), NOT_ONE_MOD_3),
            ExprFamily::Psu3Even => pp(4, Some(Parity::Even), NOT_TWO_MOD_3),
            ExprFamily::Psl3ThirdOdd => pp(4, Some(Parity::Odd), ONE_MOD_3),
            ExprFamily::Psl3ThirdEven => pp(4, Some(Parity::Even), ONE_MOD_3),
            ExprFamily::Psu3ThirdOdd => pp(4, Some(Parity::Odd), TWO_MOD_3),
            ExprFamily::Psu3ThirdEven => pp(4, Some(Parity::Even), TWO_MOD_3),
            ExprFamily::Sp4Odd | ExprFamily::Sp4Q4 | ExprFamily::Sp4TwoQ3 => geometric(Shape::PowerOfTwo, 4),
            ExprFamily::Ree33 | ExprFamily::ReePm | ExprFamily::ReeQ2 => geometric(Shape::OddPowerOfThree, 3),
            ExprFamily::G2Q61 => pp(6, None, Some(Congruence { modulus: 6, residues: &[2, 3, 4] })),
        }
    }

    fn branches(&self) -> &'static [Branch] {
        match self {
            ExprFamily::K2m1 => B_K2M1,
            ExprFamily::Psl2Half => B_PSL2_HALF,
            ExprFamily::SzOdd => B_SZ_ODD,
            ExprFamily::Psl3Odd => B_PSL3_ODD,
            ExprFamily::Psu3Odd => B_PSU3_ODD,
            ExprFamily::Psl3Even => B_PSL3_EVEN,
            ExprFamily::Psu3Even => B_PSU3_EVEN,
            ExprFamily::Psl3ThirdOdd => B_PSL3_THIRD_ODD,
            ExprFamily::Psl3ThirdEven => B_PSL3_THIRD_EVEN,
            ExprFamily::Psu3ThirdOdd => B_PSU3_THIRD_ODD,
            ExprFamily::Psu3ThirdEven => B_PSU3_THIRD_EVEN,
            ExprFamily::Sp4Odd => B_SP4_ODD,
            ExprFamily::Sp4Q4 => B_SP4_Q4,
            ExprFamily::Sp4TwoQ3 => B_SP4_TWO_Q3,
            ExprFamily::Ree33 => B_REE_33,
            ExprFamily::ReePm => &[],
            ExprFamily::ReeQ2 => B_REE_Q2,
            ExprFamily::G2Q61 => B_G2_Q61,
        }
    }

    /// The expression at a parameter as a list of factors and an exact
    /// divisor: value = ∏ pieces / divisor. `None` on a parameter off the
    /// expression's defining sequence. For `ReePm` this is the minus sign with
    /// m = 3^f; use [`ree_pm`] for other choices.
    pub fn pieces(&self, param: u64) -> Option<(Vec<u128>, u128)> {
        let q = u128::from(param);
        let q2 = q.checked_mul(q)?;
        let three_power_f = || -> Option<u32> {
            match prime_power_decomposition(param)? {
                (3, e) if e % 2 == 1 => Some((e - 1) / 2),
                _ => None,
            }
        };
        let qm = q.checked_sub(1)?;
        let v = match self {
            ExprFamily::K2m1 => (alloc::vec![qm, q + 1], 1),
            ExprFamily::Psl2Half => (alloc::vec![q, if q % 4 == 1 { qm } else { q + 1 }], 2),
            ExprFamily::SzOdd => (alloc::vec![qm, q2 + 1], 1),
            ExprFamily::Psl3Odd => (alloc::vec![q, q, q, q2 + q + 1], 1),
            ExprFamily::Psu3Odd => (alloc::vec![q, q, q, q2 - q + 1], 1),
            ExprFamily::Psl3Even => (alloc::vec![q2 + q + 1, qm, q + 1, qm], 1),
            ExprFamily::Psu3Even => (alloc::vec![q2 - q + 1, q + 1, q + 1, qm], 1),
            ExprFamily::Psl3ThirdOdd => (alloc::vec![q, q, q, q2 + q + 1], 3),
            ExprFamily::Psl3ThirdEven => (alloc::vec![q2 + q + 1, qm, q + 1, qm], 3),
            ExprFamily::Psu3ThirdOdd => (alloc::vec![q, q, q, q2 - q + 1], 3),
            ExprFamily::Psu3ThirdEven => (alloc::vec![q2 - q + 1, q + 1, q + 1, qm], 3),
            ExprFamily::Sp4Odd => (alloc::vec![q2 + 1, qm, qm, q + 1, q + 1], 1),
            ExprFamily::Sp4Q4 => (alloc::vec![q, q, q, q, qm, qm], 1),
            ExprFamily::Sp4TwoQ3 => (alloc::vec![2, q, q, q, qm, qm, q + 1, q + 1], 1),
            ExprFamily::Ree33 => (alloc::vec![3u128.checked_pow(5 * three_power_f()? + 3)?, q2 - q + 1], 1),
            ExprFamily::ReePm => {
                let m = 3u128.pow(three_power_f()?);
                (alloc::vec![q, q, q, (q + 1).checked_sub(3 * m)?], 1)
            }
            ExprFamily::ReeQ2 => (alloc::vec![qm, q + 1, q2 - q + 1], 1),
            ExprFamily::G2Q61 => (alloc::vec![qm, q + 1, q2 + q + 1, q2 - q + 1, qm, q + 1], 1),
        };
        Some(v)
    }

    /// Value at a parameter (`None` on overflow, a non-integral value, or a
    /// parameter off the expression's defining sequence).
    pub fn eval(&self, param: u64) -> Option<u128> {
        let (pieces, divisor) = self.pieces(param)?;
        let v = mul_all(&pieces)?;
        (v % divisor == 0).then_some(v / divisor)
    }

    /// Factored value at a parameter, factorizing piece by piece.
    pub fn eval_factored(&self, param: u64) -> Option<FactoredInteger> {
        let (pieces, divisor) = self.pieces(param)?;
        let mut acc = FactoredInteger::one();
        for x in pieces {
            acc = acc.mul(&FactoredInteger::factorize(x).ok()?);
        }
        acc.div_exact(&FactoredInteger::factorize(divisor).ok()?).ok()
    }
}

/// q³(q + 1 − 3m) (`plus = false`) or q³(q + 1 + 3m) (`plus = true`).
pub fn ree_pm(q: u64, m: u64, plus: bool) -> Option<u128> {
    let q = u128::from(q);
    let three_m = 3u128.checked_mul(u128::from(m))?;
    let inner = if plus { (q + 1).checked_add(three_m)? } else { (q + 1).checked_sub(three_m)? };
    if inner == 0 {
        return None;
    }
    mul_all(&[q, q, q, inner])
}

impl fmt::Display for ExprFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Unknown expression tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownExpr;

impl fmt::Display for UnknownExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown expression family")
    }
}

impl FromStr for ExprFamily {
    type Err = UnknownExpr;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExprFamily::ALL.iter().find(|e| e.tag() == s).copied().ok_or(UnknownExpr)
    }
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    /// The target does not fit the 127-bit evaluation range.
    TargetTooLarge,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("target too large for exact evaluation")
    }
}

/// The evaluations that pin a branch's answer: the largest parameter whose
/// value lies below the (scaled) target and the smallest at or above it.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Bracket {
    pub branch: &'static str,
    /// `scale · target`, the value the branch polynomial is compared with.
    pub goal: u128,
    pub below: Option<(u64, u128)>,
    pub at_or_above: Option<(u64, u128)>,
    /// Whether consecutive parameters are integers (`true`) or consecutive
    /// members of a geometric domain (`false`).
    pub integer_step: bool,
}

/// Result of [`solve`] / [`solve_in`].
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Solution {
    pub expr: ExprFamily,
    pub target: u128,
    /// The admissible parameter hitting the target, if any.
    pub root: Option<u64>,
    /// For `ReePm` hits: the value of m and the sign (`true` for +3m).
    pub ree_m: Option<(u64, bool)>,
    pub brackets: Vec<Bracket>,
}

impl Solution {
    /// Re-evaluates every bracket, confirming that it straddles the target.
    pub fn recheck(&self) -> bool {
        if self.expr == ExprFamily::ReePm {
            return match (self.root, self.ree_m) {
                (Some(q), Some((m, plus))) => {
                    Some(self.target) == ree_pm(q, m, plus)
                }
                (None, None) => true,
                _ => false,
            };
        }
        let branches = self.expr.branches();
        self.brackets.iter().all(|b| {
            let Some(branch) = branches.iter().find(|x| x.name == b.branch) else {
                return false;
            };
            let ok_below = b.below.is_none_or(|(p, v)| (branch.eval)(u128::from(p)) == Some(v) && v < b.goal);
            let ok_above = b
                .at_or_above
                .is_none_or(|(p, v)| (branch.eval)(u128::from(p)).is_none_or(|x| x == v) && v >= b.goal);
            let adjacent = match (b.below, b.at_or_above) {
                (Some((lo, _)), Some((hi, _))) if b.integer_step => hi == lo + 1,
                _ => true,
            };
            ok_below && ok_above && adjacent
        })
    }
}

/// Solves `expr(p) = target` over the expression's default domain.
pub fn solve(expr: ExprFamily, target: &FactoredInteger) -> Result<Solution, SolveError> {
    solve_in(expr, &expr.domain(), target)
}

/// Solves `expr(p) = target` over an explicit domain.
pub fn solve_in(expr: ExprFamily, domain: &ParamDomain, target: &FactoredInteger) -> Result<Solution, SolveError> {
    let t = target.to_int().map_err(|_| SolveError::TargetTooLarge)?;
    solve_value(expr, domain, t)
}

/// [`solve_in`] on a plain integer target.
pub fn solve_value(expr: ExprFamily, domain: &ParamDomain, t: u128) -> Result<Solution, SolveError> {
    let mut sol = Solution { expr, target: t, root: None, ree_m: None, brackets: Vec::new() };
    if expr == ExprFamily::ReePm {
        if let Some((q, m, plus)) = solve_ree_pm(domain, t) {
            sol.root = Some(q);
            sol.ree_m = Some((m, plus));
        }
        return Ok(sol);
    }
    for branch in expr.branches() {
        let goal = t.checked_mul(branch.scale).ok_or(SolveError::TargetTooLarge)?;
        let (bracket, hit) = if domain.is_geometric() || expr == ExprFamily::Ree33 {
            walk(branch, domain, goal)
        } else {
            bisect(branch, goal)
        };
        if let Some(p) = hit {
            if domain.admits(p) && (branch.accept)(p) && sol.root.is_none() {
                sol.root = Some(p);
            }
        }
        sol.brackets.push(bracket);
    }
    Ok(sol)
}

/// Walks a geometric domain until the value reaches `goal`.
fn walk(branch: &Branch, domain: &ParamDomain, goal: u128) -> (Bracket, Option<u64>) {
    let mut below = None;
    let mut p = domain.next_after(0);
    while let Some(x) = p {
        match (branch.eval)(u128::from(x)) {
            Some(v) if v < goal => below = Some((x, v)),
            Some(v) => {
                let bracket = Bracket { branch: branch.name, goal, below, at_or_above: Some((x, v)), integer_step: false };
                return (bracket, (v == goal).then_some(x));
            }
            None => break,
        }
        p = domain.next_after(x);
    }
    (Bracket { branch: branch.name, goal, below, at_or_above: None, integer_step: false }, None)
}

/// Doubling then bisection on the integers t ≥ 2.
fn bisect(branch: &Branch, goal: u128) -> (Bracket, Option<u64>) {
    let value = |t: u64| (branch.eval)(u128::from(t));
    let ge = |t: u64| value(t).is_none_or(|v| v >= goal);
    let mut lo = 2u64;
    if ge(lo) {
        let v = value(lo);
        let at = v.map(|v| (lo, v));
        let bracket = Bracket { branch: branch.name, goal, below: None, at_or_above: at, integer_step: true };
        return (bracket, (v == Some(goal)).then_some(lo));
    }
    let mut hi = 4u64;
    while !ge(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    // Invariant: value(lo) < goal <= value(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ge(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let below = value(lo).map(|v| (lo, v));
    let above = value(hi);
    let bracket =
        Bracket { branch: branch.name, goal, below, at_or_above: Some((hi, above.unwrap_or(u128::MAX))), integer_step: true };
    (bracket, (above == Some(goal)).then_some(hi))
}

/// Scans q = 3^(2f+1) with q³ ≤ t and tests whether t/q³ − (q + 1) = ±3m for
/// some m ∈ {3^f} ∪ [1, q].
fn solve_ree_pm(domain: &ParamDomain, t: u128) -> Option<(u64, u64, bool)> {
    let mut p = domain.next_after(0);
    while let Some(q) = p {
        let q3 = u128::from(q).checked_pow(3)?;
        if q3 > t {
            return None;
        }
        if t % q3 == 0 {
            let r = t / q3;
            let base = u128::from(q) + 1;
            let (diff, plus) = if r >= base { (r - base, true) } else { (base - r, false) };
            if diff > 0 && diff % 3 == 0 {
                let m = u64::try_from(diff / 3).ok()?;
                let f = (prime_power_decomposition(q)?.1 - 1) / 2;
                if m == 3u64.pow(f) || (1..=q).contains(&m) {
                    return Some((q, m, plus));
                }
            }
        }
        p = domain.next_after(q);
    }
    None
}

// ---------------------------------------------------------------------------
// Set helpers
// ---------------------------------------------------------------------------

/// All pairs (a, b) of the set with 2a = b, ascending in a.
pub fn exists_half_pair(s: &CodegreeSet) -> Vec<(FactoredInteger, FactoredInteger)> {
    let two = FactoredInteger::of(2);
    s.iter()
        .filter_map(|a| {
            let b = a.mul(&two);
            s.contains(&b).then(|| (a.clone(), b))
        })
        .collect()
}

/// Nontrivial odd elements.
pub fn odd_elements(s: &CodegreeSet) -> Vec<FactoredInteger> {
    s.nontrivial().filter(|x| x.is_odd()).cloned().collect()
}

/// The two quadratics whose residues modulo 9 the eliminations inspect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResiduePoly {
    /// q² + q + 1
    QSqPlusQPlusOne,
    /// q² − q + 1
    QSqMinusQPlusOne,
}

impl ResiduePoly {
    pub fn tag(&self) -> &'static str {
        match self {
            ResiduePoly::QSqPlusQPlusOne => "q2+q+1",
            ResiduePoly::QSqMinusQPlusOne => "q2-q+1",
        }
    }

    fn eval_mod(&self, r: u64, m: u64) -> u64 {
        let r = u128::from(r);
        let m128 = u128::from(m);
        let v = match self {
            ResiduePoly::QSqPlusQPlusOne => r * r + r + 1,
            ResiduePoly::QSqMinusQPlusOne => r * r + m128 - r % m128 + 1,
        };
        (v % m128) as u64
    }
}

impl FromStr for ResiduePoly {
    type Err = UnknownExpr;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q2+q+1" => Ok(ResiduePoly::QSqPlusQPlusOne),
            "q2-q+1" => Ok(ResiduePoly::QSqMinusQPlusOne),
            _ => Err(UnknownExpr),
        }
    }
}

/// Residues r ∈ [0, modulus) with poly(r) ≡ 0 (mod modulus), by exhaustion.
pub fn residue_search(poly: ResiduePoly, modulus: u64) -> Vec<u64> {
    assert!(modulus >= 2, "modulus must be at least 2");
    (0..modulus).filter(|&r| poly.eval_mod(r, modulus) == 0).collect()
}

/// ν₂ of an expression evaluated at q = 2^f (summed over its factors, so
/// no overflow for any f < 64).
pub fn two_adic_profile(expr: ExprFamily, f: u32) -> Option<u32> {
    let q = 1u64.checked_shl(f)?;
    let (pieces, divisor) = expr.pieces(q)?;
    let total: u32 = pieces.iter().map(|x| x.trailing_zeros()).sum();
    total.checked_sub(divisor.trailing_zeros())
}

/// True when `p` is prime and divides none of the values (helper for
/// "prime does not divide the group order" style arguments).
pub fn prime_avoids(p: u64, values: &[FactoredInteger]) -> bool {
    is_prime(p) && values.iter().all(|v| v.valuation(p) == 0)
}
