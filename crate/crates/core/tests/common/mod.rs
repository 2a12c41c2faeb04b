//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver, the domain predicates or the evaluation tables of the crate:
//! admissibility, closed forms and enumeration are written out again.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Smallest prime factor by trial division.
pub fn least_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// (p, f) with n = p^f, f ≥ 1.
pub fn as_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = least_prime_factor(n);
    let (mut m, mut f) = (n, 0);
    while m % p == 0 {
        m /= p;
        f += 1;
    }
    (m == 1).then_some((p, f))
}

/// Admissibility of a parameter for the expression with the given tag.
pub fn admissible(tag: &str, x: u64) -> bool {
    let Some((p, f)) = as_prime_power(x) else { return false };
    let odd = p != 2;
    match tag {
        "K2M1" => p == 2 && x > 2,
        "PSL2_HALF" => odd && x > 5,
        "SZ_ODD" => p == 2 && f % 2 == 1 && x > 2,
        "PSL3_ODD" => odd && x > 4 && x % 3 != 1,
        "PSU3_ODD" => odd && x > 4 && x % 3 != 2,
        "PSL3_EVEN" => !odd && x > 4 && x % 3 != 1,
        "PSU3_EVEN" => !odd && x > 4 && x % 3 != 2,
        "PSL3_THIRD_ODD" => odd && x > 4 && x % 3 == 1,
        "PSL3_THIRD_EVEN" => !odd && x > 4 && x % 3 == 1,
        "PSU3_THIRD_ODD" => odd && x > 4 && x % 3 == 2,
        "PSU3_THIRD_EVEN" => !odd && x > 4 && x % 3 == 2,
        "SP4_ODD" | "SP4_Q4" | "SP4_2Q3" => p == 2 && x > 4,
        "REE_33" | "REE_PM" | "REE_Q2" => p == 3 && f % 2 == 1 && x > 3,
        "G2_Q61" => x > 6 && matches!(x % 6, 2 | 3 | 4),
        other => panic!("unknown tag {other}"),
    }
}

/// Product with overflow check.
fn prod(xs: &[i128]) -> Option<i128> {
    xs.iter().try_fold(1i128, |acc, &x| acc.checked_mul(x))
}

/// Closed form at q (REE_PM has no single closed form and is handled in
/// [`brute_roots`]).
pub fn value(tag: &str, q: u64) -> Option<u128> {
    let q = i128::from(q);
    let (q2p, q2m) = (q * q + q + 1, q * q - q + 1);
    let v = match tag {
        "K2M1" => q * q - 1,
        "PSL2_HALF" => {
            if q % 4 == 1 {
                q * (q - 1) / 2
            } else {
                q * (q + 1) / 2
            }
        }
        "SZ_ODD" => prod(&[q - 1, q * q + 1])?,
        "PSL3_ODD" => prod(&[q, q, q, q2p])?,
        "PSU3_ODD" => prod(&[q, q, q, q2m])?,
        "PSL3_EVEN" => prod(&[q2p, q * q - 1, q - 1])?,
        "PSU3_EVEN" => prod(&[q2m, q + 1, q + 1, q - 1])?,
        "PSL3_THIRD_ODD" => prod(&[q, q, q, q2p])? / 3,
        "PSL3_THIRD_EVEN" => prod(&[q2p, q * q - 1, q - 1])? / 3,
        "PSU3_THIRD_ODD" => prod(&[q, q, q, q2m])? / 3,
        "PSU3_THIRD_EVEN" => prod(&[q2m, q + 1, q + 1, q - 1])? / 3,
        "SP4_ODD" => prod(&[q * q + 1, q * q - 1, q * q - 1])?,
        "SP4_Q4" => prod(&[q, q, q, q, q - 1, q - 1])?,
        "SP4_2Q3" => prod(&[2, q, q, q, q * q - 1, q * q - 1])?,
        "REE_33" => {
            // q = 3^(2f+1) and the 3-power is 3^(5f+3).
            let mut f = 0;
            while 3i128.pow(2 * f + 1) < q {
                f += 1;
            }
            prod(&[3i128.checked_pow(5 * f + 3)?, q2m])?
        }
        "REE_Q2" => prod(&[q * q - 1, q2m])?,
        "G2_Q61" => prod(&[q - 1, q + 1, q2p, q2m, q * q - 1])?,
        other => panic!("no single closed form for {other}"),
    };
    u128::try_from(v).ok()
}

/// Every admissible parameter at which the expression equals `t`, by
/// enumeration. All single closed forms are increasing for q ≥ 2, and
/// k(k−ε)/2 ≥ k(k−1)/2, which bounds the scans.
pub fn brute_roots(tag: &str, t: u128) -> Vec<u64> {
    brute_roots_in(tag, tag, t)
}

/// [`brute_roots`] with admissibility taken from another expression's
/// domain (a candidate family may use a formula quoted for a wider domain).
pub fn brute_roots_in(tag: &str, domain_tag: &str, t: u128) -> Vec<u64> {
    let mut hits = Vec::new();
    if tag == "REE_PM" {
        // q³(q + 1 ± 3m) with m = 3^f or 1 ≤ m ≤ q.
        let mut q: u64 = 27;
        let mut f = 1;
        while u128::from(q).pow(3) <= t {
            let q3 = u128::from(q).pow(3);
            if t % q3 == 0 {
                let r = (t / q3) as i128;
                let d = (r - (i128::from(q) + 1)).abs();
                let m = d / 3;
                let m_ok = m >= 1 && (m <= i128::from(q) || m == 3i128.pow(f));
                if d % 3 == 0 && m_ok && admissible(domain_tag, q) {
                    hits.push(q);
                }
            }
            q *= 9;
            f += 1;
        }
        return hits;
    }
    let mut q: u64 = 2;
    loop {
        let lower = if tag == "PSL2_HALF" { u128::from(q) * u128::from(q - 1) / 2 } else { value(tag, q).unwrap_or(u128::MAX) };
        if lower > t {
            break;
        }
        if value(tag, q) == Some(t) && admissible(domain_tag, q) {
            hits.push(q);
        }
        q += 1;
    }
    hits
}

pub const TAGS: [&str; 18] = [
    "K2M1",
    "PSL2_HALF",
    "SZ_ODD",
    "PSL3_ODD",
    "PSU3_ODD",
    "PSL3_EVEN",
    "PSU3_EVEN",
    "PSL3_THIRD_ODD",
    "PSL3_THIRD_EVEN",
    "PSU3_THIRD_ODD",
    "PSU3_THIRD_EVEN",
    "SP4_ODD",
    "SP4_Q4",
    "SP4_2Q3",
    "REE_33",
    "REE_PM",
    "REE_Q2",
    "G2_Q61",
];

/// The first `n` admissible parameters of an expression: every integer
/// below 10⁵ together with all powers of 2 and 3 (the even and 3-power
/// domains are sparse), filtered and sorted.
pub fn first_admissible(tag: &str, n: usize) -> Vec<u64> {
    let powers = [2u64, 3].into_iter().flat_map(|b| (1..64u32).map_while(move |e| b.checked_pow(e)));
    let all: BTreeSet<u64> = (2..100_000u64).chain(powers).filter(|&x| admissible(tag, x)).collect();
    all.into_iter().take(n).collect()
}

/// Expression tag whose domain equals the parameter domain of a family.
pub fn family_domain_tag(family: &str) -> &'static str {
    match family {
        "PSL2_even" => "K2M1",
        "PSL2_odd" => "PSL2_HALF",
        "Suzuki" => "SZ_ODD",
        "PSL3_odd" => "PSL3_ODD",
        "PSL3_even" => "PSL3_EVEN",
        "PSU3_odd" => "PSU3_ODD",
        "PSU3_even" => "PSU3_EVEN",
        "PSL3_third_odd" => "PSL3_THIRD_ODD",
        "PSL3_third_even" => "PSL3_THIRD_EVEN",
        "PSU3_third_odd" => "PSU3_THIRD_ODD",
        "PSU3_third_even" => "PSU3_THIRD_EVEN",
        "Ree" => "REE_Q2",
        "Sp4_q" => "SP4_Q4",
        "G2_q" => "G2_Q61",
        other => panic!("{other} is not parametric"),
    }
}

/// Codegrees of PSL(2, k), k an odd prime power > 5, from the degree list
/// 1, k, k ± 1, (k + ε)/2 with ε = ±1 and k ≡ ε (mod 4).
pub fn psl2_odd_codegrees(k: u64) -> BTreeSet<u128> {
    let k = u128::from(k);
    let order = k * (k * k - 1) / 2;
    let half = if k % 4 == 1 { (k + 1) / 2 } else { (k - 1) / 2 };
    [1, k, k - 1, k + 1, half].into_iter().map(|d| order / d).collect()
}
