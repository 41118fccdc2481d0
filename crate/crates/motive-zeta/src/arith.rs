//! Small exact number-theory helpers shared across modules: primality,
//! factorization, the Möbius function, integer roots, and the necklace
//! count of monic irreducible polynomials.

use crate::error::{Error, Result};

/// Deterministic primality by trial division; intended for the modest sizes
/// the enumeration caps allow.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= n) {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= n) {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut m = n;
    let mut k = 0u32;
    let mut d = 2u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= m) {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Number of monic irreducible polynomials of degree `d` over a field with
/// `q` elements: `(1/d) * sum_{e | d} mu(e) * q^(d/e)`.
pub fn necklace_count(q: u64, d: u64) -> Result<u64> {
    assert!(d >= 1);
    let mut acc: i128 = 0;
    for e in divisors(d) {
        let mu = moebius(e);
        if mu == 0 {
            continue;
        }
        let term = checked_pow_u128(q as u128, (d / e) as u32).ok_or(Error::TooLarge {
            size: u128::MAX,
            cap: u64::MAX,
        })?;
        let term = i128::try_from(term).map_err(|_| Error::TooLarge {
            size: term,
            cap: u64::MAX,
        })?;
        acc += mu as i128 * term;
    }
    let count = acc / d as i128;
    u64::try_from(count).map_err(|_| Error::TooLarge {
        size: count as u128,
        cap: u64::MAX,
    })
}

pub fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// The exact integer `m`-th root when `n` is a perfect `m`-th power.
pub fn perfect_root(n: u64, m: u32) -> Option<u64> {
    assert!(m >= 1);
    if m == 1 || n <= 1 {
        return Some(n);
    }
    let mut lo = 1u64;
    let mut hi = n;
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match checked_pow_u128(mid as u128, m).map(|v| v.cmp(&(n as u128))) {
            Some(std::cmp::Ordering::Equal) => return Some(mid),
            Some(std::cmp::Ordering::Less) => lo = mid + 1,
            _ => hi = mid - 1,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
    }

    #[test]
    fn moebius_first_values() {
        let mu: Vec<i64> = (1..=12).map(moebius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn necklace_counts_over_f2() {
        // Monic irreducibles over F_2 by degree: 2, 1, 2, 3, 6, 9.
        let counts: Vec<u64> = (1..=6).map(|d| necklace_count(2, d).unwrap()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn perfect_roots() {
        assert_eq!(perfect_root(49, 2), Some(7));
        assert_eq!(perfect_root(50, 2), None);
        assert_eq!(perfect_root(4096, 3), Some(16));
        assert_eq!(perfect_root(7, 1), Some(7));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }
}
