//! Small exact-integer helpers shared across the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `⌊√n⌋` for `n ≥ 0`.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = isqrt(n);
    &r * &r == *n
}

/// Splits `n > 0` as `n = s²·r` with `r` squarefree. Returns `(s, r)`.
pub fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            r *= &p;
        }
        if e > 0 && is_square(&rest) {
            s *= isqrt(&rest);
            return (s, r);
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    r *= rest;
    (s, r)
}

pub fn is_squarefree(n: &BigInt) -> bool {
    n.is_positive() && square_part(n).0.is_one()
}

pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

/// Distinct prime divisors of `n > 0`, ascending.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        if (&rest % &p).is_zero() {
            out.push(p.clone());
            while (&rest % &p).is_zero() {
                rest /= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if rest > BigInt::one() {
        out.push(rest);
    }
    out
}

/// Factorisation of a machine integer as `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Extended gcd on `i128`: returns `(g, x, y)` with `g = x·a + y·b`, `g ≥ 0`.
pub fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_part_splits() {
        let (s, r) = square_part(&BigInt::from(72));
        assert_eq!((s, r), (BigInt::from(6), BigInt::from(2)));
        let (s, r) = square_part(&BigInt::from(97));
        assert_eq!((s, r), (BigInt::from(1), BigInt::from(97)));
        let (s, r) = square_part(&BigInt::from(49));
        assert_eq!((s, r), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn ext_gcd_signs() {
        for (a, b) in [(12, -18), (-7, 5), (0, -4), (9, 0)] {
            let (g, x, y) = ext_gcd_i128(a, b);
            assert!(g >= 0);
            assert_eq!(g, x * a + y * b);
            assert_eq!(g, num_integer::gcd(a, b));
        }
    }

    #[test]
    fn factor_small() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(1), vec![]);
    }
}
