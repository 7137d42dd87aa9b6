//! Primality of multi-limb integers.
//!
//! Below `PSI_13` the Miller–Rabin test with the first thirteen prime bases
//! is deterministic. Above it there is no known deterministic base set, so
//! the Baillie–PSW combination (base-2 strong test plus a strong Lucas test
//! with Selfridge parameters) is used; it has no known counterexample.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::mont::{limb_count, Mont};
use super::small::{is_prime_u64, small_primes};

/// Smallest integer that is a strong pseudoprime to all of the first
/// thirteen prime bases (Sorenson and Webster).
pub const PSI_13: u128 = 3_317_044_064_679_887_385_961_981;

const FIRST_13: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Whether the answer for `n` is proven rather than merely BPSW-backed.
pub fn is_deterministic(n: &BigUint) -> bool {
    n < &BigUint::from(PSI_13)
}

pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if !n.bit(0) {
        return false;
    }
    for &p in &small_primes()[1..200] {
        if (n % p).to_u32() == Some(0) {
            return false;
        }
    }
    dispatch!(limb_count(n), is_prime_mont, n)
}

fn is_prime_mont<const N: usize>(n: &BigUint) -> bool {
    let ctx = Mont::<N>::new(n);
    if !strong_probable_prime(&ctx, n, 2) {
        return false;
    }
    if is_deterministic(n) {
        return FIRST_13[1..]
            .iter()
            .all(|&b| strong_probable_prime(&ctx, n, b));
    }
    strong_lucas(&ctx, n)
}

fn strong_probable_prime<const N: usize>(ctx: &Mont<N>, n: &BigUint, base: u64) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let one = ctx.one();
    let minus_one = ctx.sub(&ctx.zero(), &one);
    let mut x = ctx.pow(&ctx.encode(&BigUint::from(base)), &d);
    if x == one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = ctx.sqr(&x);
        if x == minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Jacobi symbol (a / n) for odd positive `n`.
fn jacobi_u64(mut a: u64, mut n: u64) -> i32 {
    let mut result = 1;
    a %= n;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Jacobi symbol (d / n) for a small odd `d` and odd `n`.
fn jacobi_small(d: i64, n: &BigUint) -> i32 {
    let n_mod_4 = (n % 4u32).to_u32().unwrap();
    let mut sign = 1;
    if d < 0 && n_mod_4 == 3 {
        sign = -1;
    }
    let a = d.unsigned_abs();
    // reciprocity: (a/n) = (n/a) unless both are 3 mod 4
    if a % 4 == 3 && n_mod_4 == 3 {
        sign = -sign;
    }
    let n_mod_a = (n % a).to_u64().unwrap();
    sign * jacobi_u64(n_mod_a, a)
}

fn strong_lucas<const N: usize>(ctx: &Mont<N>, n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    // Selfridge: first D in 5, -7, 9, -11, ... with (D/n) = -1
    let mut d: i64 = 5;
    loop {
        match jacobi_small(d, n) {
            -1 => break,
            0 if BigUint::from(d.unsigned_abs()) != *n => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let dm = ctx.encode_i64(d);
    let qm = ctx.encode_i64(q);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // P = 1: U_1 = 1, V_1 = 1
    let mut u = ctx.one();
    let mut v = ctx.one();
    let mut qk = qm;
    for i in (0..k.bits() - 1).rev() {
        u = ctx.mul(&u, &v);
        v = ctx.sub(&ctx.sqr(&v), &ctx.add(&qk, &qk));
        qk = ctx.sqr(&qk);
        if k.bit(i) {
            let u_next = ctx.half(&ctx.add(&u, &v));
            let v_next = ctx.half(&ctx.add(&ctx.mul(&dm, &u), &v));
            u = u_next;
            v = v_next;
            qk = ctx.mul(&qk, &qm);
        }
    }
    if Mont::<N>::is_zero(&u) || Mont::<N>::is_zero(&v) {
        return true;
    }
    for _ in 1..s {
        v = ctx.sub(&ctx.sqr(&v), &ctx.add(&qk, &qk));
        qk = ctx.sqr(&qk);
        if Mont::<N>::is_zero(&v) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use std::str::FromStr;

    #[test]
    fn jacobi_agrees_with_euler_criterion() {
        for n in (3u64..400).step_by(2) {
            if !is_prime_u64(n) {
                continue;
            }
            for a in 1..n {
                let euler = BigUint::from(a).modpow(&BigUint::from((n - 1) / 2), &BigUint::from(n));
                let expect = if euler == BigUint::one() { 1 } else { -1 };
                assert_eq!(jacobi_u64(a, n), expect, "({a}/{n})");
            }
        }
    }

    #[test]
    fn known_large_primes() {
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime_big(&m127));
        let m521 = (BigUint::one() << 521) - 1u32;
        assert!(is_prime_big(&m521));
        let p = BigUint::from_str("3986167223").unwrap();
        assert!(is_prime_big(&p));
    }

    #[test]
    fn composites_rejected() {
        // ψ13 itself is a strong pseudoprime to the first 13 bases
        assert!(!is_prime_big(&BigUint::from(PSI_13)));
        let m67 = (BigUint::one() << 67) - 1u32;
        assert!(!is_prime_big(&m67));
        let m127 = (BigUint::one() << 127) - 1u32;
        let m61 = (BigUint::one() << 61) - 1u32;
        assert!(!is_prime_big(&(&m127 * &m61)));
        assert!(!is_prime_big(&(&m127 * &m127)));
    }

    #[test]
    fn strong_lucas_pseudoprimes_below_1e5() {
        let mut passing_composites = Vec::new();
        for n in (3u64..100_000).step_by(2) {
            let big = BigUint::from(n);
            if big.sqrt().pow(2) == big {
                continue;
            }
            let ctx = Mont::<1>::new(&big);
            let lucas = strong_lucas(&ctx, &big);
            if is_prime_u64(n) {
                assert!(lucas, "prime {n} rejected");
            } else if lucas {
                passing_composites.push(n);
            }
        }
        assert_eq!(
            passing_composites,
            [5459, 5777, 10877, 16109, 18971, 22499, 24569, 25199, 40309, 58519, 75077, 97439]
        );
    }
}
