//! Lenstra's elliptic curve method on Montgomery curves.
//!
//! Curves come from Suyama's parametrization, points are kept as projective
//! `(X : Z)` pairs, stage 1 runs a Montgomery ladder over every prime power
//! up to `B1`, and stage 2 is the standard baby-step/giant-step continuation
//! with `D = 2310` up to `B2`.

use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::mont::{Limbs, Mont};

/// `(B1, curves)` levels, roughly tuned for factors of 15, 20, 25, 30, 35
/// and 40 decimal digits.
pub const SCHEDULE: &[(u64, u32)] = &[
    (2_000, 25),
    (11_000, 90),
    (50_000, 300),
    (250_000, 700),
    (1_000_000, 1800),
    (3_000_000, 5100),
];

/// Stage 2 bound as a multiple of B1.
pub const B2_FACTOR: u64 = 50;

const WHEEL: u64 = 2310;

/// Odd-only prime bitmap shared by both stages.
pub struct PrimeBits {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeBits {
    fn build(limit: u64) -> Self {
        let half = (limit / 2 + 1) as usize;
        let mut composite = vec![0u64; half.div_ceil(64)];
        let mut i = 1usize;
        while (2 * i + 1) * (2 * i + 1) <= limit as usize {
            if composite[i / 64] >> (i % 64) & 1 == 0 {
                let p = 2 * i + 1;
                let mut j = p * p / 2;
                while j < half {
                    composite[j / 64] |= 1 << (j % 64);
                    j += p;
                }
            }
            i += 1;
        }
        for w in composite.iter_mut() {
            *w = !*w;
        }
        // 1 is not prime
        composite[0] &= !1;
        PrimeBits {
            limit,
            bits: composite,
        }
    }

    #[inline]
    pub fn is_prime(&self, x: u64) -> bool {
        if x == 2 {
            return true;
        }
        if x.is_multiple_of(2) || x > self.limit {
            return false;
        }
        let i = (x / 2) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn primes_up_to(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2)
            .chain((3..=bound.min(self.limit)).step_by(2))
            .filter(move |&x| self.is_prime(x))
    }
}

/// Shared sieve covering at least `limit`, grown on demand.
pub fn prime_bits(limit: u64) -> Arc<PrimeBits> {
    static CACHE: Mutex<Option<Arc<PrimeBits>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(bits) = guard.as_ref() {
        if bits.limit >= limit {
            return bits.clone();
        }
    }
    let bits = Arc::new(PrimeBits::build(limit));
    *guard = Some(bits.clone());
    bits
}

#[derive(Clone, Copy)]
struct Point<const N: usize> {
    x: Limbs<N>,
    z: Limbs<N>,
}

struct Curve<'a, const N: usize> {
    ctx: &'a Mont<N>,
    a24: Limbs<N>,
}

impl<const N: usize> Curve<'_, N> {
    fn double(&self, p: &Point<N>) -> Point<N> {
        let ctx = self.ctx;
        let s = ctx.sqr(&ctx.add(&p.x, &p.z));
        let d = ctx.sqr(&ctx.sub(&p.x, &p.z));
        let t = ctx.sub(&s, &d);
        Point {
            x: ctx.mul(&s, &d),
            z: ctx.mul(&t, &ctx.add(&d, &ctx.mul(&self.a24, &t))),
        }
    }

    /// `p + q` given `p - q`.
    fn add(&self, p: &Point<N>, q: &Point<N>, diff: &Point<N>) -> Point<N> {
        let ctx = self.ctx;
        let u = ctx.mul(&ctx.sub(&p.x, &p.z), &ctx.add(&q.x, &q.z));
        let v = ctx.mul(&ctx.add(&p.x, &p.z), &ctx.sub(&q.x, &q.z));
        Point {
            x: ctx.mul(&diff.z, &ctx.sqr(&ctx.add(&u, &v))),
            z: ctx.mul(&diff.x, &ctx.sqr(&ctx.sub(&u, &v))),
        }
    }

    fn ladder(&self, p: &Point<N>, k: u64) -> Point<N> {
        debug_assert!(k >= 1);
        if k == 1 {
            return *p;
        }
        let mut r0 = *p;
        let mut r1 = self.double(p);
        for i in (0..63 - k.leading_zeros()).rev() {
            if (k >> i) & 1 == 1 {
                r0 = self.add(&r1, &r0, p);
                r1 = self.double(&r1);
            } else {
                r1 = self.add(&r1, &r0, p);
                r0 = self.double(&r0);
            }
        }
        r0
    }
}

enum Setup<const N: usize> {
    Ready(Point<N>, Limbs<N>),
    Factor(BigUint),
    Degenerate,
}

fn suyama<const N: usize>(ctx: &Mont<N>, sigma: u64) -> Setup<N> {
    let n = ctx.modulus();
    let s = BigUint::from(sigma);
    let u = (&s * &s + n - 5u32) % n;
    let v = (&s * 4u32) % n;
    let three = BigUint::from(3u32);
    let x0 = u.modpow(&three, n);
    let z0 = v.modpow(&three, n);
    let v_minus_u = (&v + n - &u) % n;
    let num = v_minus_u.modpow(&three, n) * ((&u * 3u32 + &v) % n) % n;
    let den = (&x0 * &v * 16u32) % n;
    let g = den.gcd(n);
    if !g.is_one() {
        return if &g == n {
            Setup::Degenerate
        } else {
            Setup::Factor(g)
        };
    }
    let Some(inv) = den.modinv(n) else {
        return Setup::Degenerate;
    };
    let a24 = num * inv % n;
    Setup::Ready(
        Point {
            x: ctx.encode(&x0),
            z: ctx.encode(&z0),
        },
        ctx.encode(&a24),
    )
}

fn nontrivial<const N: usize>(ctx: &Mont<N>, value: &Limbs<N>) -> Option<BigUint> {
    let n = ctx.modulus();
    let g = ctx.raw(value).gcd(n);
    if g.is_one() || &g == n {
        None
    } else {
        Some(g)
    }
}

/// One ECM curve with parameter `sigma`. Returns a nontrivial divisor of
/// the odd composite `n` when the curve's group order is smooth enough.
pub fn ecm_curve<const N: usize>(n: &BigUint, sigma: u64, b1: u64, b2: u64) -> Option<BigUint> {
    let ctx = Mont::<N>::new(n);
    let (mut q, a24) = match suyama(&ctx, sigma) {
        Setup::Ready(p, a24) => (p, a24),
        Setup::Factor(g) => return Some(g),
        Setup::Degenerate => return None,
    };
    let curve = Curve { ctx: &ctx, a24 };
    let primes = prime_bits(b2);

    for p in primes.primes_up_to(b1) {
        let mut pk = p;
        while pk <= b1 / p {
            pk *= p;
        }
        q = curve.ladder(&q, pk);
    }
    let g = q.z;
    if Mont::<N>::is_zero(&g) {
        return None;
    }
    if let Some(f) = nontrivial(&ctx, &g) {
        return Some(f);
    }

    // stage 2
    let half = WHEEL / 2;
    let mut odd_multiples: Vec<Point<N>> = Vec::with_capacity(half as usize / 2 + 1);
    let q2 = curve.double(&q);
    odd_multiples.push(q);
    if half > 3 {
        odd_multiples.push(curve.add(&q2, &q, &q));
    }
    while (2 * odd_multiples.len() as u64 + 1) < half {
        let k = odd_multiples.len();
        let next = curve.add(&odd_multiples[k - 1], &q2, &odd_multiples[k - 2]);
        odd_multiples.push(next);
    }
    let baby: Vec<(u64, Point<N>)> = odd_multiples
        .into_iter()
        .enumerate()
        .map(|(i, p)| (2 * i as u64 + 1, p))
        .filter(|(d, _)| d.gcd(&WHEEL) == 1)
        .collect();

    let step = curve.ladder(&q, WHEEL);
    let m0 = (b1 / WHEEL).max(1);
    let mut giant = curve.ladder(&q, m0 * WHEEL);
    let mut next = curve.ladder(&q, (m0 + 1) * WHEEL);
    let mut acc = ctx.one();
    let mut centre = m0 * WHEEL;
    while centre <= b2 + half {
        for (d, bp) in &baby {
            let lo = centre - d;
            let hi = centre + d;
            let hit = (lo > b1 && lo <= b2 && primes.is_prime(lo))
                || (hi > b1 && hi <= b2 && primes.is_prime(hi));
            if hit {
                let t = ctx.sub(&ctx.mul(&giant.x, &bp.z), &ctx.mul(&bp.x, &giant.z));
                acc = ctx.mul(&acc, &t);
            }
        }
        let after = curve.add(&next, &step, &giant);
        giant = next;
        next = after;
        centre += WHEEL;
    }
    nontrivial(&ctx, &acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use std::str::FromStr;

    #[test]
    fn prime_bits_matches_sieve() {
        let bits = prime_bits(10_000);
        let from_bits: Vec<u64> = bits.primes_up_to(10_000).collect();
        let expected: Vec<u64> = super::super::small::primes_below(10_001)
            .into_iter()
            .map(u64::from)
            .collect();
        assert_eq!(from_bits, expected);
    }

    #[test]
    fn splits_product_of_two_40_bit_primes() {
        // 1099511627791 and 1099511628401 are the first primes above 2^40
        let p = BigUint::from(1_099_511_627_791u64);
        let q = BigUint::from(1_099_511_628_401u64);
        let n = &p * &q;
        let found = (6..400).find_map(|sigma| ecm_curve::<2>(&n, sigma, 11_000, 550_000));
        let f = found.expect("ECM should split an 80-bit semiprime");
        assert!(f == p || f == q);
    }

    #[test]
    fn splits_three_limb_number() {
        // (2^61 - 1) * (2^89 - 1) * 1000000007
        let a = BigUint::from_str("2305843009213693951").unwrap();
        let b = BigUint::from_str("618970019642690137449562111").unwrap();
        let c = BigUint::from(1_000_000_007u64);
        let n = &a * &b * &c;
        let found = (6..200).find_map(|sigma| ecm_curve::<3>(&n, sigma, 2_000, 100_000));
        let f = found.expect("ECM should find the 30-bit factor");
        assert!((&n % &f).is_zero());
    }
}
