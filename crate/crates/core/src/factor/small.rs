//! Word-sized primality and factor finding.

use std::sync::OnceLock;

use rand::Rng;

/// Trial-division cutoff: every prime below this bound is tried first.
pub const TRIAL_BOUND: u32 = 1 << 16;

/// Secondary trial-division range, used to certify that no factor lies below
/// a small factor that the randomized methods already found.
pub const EXTENDED_TRIAL_BOUND: u32 = 1 << 24;

/// Primes below `limit` by a plain sieve of Eratosthenes over odd numbers.
pub fn primes_below(limit: u32) -> Vec<u32> {
    if limit <= 2 {
        return Vec::new();
    }
    let half = (limit / 2) as usize;
    // composite[i] describes 2i + 1
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) < limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u32 + 1),
    );
    out
}

/// All primes below [`TRIAL_BOUND`].
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(TRIAL_BOUND))
}

/// All primes below [`EXTENDED_TRIAL_BOUND`]; built on first use.
pub fn extended_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(EXTENDED_TRIAL_BOUND))
}

/// Montgomery arithmetic modulo an odd 64-bit modulus.
#[derive(Debug, Clone, Copy)]
pub struct Mont64 {
    n: u64,
    ninv: u64,
    r2: u64,
}

impl Mont64 {
    pub fn new(n: u64) -> Self {
        debug_assert!(n % 2 == 1 && n > 1);
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r as u128 * r as u128) % n as u128) as u64;
        Mont64 {
            n,
            ninv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let (s, carry) = t.overflowing_add(m as u128 * self.n as u128);
        let hi = (s >> 64) as u64;
        if carry || hi >= self.n {
            hi.wrapping_sub(self.n)
        } else {
            hi
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn encode(&self, x: u64) -> u64 {
        self.mul(x % self.n, self.r2)
    }

    #[inline]
    pub fn decode(&self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, c) = a.overflowing_add(b);
        if c || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (d, borrow) = a.overflowing_sub(b);
        if borrow {
            d.wrapping_add(self.n)
        } else {
            d
        }
    }

    pub fn one(&self) -> u64 {
        self.encode(1)
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }
}

/// Miller–Rabin bases that are deterministic for every 64-bit input
/// (Sinclair's seven-base set).
const BASES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

fn strong_probable_prime(mont: &Mont64, n: u64, base: u64) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let one = mont.one();
    let minus_one = mont.sub(0, one);
    let mut x = mont.pow(mont.encode(a), d);
    if x == one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = mont.mul(x, x);
        if x == minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..64] {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // every composite below 311^2 has a factor among the first 64 primes
    if n < 311 * 311 {
        return true;
    }
    let mont = Mont64::new(n);
    BASES_64.iter().all(|&b| strong_probable_prime(&mont, n, b))
}

/// First prime below [`TRIAL_BOUND`] dividing `n`, scanning only while
/// `p * p <= n`. Returns `Some(n)` when the scan proves `n` prime.
pub fn trial_divide_u64(n: u64) -> Option<u64> {
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            return Some(n);
        }
        if n.is_multiple_of(p) {
            return Some(p);
        }
    }
    None
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho on an odd composite `n`. Returns a
/// nontrivial divisor, or `None` if the iteration budget runs out for this
/// polynomial constant.
pub fn rho_brent_u64(n: u64, c: u64, x0: u64, max_iter: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let mont = Mont64::new(n);
    let c = mont.encode(c % n);
    let f = |y: u64| mont.add(mont.mul(y, y), c);
    let mut y = mont.encode(x0 % n);
    let mut q = mont.one();
    let mut g;
    let mut r: u64 = 1;
    let mut x;
    let mut ys;
    let mut total = 0u64;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mont.mul(q, mont.sub(x, y));
            }
            g = gcd_u64(mont.decode(q), n);
            k += BATCH;
            if k >= r || g != 1 {
                break;
            }
        }
        total += r;
        r *= 2;
        if g != 1 {
            break;
        }
        if total > max_iter {
            return None;
        }
    }
    if g == n {
        // batch overshot: replay one step at a time from the saved point
        loop {
            ys = f(ys);
            g = gcd_u64(mont.decode(mont.sub(x, ys)), n);
            if g != 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

/// A nontrivial divisor of the odd composite `n`.
pub fn find_divisor_u64<R: Rng>(n: u64, rng: &mut R) -> u64 {
    debug_assert!(!is_prime_u64(n));
    for &p in &small_primes()[..8] {
        if n.is_multiple_of(p as u64) {
            return p as u64;
        }
    }
    loop {
        let c = rng.gen_range(1..n);
        let x0 = rng.gen_range(0..n);
        if let Some(d) = rho_brent_u64(n, c, x0, 1 << 26) {
            return d;
        }
    }
}

/// Smallest prime factor of `n >= 2`.
pub fn smallest_prime_factor_u64<R: Rng>(n: u64, rng: &mut R) -> u64 {
    debug_assert!(n >= 2);
    if let Some(p) = trial_divide_u64(n) {
        return p;
    }
    if is_prime_u64(n) {
        return n;
    }
    // no factor below 2^16, so at most three prime factors remain
    let mut stack = vec![n];
    let mut best = u64::MAX;
    while let Some(c) = stack.pop() {
        if is_prime_u64(c) {
            best = best.min(c);
            continue;
        }
        let d = find_divisor_u64(c, rng);
        stack.push(d);
        stack.push(c / d);
    }
    best
}

/// All prime factors of `n >= 2` with multiplicity, unordered.
pub fn prime_factors_u64<R: Rng>(mut n: u64, rng: &mut R, out: &mut Vec<u64>) {
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
    }
    if n == 1 {
        return;
    }
    let mut stack = vec![n];
    while let Some(c) = stack.pop() {
        if is_prime_u64(c) {
            out.push(c);
            continue;
        }
        let d = find_divisor_u64(c, rng);
        stack.push(d);
        stack.push(c / d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sieve_counts() {
        assert_eq!(primes_below(100).len(), 25);
        assert_eq!(small_primes().len(), 6542);
        assert_eq!(*small_primes().last().unwrap(), 65521);
    }

    #[test]
    fn mont64_roundtrip_near_top() {
        let n = u64::MAX - 58; // largest 64-bit prime
        let m = Mont64::new(n);
        let a = n - 2;
        let b = n - 3;
        let expect = ((a as u128 * b as u128) % n as u128) as u64;
        assert_eq!(m.decode(m.mul(m.encode(a), m.encode(b))), expect);
        assert!(is_prime_u64(n));
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 3215031751, 3825123056546413051] {
            assert!(!is_prime_u64(n), "{n}");
        }
    }

    #[test]
    fn rho_splits_semiprime() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (p, q) = (4294967291u64, 4294967279u64);
        let d = find_divisor_u64(p * q, &mut rng);
        assert!(d == p || d == q);
        assert_eq!(smallest_prime_factor_u64(p * q, &mut rng), q);
    }
}
