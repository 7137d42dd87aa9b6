//! Fixed-width Montgomery arithmetic over `N` 64-bit limbs.
//!
//! Residues are kept reduced (`< m`) and in Montgomery form `xR mod m` with
//! `R = 2^(64N)`. Multiplication is coarsely integrated operand scanning
//! (CIOS). The modulus must be odd and fit in `N` limbs.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub type Limbs<const N: usize> = [u64; N];

pub fn to_limbs<const N: usize>(x: &BigUint) -> Limbs<N> {
    let digits = x.to_u64_digits();
    debug_assert!(digits.len() <= N);
    let mut out = [0u64; N];
    out[..digits.len()].copy_from_slice(&digits);
    out
}

pub fn from_limbs(x: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(x.len() * 2);
    for &w in x {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    BigUint::new(digits)
}

/// Number of 64-bit limbs needed to hold `x`.
pub fn limb_count(x: &BigUint) -> usize {
    x.bits().div_ceil(64).max(1) as usize
}

#[inline]
fn geq<const N: usize>(a: &Limbs<N>, b: &Limbs<N>) -> bool {
    for i in (0..N).rev() {
        if a[i] != b[i] {
            return a[i] > b[i];
        }
    }
    true
}

#[inline]
fn sub_in_place<const N: usize>(a: &mut Limbs<N>, b: &Limbs<N>) -> bool {
    let mut borrow = false;
    for i in 0..N {
        let (d1, b1) = a[i].overflowing_sub(b[i]);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        a[i] = d2;
        borrow = b1 | b2;
    }
    borrow
}

#[inline]
fn add_in_place<const N: usize>(a: &mut Limbs<N>, b: &Limbs<N>) -> bool {
    let mut carry = false;
    for i in 0..N {
        let (s1, c1) = a[i].overflowing_add(b[i]);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        a[i] = s2;
        carry = c1 | c2;
    }
    carry
}

#[derive(Debug, Clone)]
pub struct Mont<const N: usize> {
    m: Limbs<N>,
    minv: u64,
    one: Limbs<N>,
    r2: Limbs<N>,
    modulus: BigUint,
}

impl<const N: usize> Mont<N> {
    pub fn new(modulus: &BigUint) -> Self {
        debug_assert!(modulus.bit(0), "modulus must be odd");
        debug_assert!(limb_count(modulus) <= N);
        let m = to_limbs::<N>(modulus);
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m[0].wrapping_mul(inv)));
        }
        let r = BigUint::one() << (64 * N);
        let one = to_limbs::<N>(&(&r % modulus));
        let r2 = to_limbs::<N>(&((&r * &r) % modulus));
        Mont {
            m,
            minv: inv.wrapping_neg(),
            one,
            r2,
            modulus: modulus.clone(),
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> Limbs<N> {
        [0; N]
    }

    #[inline]
    pub fn one(&self) -> Limbs<N> {
        self.one
    }

    pub fn mul(&self, a: &Limbs<N>, b: &Limbs<N>) -> Limbs<N> {
        let m = &self.m;
        let mut t = [0u64; N];
        let mut top: u64 = 0;
        for &bi in b.iter() {
            let mut carry: u64 = 0;
            for j in 0..N {
                let s = t[j] as u128 + a[j] as u128 * bi as u128 + carry as u128;
                t[j] = s as u64;
                carry = (s >> 64) as u64;
            }
            let s = top as u128 + carry as u128;
            top = s as u64;
            let top2 = (s >> 64) as u64;

            let q = t[0].wrapping_mul(self.minv);
            let s = t[0] as u128 + q as u128 * m[0] as u128;
            let mut carry = (s >> 64) as u64;
            for j in 1..N {
                let s = t[j] as u128 + q as u128 * m[j] as u128 + carry as u128;
                t[j - 1] = s as u64;
                carry = (s >> 64) as u64;
            }
            let s = top as u128 + carry as u128;
            t[N - 1] = s as u64;
            top = top2 + (s >> 64) as u64;
        }
        if top != 0 || geq(&t, m) {
            sub_in_place(&mut t, m);
        }
        t
    }

    #[inline]
    pub fn sqr(&self, a: &Limbs<N>) -> Limbs<N> {
        self.mul(a, a)
    }

    #[inline]
    pub fn add(&self, a: &Limbs<N>, b: &Limbs<N>) -> Limbs<N> {
        let mut s = *a;
        let carry = add_in_place(&mut s, b);
        if carry || geq(&s, &self.m) {
            sub_in_place(&mut s, &self.m);
        }
        s
    }

    #[inline]
    pub fn sub(&self, a: &Limbs<N>, b: &Limbs<N>) -> Limbs<N> {
        let mut d = *a;
        if sub_in_place(&mut d, b) {
            add_in_place(&mut d, &self.m);
        }
        d
    }

    /// `a / 2 mod m`.
    pub fn half(&self, a: &Limbs<N>) -> Limbs<N> {
        let mut x = *a;
        let mut carry = false;
        if x[0] & 1 == 1 {
            carry = add_in_place(&mut x, &self.m);
        }
        for i in 0..N {
            let next = if i + 1 < N { x[i + 1] & 1 } else { carry as u64 };
            x[i] = (x[i] >> 1) | (next << 63);
        }
        x
    }

    pub fn encode(&self, x: &BigUint) -> Limbs<N> {
        let reduced = if x < &self.modulus {
            to_limbs::<N>(x)
        } else {
            to_limbs::<N>(&(x % &self.modulus))
        };
        self.mul(&reduced, &self.r2)
    }

    /// Montgomery form of a small signed constant.
    pub fn encode_i64(&self, v: i64) -> Limbs<N> {
        let x = self.encode(&BigUint::from(v.unsigned_abs()));
        if v < 0 {
            self.sub(&self.zero(), &x)
        } else {
            x
        }
    }

    #[cfg(test)]
    pub fn decode(&self, x: &Limbs<N>) -> BigUint {
        let mut unit = [0u64; N];
        unit[0] = 1;
        from_limbs(&self.mul(x, &unit))
    }

    /// The raw residue, which shares its gcd with the modulus.
    pub fn raw(&self, x: &Limbs<N>) -> BigUint {
        from_limbs(x)
    }

    pub fn is_zero(x: &Limbs<N>) -> bool {
        x.iter().all(|&w| w == 0)
    }

    pub fn pow(&self, base: &Limbs<N>, exp: &BigUint) -> Limbs<N> {
        let mut result = self.one;
        if exp.is_zero() {
            return result;
        }
        for i in (0..exp.bits()).rev() {
            result = self.sqr(&result);
            if exp.bit(i) {
                result = self.mul(&result, base);
            }
        }
        result
    }
}
