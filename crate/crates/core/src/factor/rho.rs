//! Brent's cycle-finding variant of Pollard rho over multi-limb residues.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::mont::Mont;

const BATCH: u64 = 128;

/// Runs one rho walk `y -> y^2 + c` on the odd composite `n` for at most
/// `max_iter` steps. A `Some` result is a nontrivial divisor.
pub fn rho_brent<const N: usize>(n: &BigUint, c: u64, x0: u64, max_iter: u64) -> Option<BigUint> {
    let ctx = Mont::<N>::new(n);
    let c = ctx.encode(&BigUint::from(c));
    let f = |y: &[u64; N]| ctx.add(&ctx.sqr(y), &c);
    let mut y = ctx.encode(&BigUint::from(x0));
    let mut q = ctx.one();
    let mut g;
    let mut r: u64 = 1;
    let mut x;
    let mut ys;
    let mut total = 0u64;
    loop {
        x = y;
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = ctx.mul(&q, &ctx.sub(&x, &y));
            }
            g = ctx.raw(&q).gcd(n);
            k += BATCH;
            if k >= r || !g.is_one() {
                break;
            }
        }
        total += r;
        r *= 2;
        if !g.is_one() {
            break;
        }
        if total > max_iter {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = ctx.raw(&ctx.sub(&x, &ys)).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}
