//! Divisor search and certification for multi-limb inputs.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ecm::{ecm_curve, B2_FACTOR, SCHEDULE};
use super::mont::limb_count;
use super::prime::is_prime_big;
use super::rho::rho_brent;
use super::small::{self, extended_primes, small_primes, EXTENDED_TRIAL_BOUND, TRIAL_BOUND};
use super::{rho_seed, FactorError};

const RHO_BUDGET: u64 = 1 << 18;

pub fn rng_for(m: u128) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rho_seed() ^ (m as u64) ^ ((m >> 64) as u64).rotate_left(29))
}

fn rng_for_big(m: &BigUint) -> ChaCha8Rng {
    let low = m.iter_u64_digits().next().unwrap_or(0) as u128;
    let high = m.iter_u64_digits().nth(1).unwrap_or(0) as u128;
    rng_for(low | (high << 64))
}

/// Primes below the trial bound packed into products that fit a word, so a
/// single multi-limb remainder serves several primes.
fn packed_small_primes() -> &'static [(u64, Vec<u32>)] {
    static GROUPS: OnceLock<Vec<(u64, Vec<u32>)>> = OnceLock::new();
    GROUPS.get_or_init(|| {
        let mut groups = Vec::new();
        let mut product: u64 = 1;
        let mut members = Vec::new();
        for &p in small_primes() {
            match product.checked_mul(p as u64) {
                Some(next) => {
                    product = next;
                    members.push(p);
                }
                None => {
                    groups.push((product, std::mem::take(&mut members)));
                    product = p as u64;
                    members.push(p);
                }
            }
        }
        groups.push((product, members));
        groups
    })
}

#[inline]
fn rem_u64(digits: &[u64], d: u64) -> u64 {
    let mut r: u128 = 0;
    for &w in digits.iter().rev() {
        r = ((r << 64) | w as u128) % d as u128;
    }
    r as u64
}

/// Least prime below the trial bound that divides `m`.
fn trial_first(digits: &[u64]) -> Option<u64> {
    for (product, members) in packed_small_primes() {
        let r = rem_u64(digits, *product);
        for &p in members {
            if r.is_multiple_of(p as u64) {
                return Some(p as u64);
            }
        }
    }
    None
}

/// Least prime in `[TRIAL_BOUND, below)` dividing `m`.
fn extended_trial_first(digits: &[u64], below: u64) -> Option<u64> {
    let primes = extended_primes();
    let start = primes.partition_point(|&p| p < TRIAL_BOUND);
    primes[start..]
        .iter()
        .map(|&p| p as u64)
        .take_while(|&p| p < below)
        .find(|&p| rem_u64(digits, p) == 0)
}

fn perfect_power_root(c: &BigUint) -> Option<BigUint> {
    // every prime factor exceeds 2^16, so the exponent is at most bits / 16
    let max_k = (c.bits() / 16).max(2) as u32;
    (2..=max_k).find_map(|k| {
        let r = c.nth_root(k);
        (r.pow(k) == *c).then_some(r)
    })
}

/// Some nontrivial divisor of the odd composite `c`, which has no prime
/// factor below the trial bound.
fn find_divisor(c: &BigUint, rng: &mut ChaCha8Rng) -> Result<BigUint, FactorError> {
    if let Some(v) = c.to_u64() {
        return Ok(BigUint::from(small::find_divisor_u64(v, rng)));
    }
    if let Some(r) = perfect_power_root(c) {
        return Ok(r);
    }
    let limbs = limb_count(c);
    for _ in 0..2 {
        let k: u64 = rng.gen_range(1..1 << 32);
        let x0: u64 = rng.gen();
        if let Some(d) = dispatch!(limbs, rho_brent, c, k, x0, RHO_BUDGET) {
            return Ok(d);
        }
    }
    for &(b1, curves) in SCHEDULE {
        for _ in 0..curves {
            let sigma: u64 = rng.gen_range(6..1 << 32);
            if let Some(d) = dispatch!(limbs, ecm_curve, c, sigma, b1, b1 * B2_FACTOR) {
                return Ok(d);
            }
        }
    }
    Err(FactorError::Exhausted(c.to_string()))
}

/// Smallest prime factor of an `m` wider than one word.
pub fn smallest_prime_factor(m: &BigUint) -> Result<BigUint, FactorError> {
    let digits = m.to_u64_digits();
    if let Some(p) = trial_first(&digits) {
        return Ok(BigUint::from(p));
    }
    if is_prime_big(m) {
        return Ok(m.clone());
    }
    let mut rng = rng_for_big(m);
    let mut best: Option<BigUint> = None;
    let mut pending = vec![m.clone()];
    while let Some(c) = pending.pop() {
        if is_prime_big(&c) {
            if best.as_ref().is_none_or(|b| &c < b) {
                best = Some(c);
            }
            continue;
        }
        if let Some(b) = best.as_ref().and_then(|b| b.to_u64()) {
            if b <= EXTENDED_TRIAL_BOUND as u64 {
                // only a prime in [2^16, b) could still beat the candidate
                if let Some(p) = extended_trial_first(&c.to_u64_digits(), b) {
                    best = Some(BigUint::from(p));
                }
                continue;
            }
        }
        let d = find_divisor(&c, &mut rng)?;
        let other = &c / &d;
        let (small_part, large_part) = if d < other { (d, other) } else { (other, d) };
        pending.push(large_part);
        pending.push(small_part);
    }
    Ok(best.expect("a composite has at least one prime factor"))
}

/// All prime factors of `m >= 2`, with multiplicity, unordered.
pub fn prime_factors(m: &BigUint) -> Result<Vec<BigUint>, FactorError> {
    let mut out = Vec::new();
    if let Some(v) = m.to_u64() {
        let mut words = Vec::new();
        small::prime_factors_u64(v, &mut rng_for(v as u128), &mut words);
        out.extend(words.into_iter().map(BigUint::from));
        return Ok(out);
    }
    let mut rest = m.clone();
    for (product, members) in packed_small_primes() {
        if rest.is_one() {
            break;
        }
        let r = rem_u64(&rest.to_u64_digits(), *product);
        for &p in members {
            if !r.is_multiple_of(p as u64) {
                continue;
            }
            let p = BigUint::from(p);
            while (&rest % &p).bits() == 0 {
                rest /= &p;
                out.push(p.clone());
            }
        }
    }
    if rest.is_one() {
        return Ok(out);
    }
    let mut rng = rng_for_big(m);
    let mut pending = vec![rest];
    while let Some(c) = pending.pop() {
        if c.to_u64().is_some() || is_prime_big(&c) {
            if let Some(v) = c.to_u64() {
                let mut words = Vec::new();
                small::prime_factors_u64(v, &mut rng, &mut words);
                out.extend(words.into_iter().map(BigUint::from));
            } else {
                out.push(c);
            }
            continue;
        }
        let d = find_divisor(&c, &mut rng)?;
        pending.push(&c / &d);
        pending.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_groups_cover_all_small_primes() {
        let flattened: Vec<u32> = packed_small_primes()
            .iter()
            .flat_map(|(_, m)| m.iter().copied())
            .collect();
        assert_eq!(flattened, small_primes());
        for (product, members) in packed_small_primes() {
            assert_eq!(members.iter().map(|&p| p as u64).product::<u64>(), *product);
        }
    }

    #[test]
    fn certification_by_extended_trial_division() {
        // 70001 * 65537 * (2^61 - 1)^2: rho tends to find the large square
        // part first, the extended scan must still return 65537
        let big = BigUint::from((1u64 << 61) - 1);
        let m = BigUint::from(70_001u32) * BigUint::from(65_537u32) * &big * &big;
        assert_eq!(smallest_prime_factor(&m).unwrap(), BigUint::from(65_537u32));
    }
}
