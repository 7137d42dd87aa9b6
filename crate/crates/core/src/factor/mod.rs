//! Primality testing, smallest prime factors and distinct prime divisors.
//!
//! Every answer is exact. The search is layered: trial division by all
//! primes below 2^16, a primality test, then Pollard rho (Brent) and, for
//! wide inputs, the elliptic curve method. Randomized methods only ever
//! propose divisors; a smallest prime factor is certified either by full
//! factorization of the remaining cofactors or by extended trial division
//! below the best candidate.
//!
//! Word-sized inputs (`u64`) use dedicated Montgomery arithmetic; wider
//! inputs are handled over fixed limb counts up to 4096 bits.

macro_rules! dispatch {
    ($limbs:expr, $f:ident, $($arg:expr),*) => {
        match $limbs {
            0..=1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            3 => $f::<3>($($arg),*),
            4 => $f::<4>($($arg),*),
            5 => $f::<5>($($arg),*),
            6 => $f::<6>($($arg),*),
            7..=8 => $f::<8>($($arg),*),
            9..=12 => $f::<12>($($arg),*),
            13..=16 => $f::<16>($($arg),*),
            17..=32 => $f::<32>($($arg),*),
            33..=64 => $f::<64>($($arg),*),
            n => panic!("{} limbs exceeds the supported width", n),
        }
    };
}

mod ecm;
mod engine;
mod mont;
mod prime;
mod rho;
mod small;

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use prime::PSI_13;
pub use small::{primes_below, TRIAL_BOUND};

/// Largest supported input, in bits.
pub const MAX_BITS: u64 = 64 * 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("factorization requires an integer >= 2, got {0}")]
    BelowTwo(String),
    #[error("{bits}-bit input exceeds the supported width of {MAX_BITS} bits")]
    TooWide { bits: u64 },
    #[error("no divisor found for composite {0} within the search budget")]
    Exhausted(String),
}

static RHO_SEED: AtomicU64 = AtomicU64::new(0x5eed_cafe);

/// Seed for the polynomial constants of rho and the ECM curve parameters.
/// Results never depend on it, only running time does.
pub fn set_rho_seed(seed: u64) {
    RHO_SEED.store(seed, Ordering::Relaxed);
}

pub fn rho_seed() -> u64 {
    RHO_SEED.load(Ordering::Relaxed)
}

/// Deterministic primality test. For inputs up to `PSI_13` (about 2^81.5)
/// the answer is proven; above it the Baillie–PSW test is used.
pub fn is_prime(m: u128) -> bool {
    match u64::try_from(m) {
        Ok(v) => small::is_prime_u64(v),
        Err(_) => prime::is_prime_big(&BigUint::from(m)),
    }
}

pub fn is_prime_big(m: &BigUint) -> bool {
    assert!(m.bits() <= MAX_BITS, "primality input exceeds {MAX_BITS} bits");
    prime::is_prime_big(m)
}

/// Least prime dividing `m`.
pub fn smallest_prime_factor(m: u128) -> Result<u128, FactorError> {
    if m < 2 {
        return Err(FactorError::BelowTwo(m.to_string()));
    }
    if let Ok(v) = u64::try_from(m) {
        return Ok(small::smallest_prime_factor_u64(v, &mut engine::rng_for(v as u128)) as u128);
    }
    let p = engine::smallest_prime_factor(&BigUint::from(m))?;
    Ok(p.to_u128().expect("factor of a u128 fits"))
}

pub fn smallest_prime_factor_big(m: &BigUint) -> Result<BigUint, FactorError> {
    check_input(m)?;
    if let Some(v) = m.to_u64() {
        return Ok(BigUint::from(small::smallest_prime_factor_u64(
            v,
            &mut engine::rng_for(v as u128),
        )));
    }
    engine::smallest_prime_factor(m)
}

/// Ascending list of the distinct primes dividing `m`.
pub fn distinct_prime_divisors(m: u128) -> Result<Vec<u128>, FactorError> {
    Ok(distinct_prime_divisors_big(&BigUint::from(m))?
        .into_iter()
        .map(|p| p.to_u128().expect("factor of a u128 fits"))
        .collect())
}

pub fn distinct_prime_divisors_big(m: &BigUint) -> Result<Vec<BigUint>, FactorError> {
    check_input(m)?;
    let mut primes = engine::prime_factors(m)?;
    primes.sort();
    primes.dedup();
    Ok(primes)
}

fn check_input(m: &BigUint) -> Result<(), FactorError> {
    if m < &BigUint::from(2u32) {
        return Err(FactorError::BelowTwo(m.to_string()));
    }
    if m.bits() > MAX_BITS {
        return Err(FactorError::TooWide { bits: m.bits() });
    }
    Ok(())
}

/// Distinct prime divisors of an integer together with its least prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: BigUint,
    pub smallest_prime: BigUint,
    pub distinct_primes: Vec<BigUint>,
}

impl Factorization {
    pub fn of(m: &BigUint) -> Result<Self, FactorError> {
        let distinct_primes = distinct_prime_divisors_big(m)?;
        Ok(Factorization {
            value: m.clone(),
            smallest_prime: distinct_primes[0].clone(),
            distinct_primes,
        })
    }

    /// Multiplicity of each listed prime, in the same order.
    pub fn exponents(&self) -> Vec<u32> {
        self.distinct_primes
            .iter()
            .map(|p| {
                let mut rest = self.value.clone();
                let mut e = 0;
                while (&rest % p).bits() == 0 {
                    rest /= p;
                    e += 1;
                }
                e
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn spec_examples() {
        assert!(is_prime(2));
        assert!(is_prime(587));
        assert!(!is_prime(9));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert_eq!(smallest_prime_factor(45).unwrap(), 3);
        assert_eq!(smallest_prime_factor(95).unwrap(), 5);
        assert_eq!(smallest_prime_factor(101).unwrap(), 101);
        assert_eq!(distinct_prime_divisors(95).unwrap(), vec![5, 19]);
        assert_eq!(distinct_prime_divisors(8).unwrap(), vec![2]);
        assert_eq!(distinct_prime_divisors(203).unwrap(), vec![7, 29]);
    }

    #[test]
    fn below_two_is_an_error() {
        assert!(matches!(smallest_prime_factor(1), Err(FactorError::BelowTwo(_))));
        assert!(matches!(smallest_prime_factor(0), Err(FactorError::BelowTwo(_))));
        assert!(matches!(distinct_prime_divisors(1), Err(FactorError::BelowTwo(_))));
    }

    #[test]
    fn wide_semiprime_smallest_factor() {
        let p = BigUint::from_str("2305843009213693951").unwrap(); // 2^61 - 1
        let q = BigUint::from_str("618970019642690137449562111").unwrap(); // 2^89 - 1
        let n = &p * &q;
        assert_eq!(smallest_prime_factor_big(&n).unwrap(), p);
        assert_eq!(distinct_prime_divisors_big(&n).unwrap(), vec![p, q]);
    }

    #[test]
    fn u128_inputs() {
        let p: u128 = (1 << 61) - 1;
        let q: u128 = (1 << 67) - 1; // 193707721 * 761838257287
        assert_eq!(smallest_prime_factor(p * 3).unwrap(), 3);
        assert_eq!(smallest_prime_factor(q).unwrap(), 193_707_721);
        assert_eq!(
            distinct_prime_divisors(q * 5).unwrap(),
            vec![5, 193_707_721, 761_838_257_287]
        );
        assert!(is_prime(p));
        assert!(!is_prime(q));
    }

    #[test]
    fn factorization_reconstructs_value() {
        let m = BigUint::from(2u32).pow(5) * 3u32.pow(2) * BigUint::from(1_000_003u32).pow(3);
        let f = Factorization::of(&m).unwrap();
        assert_eq!(f.smallest_prime, BigUint::from(2u32));
        let rebuilt = f
            .distinct_primes
            .iter()
            .zip(f.exponents())
            .fold(BigUint::from(1u32), |acc, (p, e)| acc * p.pow(e));
        assert_eq!(rebuilt, m);
    }
}
