//! Integer backends for the recurrence.
//!
//! Everything that evolves a trajectory is generic over [`Int`], which has
//! two implementations: `i128` with checked arithmetic (overflow is an
//! error, never a wrap) and [`BigInt`] for unbounded runs. State values are
//! always positive; the signed representation exists so that Δ(n) can be
//! negative for general seeds.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{self, FactorError};

/// Arithmetic backend used by every evolution routine.
pub trait Int:
    Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Clone
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn small(v: u64) -> Self;

    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or_else(Error::overflow)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or_else(Error::overflow)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or_else(Error::overflow)
    }

    /// Smallest prime factor of `|self|`, which must be at least 2.
    fn smallest_prime_factor(&self) -> std::result::Result<Self, FactorError>;

    /// Distinct prime divisors of `|self|` in ascending order.
    fn distinct_prime_divisors(&self) -> std::result::Result<Vec<Self>, FactorError>;

    fn is_prime(&self) -> bool;

    /// Unbounded copy, used for reports and serialization.
    fn to_bigint(&self) -> BigInt;

    /// `None` when the value does not fit this backend.
    fn from_bigint(v: &BigInt) -> Option<Self>;
}

impl Int for i128 {
    fn small(v: u64) -> Self {
        v as i128
    }

    fn smallest_prime_factor(&self) -> std::result::Result<Self, FactorError> {
        let p = factor::smallest_prime_factor(self.unsigned_abs())?;
        Ok(p as i128)
    }

    fn distinct_prime_divisors(&self) -> std::result::Result<Vec<Self>, FactorError> {
        Ok(factor::distinct_prime_divisors(self.unsigned_abs())?
            .into_iter()
            .map(|p| p as i128)
            .collect())
    }

    fn is_prime(&self) -> bool {
        *self >= 0 && factor::is_prime(*self as u128)
    }

    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
}

impl Int for BigInt {
    fn small(v: u64) -> Self {
        BigInt::from(v)
    }

    fn smallest_prime_factor(&self) -> std::result::Result<Self, FactorError> {
        let p = factor::smallest_prime_factor_big(self.magnitude())?;
        Ok(BigInt::from_biguint(Sign::Plus, p))
    }

    fn distinct_prime_divisors(&self) -> std::result::Result<Vec<Self>, FactorError> {
        Ok(factor::distinct_prime_divisors_big(self.magnitude())?
            .into_iter()
            .map(|p| BigInt::from_biguint(Sign::Plus, p))
            .collect())
    }

    fn is_prime(&self) -> bool {
        self.sign() != Sign::Minus && factor::is_prime_big(self.magnitude())
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

/// How values are represented during an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegerPolicy {
    /// 128-bit arithmetic; any value above `bound` is reported as overflow.
    Fixed { bound: u128 },
    Unbounded,
}

impl Default for IntegerPolicy {
    fn default() -> Self {
        IntegerPolicy::Fixed { bound: i128::MAX as u128 }
    }
}

impl IntegerPolicy {
    pub fn fixed() -> Self {
        Self::default()
    }

    /// Upper limit on state values under this policy, as an `i128`.
    pub fn limit_i128(&self) -> Option<i128> {
        match *self {
            IntegerPolicy::Fixed { bound } => Some(bound.min(i128::MAX as u128) as i128),
            IntegerPolicy::Unbounded => None,
        }
    }
}

/// Optional ceiling on values produced by an evolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limit<T>(pub Option<T>);

impl<T: Int> Limit<T> {
    pub fn none() -> Self {
        Limit(None)
    }

    pub fn check(&self, v: &T) -> Result<()> {
        match &self.0 {
            Some(bound) if v > bound => Err(Error::overflow()),
            _ => Ok(()),
        }
    }
}

impl<T> Default for Limit<T> {
    fn default() -> Self {
        Limit(None)
    }
}
