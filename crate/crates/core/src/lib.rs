//! The prime-generating recurrence `a(n) = a(n-1) + gcd(n, a(n-1))`.
//!
//! - [`recurrence`]: step-by-step evolution and the derived sequences.
//! - [`shortcut`]: jumps from one nontrivial gcd to the next.
//! - [`factor`]: exact primality testing and factorization.
//! - [`dynamics`]: transience, bounds, clusters, prime coverage and
//!   equivalence classes of seeds.
//!
//! All algorithms are generic over [`Int`], implemented for `i128` (checked,
//! overflow is an error) and `num_bigint::BigInt`.

pub mod dynamics;
pub mod error;
pub mod factor;
pub mod int;
pub mod recurrence;
pub mod shortcut;

pub use error::{Error, Result};
pub use factor::FactorError;
pub use int::{Int, IntegerPolicy, Limit};
pub use recurrence::{evolve, step, State, StepRecord};
pub use shortcut::{accelerated_evolve, next_nontrivial, Event, EventTrace, JumpOutcome, JumpRule, TraceEnd};
