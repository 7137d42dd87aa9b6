//! Harnesses for the two ratio bounds. Both are theorems, so any reported
//! violation is a bug in the evolution code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::recurrence::{evolve, step, State};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport<T = i128> {
    pub seed: State<T>,
    /// `⌈a/n⌉` of the seed for the ceiling check, 2 for the lower bound.
    pub bound: T,
    pub checked_to: T,
    pub violation: Option<State<T>>,
}

impl<T> BoundReport<T> {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// `a(n)/n <= ⌈a(n1)/n1⌉` for every `n1 <= n <= n_max`.
pub fn check_ceiling_bound<T: Int>(seed: &State<T>, n_max: T) -> Result<BoundReport<T>> {
    let ceiling = seed.a.div_ceil(&seed.n);
    let within = |s: &State<T>| -> Result<bool> { Ok(s.a <= ceiling.try_mul(&s.n)?) };
    let mut violation = (!within(seed)?).then(|| seed.clone());
    if violation.is_none() {
        for record in evolve(seed, n_max.clone())? {
            let s = record?.state();
            if !within(&s)? {
                violation = Some(s);
                break;
            }
        }
    }
    Ok(BoundReport {
        seed: seed.clone(),
        bound: ceiling,
        checked_to: n_max,
        violation,
    })
}

/// `a(n)/n > 2` for every `n1 <= n <= n_max`, given `a(n1) > 2 n1 + 1`.
pub fn check_lower_bound<T: Int>(seed: &State<T>, n_max: T) -> Result<BoundReport<T>> {
    let two = T::small(2);
    let edge = seed.n.try_mul(&two)?.try_add(&T::one())?;
    if seed.a <= edge {
        return Err(Error::Precondition(format!(
            "the lower bound needs a > 2n + 1, got {seed}"
        )));
    }
    let mut violation = None;
    for record in evolve(seed, n_max.clone())? {
        let s = record?.state();
        if s.a <= s.n.try_mul(&two)? {
            violation = Some(s);
            break;
        }
    }
    Ok(BoundReport {
        seed: seed.clone(),
        bound: two,
        checked_to: n_max,
        violation,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport<T = i128> {
    pub from: State<T>,
    pub to: State<T>,
    /// `gcd(n + 1, 2n + 1)`, which must be 1.
    pub g: T,
    pub holds: bool,
}

/// From `a(n) = 2n + 1` one step lands exactly on ratio 2.
pub fn check_crossing<T: Int>(n: T) -> Result<CrossingReport<T>> {
    let a = n.try_mul(&T::small(2))?.try_add(&T::one())?;
    let from = State::new(n, a)?;
    let record = step(&from)?;
    let holds = record.a == record.n.try_mul(&T::small(2))?;
    Ok(CrossingReport {
        from,
        g: record.g.clone(),
        to: record.state(),
        holds,
    })
}
