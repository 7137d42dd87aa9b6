//! Unaccelerated evolution of `a(n) = a(n-1) + gcd(n, a(n-1))`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::{Int, Limit};

/// A point `(n, a(n))` of the dynamical system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State<T = i128> {
    pub n: T,
    pub a: T,
}

impl<T: Int> State<T> {
    /// Rejects `n < 1` or `a < 1`, which the recurrence does not define.
    pub fn new(n: T, a: T) -> Result<Self> {
        if n < T::one() || a < T::one() {
            return Err(Error::Precondition(format!(
                "states need n >= 1 and a >= 1, got ({n}, {a})"
            )));
        }
        Ok(State { n, a })
    }

    /// The seed `(1, a1)`.
    pub fn seed(a1: T) -> Result<Self> {
        State::new(T::one(), a1)
    }

    /// Exact `a / n` in lowest terms.
    pub fn ratio(&self) -> Ratio<T> {
        Ratio::new(self.a.clone(), self.n.clone())
    }

    /// `Δ(n + 1) = a(n) - (n + 1)`, the quantity whose prime divisors locate
    /// the next nontrivial gcd.
    pub fn next_delta(&self) -> Result<T> {
        self.a.try_sub(&self.n)?.try_sub(&T::one())
    }

    pub fn to_bigint(&self) -> State<num_bigint::BigInt> {
        State {
            n: self.n.to_bigint(),
            a: self.a.to_bigint(),
        }
    }
}

impl<T: std::fmt::Display> std::fmt::Display for State<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n, self.a)
    }
}

/// One step of the recurrence with the per-step quantities of the classic
/// table: `g(n)`, `a(n)`, `Δ(n) = a(n-1) - n` and the reduced ratio.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepRecord<T = i128> {
    pub n: T,
    pub g: T,
    pub a: T,
    /// Signed: negative whenever `a(n-1) < n`.
    pub delta: T,
    pub ratio_num: T,
    pub ratio_den: T,
}

impl<T: Int> StepRecord<T> {
    pub fn state(&self) -> State<T> {
        State {
            n: self.n.clone(),
            a: self.a.clone(),
        }
    }

    pub fn ratio(&self) -> Ratio<T> {
        Ratio::new_raw(self.ratio_num.clone(), self.ratio_den.clone())
    }

    pub fn is_nontrivial(&self) -> bool {
        !self.g.is_one()
    }
}

/// Advances `s` by one index.
pub fn step<T: Int>(s: &State<T>) -> Result<StepRecord<T>> {
    let n = s.n.try_add(&T::one())?;
    let g = n.gcd(&s.a);
    let a = s.a.try_add(&g)?;
    let delta = s.a.try_sub(&n)?;
    let common = a.gcd(&n);
    Ok(StepRecord {
        ratio_num: a.div_floor(&common),
        ratio_den: n.div_floor(&common),
        n,
        g,
        a,
        delta,
    })
}

/// Streaming naive evolution; yields the records for `s0.n + 1 ..= n_max`.
#[derive(Debug, Clone)]
pub struct Evolve<T> {
    state: State<T>,
    n_max: T,
    limit: Limit<T>,
    failed: bool,
}

impl<T: Int> Evolve<T> {
    /// Rejects values above `limit` with an overflow error.
    pub fn with_limit(mut self, limit: Limit<T>) -> Self {
        self.limit = limit;
        self
    }

    pub fn state(&self) -> &State<T> {
        &self.state
    }
}

impl<T: Int> Iterator for Evolve<T> {
    type Item = Result<StepRecord<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.state.n >= self.n_max {
            return None;
        }
        let record = step(&self.state).and_then(|r| {
            self.limit.check(&r.a)?;
            Ok(r)
        });
        match record {
            Ok(r) => {
                self.state = r.state();
                Some(Ok(r))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e.at_index(&(self.state.n.clone() + T::one()))))
            }
        }
    }
}

pub fn evolve<T: Int>(s0: &State<T>, n_max: T) -> Result<Evolve<T>> {
    if n_max < s0.n {
        return Err(Error::Precondition(format!(
            "horizon {n_max} lies before the seed index {}",
            s0.n
        )));
    }
    Ok(Evolve {
        state: s0.clone(),
        n_max,
        limit: Limit::none(),
        failed: false,
    })
}

/// The first `count` values of `g` after the seed.
pub fn difference_sequence<T: Int>(s0: &State<T>, count: usize) -> Result<Vec<T>> {
    let mut s = s0.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let r = step(&s)?;
        out.push(r.g.clone());
        s = r.state();
    }
    Ok(out)
}

/// `b(n)/b(n-1) - 1` for `n = 2 ..= count + 1`, where `b(1) = 1` and
/// `b(n) = b(n-1) + lcm(n, b(n-1))`.
///
/// `b` grows roughly like a factorial, so the `i128` backend overflows
/// after a couple of dozen terms; use `BigInt` for long runs.
pub fn lcm_variant_sequence<T: Int>(count: usize) -> Result<Vec<T>> {
    let mut b = T::one();
    let mut out = Vec::with_capacity(count);
    for i in 2..=count as u64 + 1 {
        let n = T::small(i);
        let l = n.try_mul(&b.div_floor(&n.gcd(&b)))?;
        let next = b.try_add(&l)?;
        let (quotient, rem) = next.div_rem(&b);
        if !rem.is_zero() {
            return Err(Error::Invariant(format!("b({i}) not divisible by b({})", i - 1)));
        }
        out.push(quotient.try_sub(&T::one())?);
        b = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn st(n: i128, a: i128) -> State {
        State::new(n, a).unwrap()
    }

    #[test]
    fn step_examples() {
        let r = step(&st(1, 7)).unwrap();
        assert_eq!((r.n, r.g, r.a, r.delta), (2, 1, 8, 5));
        let r = step(&st(4, 10)).unwrap();
        assert_eq!((r.g, r.a, r.delta), (5, 15, 5));
        assert_eq!((r.ratio_num, r.ratio_den), (3, 1));
        let r = step(&st(1, 1)).unwrap();
        assert_eq!((r.g, r.a), (1, 2));
    }

    #[test]
    fn evolve_examples() {
        let records: Vec<_> = evolve(&st(1, 7), 23).unwrap().collect::<Result<_>>().unwrap();
        let last = records.last().unwrap();
        assert_eq!((last.n, last.g, last.a), (23, 23, 69));
        assert_eq!(last.ratio(), Ratio::from_integer(3));

        let last = evolve(&st(1, 7), 106).unwrap().last().unwrap().unwrap();
        assert_eq!((last.a, last.delta, last.g), (316, 209, 1));

        assert_eq!(evolve(&st(1, 7), 1).unwrap().count(), 0);
        assert!(evolve(&st(5, 7), 4).is_err());
    }

    #[test]
    fn negative_delta_for_small_seeds() {
        let r = step(&st(10, 3)).unwrap();
        assert_eq!(r.delta, -8);
        assert_eq!(r.g, 1);
    }

    #[test]
    fn difference_examples() {
        assert_eq!(
            difference_sequence(&st(1, 7), 11).unwrap(),
            vec![1, 1, 1, 5, 3, 1, 1, 1, 1, 11, 3]
        );
        assert_eq!(difference_sequence(&st(1, 7), 46).unwrap()[45], 47);
        assert_eq!(difference_sequence(&st(1, 532), 17).unwrap()[16], 9);
    }

    #[test]
    fn lcm_variant_examples() {
        assert_eq!(lcm_variant_sequence::<i128>(1).unwrap(), vec![2]);
        assert_eq!(lcm_variant_sequence::<i128>(3).unwrap(), vec![2, 1, 2]);
        let long = lcm_variant_sequence::<BigInt>(300).unwrap();
        for v in long {
            assert!(v == BigInt::from(1) || v.is_prime(), "{v}");
        }
    }

    #[test]
    fn lcm_variant_overflows_fixed_width() {
        assert!(matches!(lcm_variant_sequence::<i128>(500), Err(Error::Overflow(_))));
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(State::new(0i128, 5).is_err());
        assert!(State::new(3i128, 0).is_err());
    }

    #[test]
    fn limit_reports_overflow_index() {
        let err = evolve(&st(1, 7), 100)
            .unwrap()
            .with_limit(Limit(Some(20)))
            .find_map(|r| r.err())
            .unwrap();
        assert_eq!(err, Error::Overflow(Some("9".into())));
    }
}
