use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::int::Int;
use crate::recurrence::State;
use crate::shortcut::{Event, JumpRule, Shortcut, TraceEnd};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport<T = i128> {
    pub seed: State<T>,
    pub events: u64,
    /// How often each prime appeared as an event gcd.
    pub counts: BTreeMap<T, u64>,
    /// Events whose gcd was composite; they are not tallied in `counts`.
    pub composite_events: u64,
    pub smallest_absent_odd_prime: T,
    /// State after the last event.
    pub last: State<T>,
}

impl<T: Int> CoverageReport<T> {
    pub fn primes_seen(&self) -> impl Iterator<Item = &T> {
        self.counts.keys()
    }

    pub fn count(&self, p: &T) -> u64 {
        self.counts.get(p).copied().unwrap_or(0)
    }
}

/// Tallies the primes among the first `num_events` event gcds from `seed`.
pub fn prime_coverage<T: Int>(seed: &State<T>, num_events: u64) -> Result<CoverageReport<T>> {
    prime_coverage_with(seed, num_events, |_, _| {})
}

/// [`prime_coverage`] that reports every event to `progress` as it lands,
/// together with its 1-based position.
pub fn prime_coverage_with<T: Int>(
    seed: &State<T>,
    num_events: u64,
    mut progress: impl FnMut(u64, &Event<T>),
) -> Result<CoverageReport<T>> {
    if num_events == 0 {
        return Err(Error::Precondition("coverage needs at least one event".into()));
    }
    let mut stream = Shortcut::new(seed.clone());
    let mut counts = BTreeMap::new();
    let mut composite_events = 0;
    let mut seen = 0;
    while seen < num_events {
        let Some(event) = stream.next() else { break };
        let event = event?;
        seen += 1;
        progress(seen, &event);
        if event.rule == JumpRule::Lemma || event.g.is_prime() {
            *counts.entry(event.g).or_insert(0) += 1;
        } else {
            composite_events += 1;
        }
    }
    if seen < num_events {
        if let Some(TraceEnd::NoNontrivialGcd(s)) = stream.end() {
            return Err(Error::NoNontrivialGcd {
                n: s.n.to_string(),
                a: s.a.to_string(),
            });
        }
    }
    let mut q = T::small(3);
    while counts.contains_key(&q) || !q.is_prime() {
        q = q.try_add(&T::small(2))?;
    }
    Ok(CoverageReport {
        seed: seed.clone(),
        events: seen,
        counts,
        composite_events,
        smallest_absent_odd_prime: q,
        last: stream.state().clone(),
    })
}
