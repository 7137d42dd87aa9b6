//! Jumping straight to the next nontrivial gcd.
//!
//! On a run of ones `a(n) - n` is constant, so the landing index of the next
//! event is determined by the prime divisors of `Δ = a(n1) - n1 - 1`. For
//! states `a = r·n` with `r ∈ {2, 3}` only the smallest prime divisor `p` is
//! needed and the landing is again of the form `a = r·n`; every other state
//! takes the minimum of `mod_1(-n1, p)` over all primes `p | Δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::{Int, Limit};
use crate::recurrence::State;

/// The unique `x ≡ a (mod b)` with `j <= x < j + b`.
pub fn mod_j<T: Int>(a: &T, b: &T, j: &T) -> Result<T> {
    if *b < T::one() {
        return Err(Error::Precondition(format!("mod_j needs b >= 1, got {b}")));
    }
    let offset = a.try_sub(j)?.mod_floor(b);
    j.try_add(&offset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpRule {
    /// `a = r·n`, `r ∈ {2, 3}`: one smallest-prime-factor computation.
    Lemma,
    /// Minimum over all prime divisors of `Δ`.
    General,
    /// `Δ = 0`: the very next step is the event.
    NaiveFallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JumpOutcome<T = i128> {
    pub n2: T,
    /// `g(n2)`; prime under the lemma rule.
    pub p: T,
    pub a2: T,
    pub ones_skipped: T,
    pub rule: JumpRule,
}

impl<T: Int> JumpOutcome<T> {
    pub fn landing(&self) -> State<T> {
        State {
            n: self.n2.clone(),
            a: self.a2.clone(),
        }
    }
}

/// The ratio `r ∈ {2, 3}` of `s` if the lemma applies to it.
pub fn lemma_ratio<T: Int>(s: &State<T>) -> Option<u32> {
    for r in [3u32, 2] {
        let rt = T::small(r as u64);
        let rn = s.n.checked_mul(&rt)?;
        if rn == s.a {
            // (r - 1) n >= 3 keeps Δ >= 2
            let reach = s.n.checked_mul(&T::small(r as u64 - 1))?;
            return (reach >= T::small(3)).then_some(r);
        }
    }
    None
}

/// Jump from `a = r·n` to the next event, which again satisfies `a = r·n`.
pub fn lemma_jump<T: Int>(s: &State<T>, r: u32) -> Result<JumpOutcome<T>> {
    if r != 2 && r != 3 {
        return Err(Error::Precondition(format!("lemma jump needs r in {{2, 3}}, got {r}")));
    }
    let rt = T::small(r as u64);
    let r1 = T::small(r as u64 - 1);
    if s.n.try_mul(&rt)? != s.a {
        return Err(Error::Precondition(format!("state {s} does not satisfy a = {r}n")));
    }
    let reach = s.n.try_mul(&r1)?;
    if reach < T::small(3) {
        return Err(Error::Precondition(format!(
            "state {s} has (r - 1) n < 3, outside the lemma's range"
        )));
    }
    let delta = reach.try_sub(&T::one())?;
    let p = delta.smallest_prime_factor()?;
    let (k, rem) = p.try_sub(&T::one())?.div_rem(&r1);
    if !rem.is_zero() {
        return Err(Error::Invariant(format!("{} does not divide {p} - 1", r - 1)));
    }
    let n2 = s.n.try_add(&k)?;
    let a2 = n2.try_mul(&rt)?;
    debug_assert!(delta.is_multiple_of(&p));
    debug_assert_eq!(a2, s.a.clone() + k.clone() - T::one() + p.clone());
    Ok(JumpOutcome {
        ones_skipped: k - T::one(),
        n2,
        p,
        a2,
        rule: JumpRule::Lemma,
    })
}

/// Least `k >= j` with `gcd(n + k, n + delta + k) != 1`, as the minimum of
/// `mod_j(-n, p)` over the primes `p` dividing `delta`.
pub fn general_jump<T: Int>(n: &T, delta: &T, j: &T) -> Result<T> {
    if *delta < T::small(2) {
        return Err(Error::Precondition(format!("general jump needs delta >= 2, got {delta}")));
    }
    if n.is_negative() {
        return Err(Error::Precondition(format!("general jump needs n >= 0, got {n}")));
    }
    let minus_n = T::zero().try_sub(n)?;
    let mut best: Option<T> = None;
    for p in delta.distinct_prime_divisors()? {
        let k = mod_j(&minus_n, &p, j)?;
        if best.as_ref().is_none_or(|b| &k < b) {
            best = Some(k);
        }
    }
    Ok(best.expect("delta >= 2 has a prime divisor"))
}

/// Location of the next nontrivial gcd after `s`, for any valid state.
///
/// The frame is `gcd(n + k, n + Δ + k)` with `n = s.n` and
/// `Δ = s.a - s.n - 1`, so the event lands at index `s.n + k`. A negative
/// `Δ` behaves like `|Δ|`; `|Δ| = 1` never produces another event.
pub fn next_nontrivial<T: Int>(s: &State<T>) -> Result<JumpOutcome<T>> {
    let delta = s.next_delta()?;
    if delta.is_zero() {
        let n2 = s.n.try_add(&T::one())?;
        let a2 = s.a.try_add(&n2)?;
        return Ok(JumpOutcome {
            p: n2.clone(),
            n2,
            a2,
            ones_skipped: T::zero(),
            rule: JumpRule::NaiveFallback,
        });
    }
    let magnitude = delta.abs();
    if magnitude.is_one() {
        return Err(Error::NoNontrivialGcd {
            n: s.n.to_string(),
            a: s.a.to_string(),
        });
    }
    let k = general_jump(&s.n, &magnitude, &T::one())?;
    let n2 = s.n.try_add(&k)?;
    let a_before = s.a.try_add(&k)?.try_sub(&T::one())?;
    let g = n2.gcd(&a_before);
    debug_assert!(!g.is_one());
    let a2 = a_before.try_add(&g)?;
    Ok(JumpOutcome {
        ones_skipped: k - T::one(),
        n2,
        p: g,
        a2,
        rule: JumpRule::General,
    })
}

/// Lemma jump when it applies, general jump otherwise.
pub fn jump<T: Int>(s: &State<T>) -> Result<JumpOutcome<T>> {
    match lemma_ratio(s) {
        Some(r) => lemma_jump(s, r),
        None => next_nontrivial(s),
    }
}

/// A nontrivial gcd event `g(n) != 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event<T = i128> {
    pub n: T,
    pub g: T,
    pub a: T,
    /// `Δ(n) = a(n-1) - n`, shared by the whole preceding run of ones.
    pub delta: T,
    /// Steps with `g = 1` between the previous event (or seed) and this one.
    pub ones_before: T,
    pub rule: JumpRule,
}

impl<T: Int> Event<T> {
    pub fn state(&self) -> State<T> {
        State {
            n: self.n.clone(),
            a: self.a.clone(),
        }
    }
}

/// Why an accelerated evolution stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceEnd<T = i128> {
    /// The next event lies beyond the horizon.
    Horizon,
    /// The requested number of events was produced.
    EventLimit,
    /// The state reached `a = n + 2` or `a = n`; all later gcds are 1.
    NoNontrivialGcd(State<T>),
}

/// Lazy stream of nontrivial events from a seed.
#[derive(Debug, Clone)]
pub struct Shortcut<T = i128> {
    state: State<T>,
    n_max: Option<T>,
    limit: Limit<T>,
    end: Option<TraceEnd<T>>,
    failed: bool,
}

impl<T: Int> Shortcut<T> {
    pub fn new(seed: State<T>) -> Self {
        Shortcut {
            state: seed,
            n_max: None,
            limit: Limit::none(),
            end: None,
            failed: false,
        }
    }

    /// Stops before the first event with index above `n_max`.
    pub fn until(mut self, n_max: T) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn with_limit(mut self, limit: Limit<T>) -> Self {
        self.limit = limit;
        self
    }

    /// State after the most recent event (the seed before any).
    pub fn state(&self) -> &State<T> {
        &self.state
    }

    pub fn end(&self) -> Option<&TraceEnd<T>> {
        self.end.as_ref()
    }

    fn advance(&mut self) -> Result<Option<Event<T>>> {
        let delta = self.state.next_delta()?;
        let outcome = match jump(&self.state) {
            Ok(o) => o,
            Err(Error::NoNontrivialGcd { .. }) => {
                self.end = Some(TraceEnd::NoNontrivialGcd(self.state.clone()));
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        if let Some(n_max) = &self.n_max {
            if &outcome.n2 > n_max {
                self.end = Some(TraceEnd::Horizon);
                return Ok(None);
            }
        }
        self.limit.check(&outcome.a2)?;
        self.state = outcome.landing();
        Ok(Some(Event {
            n: outcome.n2,
            g: outcome.p,
            a: outcome.a2,
            delta,
            ones_before: outcome.ones_skipped,
            rule: outcome.rule,
        }))
    }
}

impl<T: Int> Iterator for Shortcut<T> {
    type Item = Result<Event<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.end.is_some() {
            return None;
        }
        match self.advance() {
            Ok(event) => event.map(Ok),
            Err(e) => {
                self.failed = true;
                Some(Err(e.at_index(&self.state.n)))
            }
        }
    }
}

/// All events of an accelerated evolution together with how it ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTrace<T = i128> {
    pub seed: State<T>,
    pub events: Vec<Event<T>>,
    pub end: TraceEnd<T>,
}

impl<T: Int> EventTrace<T> {
    pub fn gcds(&self) -> impl Iterator<Item = &T> {
        self.events.iter().map(|e| &e.g)
    }
}

/// Every event with `s0.n < n <= n_max`.
pub fn accelerated_evolve<T: Int>(s0: &State<T>, n_max: T) -> Result<EventTrace<T>> {
    if n_max < s0.n {
        return Err(Error::Precondition(format!(
            "horizon {n_max} lies before the seed index {}",
            s0.n
        )));
    }
    let mut stream = Shortcut::new(s0.clone()).until(n_max);
    let events = stream.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(EventTrace {
        seed: s0.clone(),
        events,
        end: stream.end.unwrap_or(TraceEnd::Horizon),
    })
}

/// The first `count` events (fewer if the evolution stops producing them).
pub fn first_events<T: Int>(s0: &State<T>, count: usize) -> Result<EventTrace<T>> {
    let mut stream = Shortcut::new(s0.clone());
    let events = stream.by_ref().take(count).collect::<Result<Vec<_>>>()?;
    let end = if events.len() == count {
        TraceEnd::EventLimit
    } else {
        stream.end.unwrap_or(TraceEnd::EventLimit)
    };
    Ok(EventTrace {
        seed: s0.clone(),
        events,
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(n: i128, a: i128) -> State {
        State::new(n, a).unwrap()
    }

    #[test]
    fn mod_j_examples() {
        assert_eq!(mod_j(&-4i128, &5, &1).unwrap(), 1);
        assert_eq!(mod_j(&-48i128, &5, &1).unwrap(), 2);
        assert_eq!(mod_j(&7i128, &7, &0).unwrap(), 0);
        assert!(mod_j(&7i128, &0, &0).is_err());
    }

    #[test]
    fn lemma_examples() {
        let o = lemma_jump(&st(5, 15), 3).unwrap();
        assert_eq!((o.p, o.n2, o.a2), (3, 6, 18));
        let o = lemma_jump(&st(6, 18), 3).unwrap();
        assert_eq!((o.p, o.n2, o.a2, o.ones_skipped), (11, 11, 33, 4));
        let o = lemma_jump(&st(24, 72), 3).unwrap();
        assert_eq!((o.p, o.n2, o.a2), (47, 47, 141));
        assert_eq!(o.rule, JumpRule::Lemma);
    }

    #[test]
    fn lemma_rejects_excluded_seeds() {
        assert!(lemma_jump(&st(2, 4), 2).is_err());
        assert!(lemma_jump(&st(1, 3), 3).is_err());
        assert!(lemma_jump(&st(1, 2), 2).is_err());
        assert!(lemma_jump(&st(5, 16), 3).is_err());
        assert!(lemma_jump(&st(5, 20), 4).is_err());
    }

    #[test]
    fn general_jump_examples() {
        assert_eq!(general_jump(&48i128, &95, &1).unwrap(), 2);
        assert_eq!(general_jump(&0i128, &2, &1).unwrap(), 2);
        assert_eq!(general_jump(&101i128, &201, &1).unwrap(), 1);
        assert!(general_jump(&5i128, &1, &1).is_err());
    }

    #[test]
    fn next_nontrivial_examples() {
        let o = next_nontrivial(&st(48, 144)).unwrap();
        assert_eq!((o.n2, o.p, o.a2), (50, 5, 150));
        assert!(matches!(next_nontrivial(&st(1, 3)), Err(Error::NoNontrivialGcd { .. })));
        let o = next_nontrivial(&st(6, 7)).unwrap();
        assert_eq!((o.n2, o.p, o.a2), (7, 7, 14));
    }

    #[test]
    fn negative_delta_jump() {
        // Δ = 3 - 10 - 1 = -8: gcd(10 + k, 2 + k) first exceeds 1 at k = 2
        let o = next_nontrivial(&st(10, 3)).unwrap();
        assert_eq!((o.n2, o.p, o.a2), (12, 4, 8));
    }

    #[test]
    fn canonical_trace() {
        let trace = accelerated_evolve(&st(1, 7), 106).unwrap();
        let g: Vec<i128> = trace.gcds().copied().collect();
        assert_eq!(g, [5, 3, 11, 3, 23, 3, 47, 3, 5, 3, 101, 3, 7]);
        let n: Vec<i128> = trace.events.iter().map(|e| e.n).collect();
        assert_eq!(n, [5, 6, 11, 12, 23, 24, 47, 48, 50, 51, 101, 102, 105]);
        assert_eq!(trace.end, TraceEnd::Horizon);

        let first = first_events(&st(1, 7), 19).unwrap();
        let g: Vec<i128> = first.gcds().copied().collect();
        assert_eq!(&g[16..19], &[233, 3, 467]);
    }

    #[test]
    fn seed_two_lands_at_two() {
        let e = first_events(&st(1, 2), 1).unwrap().events.remove(0);
        assert_eq!((e.n, e.g, e.a), (2, 2, 4));
        let trace = first_events(&st(1, 2), 5).unwrap();
        assert_eq!(trace.events.len(), 1);
        assert_eq!(trace.end, TraceEnd::NoNontrivialGcd(st(2, 4)));
    }
}
