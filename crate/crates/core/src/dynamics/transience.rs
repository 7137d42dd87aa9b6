use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::recurrence::State;
use crate::shortcut::{lemma_ratio, next_nontrivial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransienceOutcome {
    /// `a = r·n` with `r ∈ {2, 3}`: every later event gcd is prime.
    EnteredLemmaRegime { ratio: u32 },
    /// `|Δ| = 1`: every later gcd is 1.
    FixedOnes,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransienceReport<T = i128> {
    pub seed: State<T>,
    pub outcome: TransienceOutcome,
    /// Index after which every observed gcd is 1 or prime: the last
    /// composite event, or the seed index when there was none.
    pub threshold: T,
    /// `(n, g(n))` with `g(n)` composite, in order.
    pub non_prime_events: Vec<(T, T)>,
    pub regime_entry: Option<State<T>>,
    pub events_examined: u64,
}

/// First state strictly between `s` and the next event at `n_next` where
/// the ratio is exactly 2 or 3 and the lemma applies.
///
/// Along a run of ones `a - n = D` is fixed, so ratio `r` is reached at
/// `m = D / (r - 1)`; ratio 3 comes first.
pub fn regime_entry_during_run<T: Int>(s: &State<T>, n_next: &T) -> Result<Option<(State<T>, u32)>> {
    let d = s.a.try_sub(&s.n)?;
    if !d.is_positive() {
        return Ok(None);
    }
    for r in [3u32, 2] {
        let r1 = T::small(r as u64 - 1);
        let (m, rem) = d.div_rem(&r1);
        if rem.is_zero() && m > s.n && &m < n_next && d >= T::small(3) {
            let a = m.try_mul(&T::small(r as u64))?;
            return Ok(Some((State { n: m, a }, r)));
        }
    }
    Ok(None)
}

/// Follows `seed` event by event until the lemma regime, the fixed-ones
/// state, or `budget` events.
pub fn transience_check<T: Int>(seed: &State<T>, budget: u64) -> Result<TransienceReport<T>> {
    if budget == 0 {
        return Err(Error::Precondition("transience budget must be at least 1".into()));
    }
    let mut report = TransienceReport {
        seed: seed.clone(),
        outcome: TransienceOutcome::BudgetExhausted,
        threshold: seed.n.clone(),
        non_prime_events: Vec::new(),
        regime_entry: None,
        events_examined: 0,
    };
    let mut s = seed.clone();
    if let Some(r) = lemma_ratio(&s) {
        report.outcome = TransienceOutcome::EnteredLemmaRegime { ratio: r };
        report.regime_entry = Some(s);
        return Ok(report);
    }
    while report.events_examined < budget {
        let jump = match next_nontrivial(&s) {
            Ok(j) => j,
            Err(Error::NoNontrivialGcd { .. }) => {
                report.outcome = TransienceOutcome::FixedOnes;
                return Ok(report);
            }
            Err(e) => return Err(e.at_index(&s.n)),
        };
        if let Some((entry, r)) = regime_entry_during_run(&s, &jump.n2)? {
            report.outcome = TransienceOutcome::EnteredLemmaRegime { ratio: r };
            report.regime_entry = Some(entry);
            return Ok(report);
        }
        report.events_examined += 1;
        if !jump.p.is_prime() {
            report.threshold = jump.n2.clone();
            report.non_prime_events.push((jump.n2.clone(), jump.p.clone()));
        }
        s = jump.landing();
        if let Some(r) = lemma_ratio(&s) {
            report.outcome = TransienceOutcome::EnteredLemmaRegime { ratio: r };
            report.regime_entry = Some(s);
            return Ok(report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::evolve;

    fn seed(a: i128) -> State {
        State::seed(a).unwrap()
    }

    #[test]
    fn canonical_seed_enters_at_three() {
        let r = transience_check(&seed(7), 100).unwrap();
        assert_eq!(r.outcome, TransienceOutcome::EnteredLemmaRegime { ratio: 3 });
        assert_eq!(r.regime_entry, Some(State { n: 3, a: 9 }));
        assert!(r.non_prime_events.is_empty());
        assert!(r.threshold <= 3);
    }

    #[test]
    fn composite_gcd_examples() {
        let r = transience_check(&seed(532), 100_000).unwrap();
        assert!(r.non_prime_events.contains(&(18, 9)));
        assert!(matches!(r.outcome, TransienceOutcome::EnteredLemmaRegime { .. }));

        let r = transience_check(&seed(801), 100_000).unwrap();
        assert!(r.non_prime_events.contains(&(21, 21)));
    }

    #[test]
    fn fixed_ones_seed() {
        let r = transience_check(&seed(3), 10).unwrap();
        assert_eq!(r.outcome, TransienceOutcome::FixedOnes);
        assert_eq!(r.events_examined, 0);
    }

    #[test]
    fn budget_is_respected() {
        let r = transience_check(&seed(532), 1).unwrap();
        assert_eq!(r.outcome, TransienceOutcome::BudgetExhausted);
        assert_eq!(r.events_examined, 1);
        assert!(transience_check(&seed(532), 0).is_err());
    }

    #[test]
    fn regime_entry_matches_naive_first_ratio_hit() {
        for a1 in 4..300i128 {
            let r = transience_check(&seed(a1), 100_000).unwrap();
            let Some(entry) = r.regime_entry else { continue };
            let first = evolve(&seed(a1), entry.n + 1)
                .unwrap()
                .map(|rec| rec.unwrap().state())
                .find(|s| lemma_ratio(s).is_some());
            let first = if lemma_ratio(&seed(a1)).is_some() { Some(seed(a1)) } else { first };
            assert_eq!(first, Some(entry), "seed {a1}");
        }
    }
}
