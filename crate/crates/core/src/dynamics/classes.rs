//! Seeds `a(1)` whose trajectories meet.
//!
//! Two trajectories that share any state coincide from then on, so they
//! share every later event. Seeds are therefore compared on the states where
//! they land after a nontrivial gcd, plus the state where they first enter
//! the ratio-2/3 regime (which may fall inside a run of ones: `a(1) = 7`
//! reaches `(3, 9)` that way). Trajectories that meet only after their last
//! event below the horizon are not merged.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::State;
use crate::shortcut::{jump, lemma_ratio};

use super::transience::regime_entry_during_run;

/// Seeds computed in parallel between two reductions.
const CHUNK: u64 = 64;

/// Event landings and the regime entry of the seed `(1, a1)` with
/// `n <= n_limit`, in increasing `n`; stops early after the first state for
/// which `stop` holds.
pub fn trajectory_states(a1: u64, n_limit: i128, stop: impl Fn(&State) -> bool) -> Result<Vec<State>> {
    let mut s = State::seed(a1 as i128)?;
    let mut in_regime = lemma_ratio(&s).is_some();
    let mut out = Vec::new();
    loop {
        let j = match jump(&s) {
            Ok(j) => j,
            Err(Error::NoNontrivialGcd { .. }) => break,
            Err(e) => return Err(e),
        };
        if !in_regime {
            if let Some((entry, _)) = regime_entry_during_run(&s, &j.n2)? {
                in_regime = true;
                if entry.n > n_limit {
                    break;
                }
                let done = stop(&entry);
                out.push(entry);
                if done {
                    break;
                }
            }
        }
        if j.n2 > n_limit {
            break;
        }
        s = j.landing();
        in_regime |= lemma_ratio(&s).is_some();
        let done = stop(&s);
        out.push(s.clone());
        if done {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub seed: u64,
    /// Earlier seed that first reached `state`.
    pub joined: u64,
    /// First state shared with an earlier seed; `state.n` is the merge index.
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedClass {
    /// Minimal member.
    pub representative: u64,
    pub members: Vec<u64>,
    /// How each non-representative member joined, in seed order.
    pub merges: Vec<Merge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub seed_range: (u64, u64),
    pub n_limit: i128,
    pub classes: Vec<SeedClass>,
}

impl ClassReport {
    pub fn class_of(&self, seed: u64) -> Option<&SeedClass> {
        self.classes.iter().find(|c| c.members.binary_search(&seed).is_ok())
    }
}

mod state_owners {
    use std::collections::HashMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::recurrence::State;

    pub fn serialize<S: Serializer>(map: &HashMap<State, u64>, s: S) -> Result<S::Ok, S::Error> {
        let mut pairs: Vec<(&State, &u64)> = map.iter().collect();
        pairs.sort();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HashMap<State, u64>, D::Error> {
        Ok(Vec::<(State, u64)>::deserialize(d)?.into_iter().collect())
    }
}

/// Resumable union-find over a seed range. Seeds are absorbed strictly in
/// increasing order, so the result does not depend on how the per-seed work
/// was scheduled. Serializable as a checkpoint for long scans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAccumulator {
    pub seed_range: (u64, u64),
    pub n_limit: i128,
    /// Next seed to absorb.
    pub next: u64,
    parent: Vec<u64>,
    merges: Vec<Merge>,
    #[serde(with = "state_owners")]
    owners: HashMap<State, u64>,
}

impl ClassAccumulator {
    pub fn new(seed_range: RangeInclusive<u64>, n_limit: i128) -> Result<Self> {
        let (lo, hi) = seed_range.into_inner();
        if lo < 1 || hi < lo {
            return Err(Error::Precondition(format!("invalid seed range [{lo}, {hi}]")));
        }
        if n_limit < 2 {
            return Err(Error::Precondition(format!("n_limit must be at least 2, got {n_limit}")));
        }
        Ok(ClassAccumulator {
            seed_range: (lo, hi),
            n_limit,
            next: lo,
            parent: Vec::new(),
            merges: Vec::new(),
            owners: HashMap::new(),
        })
    }

    pub fn is_done(&self) -> bool {
        self.next > self.seed_range.1
    }

    fn find(&self, seed: u64) -> u64 {
        let lo = self.seed_range.0;
        let mut x = seed;
        while self.parent[(x - lo) as usize] != x {
            x = self.parent[(x - lo) as usize];
        }
        x
    }

    /// Folds in the states of the next seed.
    fn absorb(&mut self, seed: u64, states: &[State]) {
        debug_assert_eq!(seed, self.next);
        self.parent.push(seed);
        for s in states {
            if let Some(&owner) = self.owners.get(s) {
                // the earlier class root is smaller than `seed`, so the root
                // stays the minimal member
                let root = self.find(owner);
                let lo = self.seed_range.0;
                self.parent[(seed - lo) as usize] = root;
                self.merges.push(Merge {
                    seed,
                    joined: owner,
                    state: s.clone(),
                });
                break;
            }
            self.owners.insert(s.clone(), seed);
        }
        self.next += 1;
    }

    /// Processes up to `count` more seeds; returns how many were absorbed.
    pub fn advance(&mut self, count: u64) -> Result<u64> {
        let mut absorbed = 0;
        while absorbed < count && !self.is_done() {
            let start = self.next;
            let end = (start + CHUNK.min(count - absorbed) - 1).min(self.seed_range.1);
            let owners = &self.owners;
            let n_limit = self.n_limit;
            let batch: Vec<Vec<State>> = (start..=end)
                .into_par_iter()
                .map(|a1| trajectory_states(a1, n_limit, |s| owners.contains_key(s)))
                .collect::<Result<_>>()?;
            for (a1, states) in (start..=end).zip(&batch) {
                self.absorb(a1, states);
            }
            absorbed += end - start + 1;
        }
        Ok(absorbed)
    }

    pub fn report(&self) -> ClassReport {
        let lo = self.seed_range.0;
        let mut by_root: Vec<(u64, SeedClass)> = Vec::new();
        let mut index: HashMap<u64, usize> = HashMap::new();
        for seed in lo..self.next {
            let root = self.find(seed);
            let i = *index.entry(root).or_insert_with(|| {
                by_root.push((
                    root,
                    SeedClass {
                        representative: root,
                        members: Vec::new(),
                        merges: Vec::new(),
                    },
                ));
                by_root.len() - 1
            });
            by_root[i].1.members.push(seed);
        }
        for m in &self.merges {
            let i = index[&self.find(m.seed)];
            by_root[i].1.merges.push(m.clone());
        }
        ClassReport {
            seed_range: (lo, self.next.saturating_sub(1).max(lo)),
            n_limit: self.n_limit,
            classes: by_root.into_iter().map(|(_, c)| c).collect(),
        }
    }
}

/// Classes of the seeds `(1, a1)`, `a1` in `seed_range`, merged on states
/// with `n <= n_limit`.
pub fn equivalence_classes(seed_range: RangeInclusive<u64>, n_limit: i128) -> Result<ClassReport> {
    let mut acc = ClassAccumulator::new(seed_range, n_limit)?;
    acc.advance(u64::MAX)?;
    Ok(acc.report())
}
