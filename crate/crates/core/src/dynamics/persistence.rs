//! How often the exact ratio `r >= 4` of a seed `(n1, r·n1)` comes back.
//!
//! The ceiling bound caps the ratio at `r` forever, and on a run of ones the
//! ratio only decreases, so it can equal `r` again only at event landings.
//! Once `a <= (r - 1) n` the ceiling drops below `r` and the scan is over.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::State;
use crate::shortcut::jump;

/// Events followed per seed before giving up.
pub const DEFAULT_EVENT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistenceRecord {
    pub n1: u64,
    pub r: u32,
    /// Indices with `a(n) = r·n`, the seed included.
    pub occurrences: u64,
    pub last_index: i128,
    /// False when the event budget ran out before the ratio fell below `r`.
    pub settled: bool,
}

impl PersistenceRecord {
    /// Returns to ratio `r` after the seed.
    pub fn recurrences(&self) -> u64 {
        self.occurrences - 1
    }
}

pub fn persistence(n1: u64, r: u32, event_budget: u64) -> Result<PersistenceRecord> {
    if r < 4 {
        return Err(Error::Precondition(format!("persistence scans need r >= 4, got {r}")));
    }
    let r_int = r as i128;
    let n = n1 as i128;
    let mut s = State::new(n, n.checked_mul(r_int).ok_or_else(Error::overflow)?)?;
    let mut record = PersistenceRecord {
        n1,
        r,
        occurrences: 1,
        last_index: n,
        settled: false,
    };
    for _ in 0..event_budget {
        let below = s.n.checked_mul(r_int - 1).ok_or_else(Error::overflow)?;
        if s.a <= below {
            record.settled = true;
            return Ok(record);
        }
        s = match jump(&s) {
            Ok(j) => j.landing(),
            Err(Error::NoNontrivialGcd { .. }) => {
                record.settled = true;
                return Ok(record);
            }
            Err(e) => return Err(e),
        };
        if Some(s.a) == s.n.checked_mul(r_int) {
            record.occurrences += 1;
            record.last_index = s.n;
        }
    }
    Ok(record)
}

/// One record per `(n1, r)`, ordered by `r` then `n1`.
pub fn scan_persistence(
    n1_range: RangeInclusive<u64>,
    r_range: RangeInclusive<u32>,
) -> Result<Vec<PersistenceRecord>> {
    if *n1_range.start() < 1 || *r_range.start() < 4 {
        return Err(Error::Precondition("persistence scans need n1 >= 1 and r >= 4".into()));
    }
    let seeds: Vec<(u64, u32)> = r_range
        .flat_map(|r| n1_range.clone().map(move |n1| (n1, r)))
        .collect();
    seeds
        .into_par_iter()
        .map(|(n1, r)| persistence(n1, r, DEFAULT_EVENT_BUDGET))
        .collect()
}
