//! Large gaps and the clusters of events between them.
//!
//! An event follows a large gap exactly when the Δ of its run of ones is
//! itself prime, so the gcd is the whole of Δ.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::shortcut::{EventTrace, Event, JumpRule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster<T = i128> {
    pub start: Event<T>,
    pub end: Event<T>,
    pub len: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport<T: Int = i128> {
    pub events: EventTrace<T>,
    pub clusters: Vec<Cluster<T>>,
    /// `n` at the start of each cluster over `n` at the end of the previous.
    pub gaps: Vec<Ratio<T>>,
}

/// Whether `e` ends a large gap.
pub fn starts_cluster<T: Int>(e: &Event<T>) -> bool {
    e.g == e.delta.abs() && (e.rule == JumpRule::Lemma || e.g.is_prime())
}

/// Splits the events of `trace` into clusters. The first event always opens
/// a cluster so the clusters partition the trace.
pub fn detect_clusters<T: Int>(trace: &EventTrace<T>) -> ClusterReport<T> {
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    for (i, e) in trace.events.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if !starts_cluster(e) => {
                c.end = e.clone();
                c.len += 1;
            }
            _ => {
                debug_assert!(i == 0 || starts_cluster(e));
                clusters.push(Cluster {
                    start: e.clone(),
                    end: e.clone(),
                    len: 1,
                });
            }
        }
    }
    let gaps = clusters
        .windows(2)
        .map(|w| Ratio::new(w[1].start.n.clone(), w[0].end.n.clone()))
        .collect();
    ClusterReport {
        events: trace.clone(),
        clusters,
        gaps,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapStructureReport<T = i128> {
    pub clusters: usize,
    /// Cluster-opening primes that are not `5 mod 6`.
    pub bad_residue: Vec<Event<T>>,
    /// Cluster-opening events not followed by `g = 3` at the next index.
    pub missing_three: Vec<Event<T>>,
    /// Events with `g = 2`.
    pub even_gcds: Vec<Event<T>>,
}

impl<T> GapStructureReport<T> {
    pub fn holds(&self) -> bool {
        self.bad_residue.is_empty() && self.missing_three.is_empty() && self.even_gcds.is_empty()
    }
}

/// Checks the shape of a ratio-3 trace: every large-gap prime is `5 mod 6`
/// and is followed at the very next index by `g = 3`, and `g = 2` never
/// occurs. A cluster opener that is the final event of the trace is not
/// judged on its successor.
pub fn check_gap_structure<T: Int>(trace: &EventTrace<T>) -> GapStructureReport<T> {
    let six = T::small(6);
    let five = T::small(5);
    let three = T::small(3);
    let mut report = GapStructureReport {
        clusters: 0,
        bad_residue: Vec::new(),
        missing_three: Vec::new(),
        even_gcds: Vec::new(),
    };
    let events = &trace.events;
    for (i, e) in events.iter().enumerate() {
        if e.g == T::small(2) {
            report.even_gcds.push(e.clone());
        }
        if !starts_cluster(e) {
            continue;
        }
        report.clusters += 1;
        if e.g.mod_floor(&six) != five {
            report.bad_residue.push(e.clone());
        }
        if let Some(next) = events.get(i + 1) {
            if next.g != three || next.n != e.n.clone() + T::one() {
                report.missing_three.push(e.clone());
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::State;
    use crate::shortcut::accelerated_evolve;

    fn trace(a1: i128, n_max: i128) -> EventTrace {
        accelerated_evolve(&State::seed(a1).unwrap(), n_max).unwrap()
    }

    #[test]
    fn canonical_cluster_starts() {
        let report = detect_clusters(&trace(7, 500));
        let starts: Vec<i128> = report.clusters.iter().map(|c| c.start.n).collect();
        assert_eq!(starts, [5, 11, 23, 47, 101, 233, 467]);
        assert_eq!(&report.gaps[..3], &[Ratio::new(11, 6), Ratio::new(23, 12), Ratio::new(47, 24)]);
        let total: usize = report.clusters.iter().map(|c| c.len).sum();
        assert_eq!(total, report.events.events.len());
    }

    #[test]
    fn single_event_trace() {
        let report = detect_clusters(&trace(7, 5));
        assert_eq!(report.clusters.len(), 1);
        assert!(report.gaps.is_empty());
    }

    #[test]
    fn canonical_gap_structure() {
        let report = check_gap_structure(&trace(7, 1_000_000));
        assert!(report.holds(), "{report:?}");
        assert!(report.clusters >= 15);
    }
}
