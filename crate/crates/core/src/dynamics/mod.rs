//! Analyses of whole trajectories built on top of the shortcut.

mod bounds;
mod classes;
mod clusters;
mod coverage;
mod emulate;
mod persistence;
mod transience;

pub use bounds::{check_ceiling_bound, check_crossing, check_lower_bound, BoundReport, CrossingReport};
pub use classes::{equivalence_classes, trajectory_states, ClassAccumulator, ClassReport, Merge, SeedClass};
pub use clusters::{check_gap_structure, detect_clusters, Cluster, ClusterReport, GapStructureReport};
pub use coverage::{prime_coverage, prime_coverage_with, CoverageReport};
pub use emulate::{emulate, emulation_mismatch};
pub use persistence::{persistence, scan_persistence, PersistenceRecord, DEFAULT_EVENT_BUDGET};
pub use transience::{regime_entry_during_run, transience_check, TransienceOutcome, TransienceReport};
