//! Run counters. Constraint checks are the machine-independent cost measure:
//! exactly one increment per relation evaluation requested by a propagator or
//! search.

use crate::network::ConstraintId;

#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    /// Constraint checks: one per counted relation evaluation.
    pub cc: u64,
    /// Search nodes visited (assignment attempts).
    pub nodes: u64,
    /// Value removals, including assignment narrowing.
    pub deletions: u64,
    /// Wall time of the run in seconds; set by the driver, never by the
    /// propagation engine, and never comparable across machines.
    pub elapsed: f64,
    /// Constraint weight bumps in event order, one per domain wipeout.
    pub bump_log: Vec<ConstraintId>,
    /// PC-support scan rescans observed by the amortization instrumentation
    /// (zero unless `debug_checks` is on and the invariant breaks).
    pub scan_rescans: u64,
}

impl SolverStats {
    pub fn new() -> Self {
        SolverStats::default()
    }

    pub fn bumps(&self) -> u64 {
        self.bump_log.len() as u64
    }
}
