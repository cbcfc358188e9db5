//! LastPC / LastAC support tables.
//!
//! One entry per directed constraint arc and value index, flat for cache
//! locality: `slot = arc * stride + value`. Two operating modes separate the
//! algorithm families. Incremental mode trails every overwrite so backtracking
//! restores the exact table contents; residual mode never trails, entries
//! survive backtracking as hints whose validity must be re-tested.
//!
//! Entries are value indices, or [`NIL`] (-1) which precedes every real index,
//! making the `max(LastPC + 1, LastAC)` window arithmetic total.

use crate::domain::DomainStore;
use crate::network::{ArcId, ConstraintNetwork, VarId};
use crate::trail::{Trail, TrailEntry};

/// Sentinel preceding all value indices.
pub const NIL: i32 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreMode {
    /// Trailed writes, restored on backtrack.
    Incremental,
    /// Residues: writes persist across backtracking.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Pc,
    Ac,
}

/// True iff `entry` points at a value currently in `D(x)`. NIL is never valid.
pub fn is_valid(entry: i32, x: VarId, domains: &DomainStore) -> bool {
    entry != NIL && domains.contains(x, entry)
}

#[derive(Debug, Clone)]
pub struct SupportStore {
    mode: StoreMode,
    stride: usize,
    last_pc: Vec<i32>,
    last_ac: Vec<i32>,
}

impl SupportStore {
    pub fn new(net: &ConstraintNetwork, mode: StoreMode) -> Self {
        let stride = net.max_domain_size();
        let slots = net.num_arcs() * stride;
        SupportStore {
            mode,
            stride,
            last_pc: vec![NIL; slots],
            last_ac: vec![NIL; slots],
        }
    }

    pub fn mode(&self) -> StoreMode {
        self.mode
    }

    fn slot(&self, arc: ArcId, a: i32) -> usize {
        debug_assert!(a >= 0);
        arc * self.stride + a as usize
    }

    pub fn get(&self, table: TableKind, arc: ArcId, a: i32) -> i32 {
        let slot = self.slot(arc, a);
        match table {
            TableKind::Pc => self.last_pc[slot],
            TableKind::Ac => self.last_ac[slot],
        }
    }

    /// Writes an entry, trailing the overwrite in incremental mode.
    pub fn set(&mut self, table: TableKind, arc: ArcId, a: i32, v: i32, trail: &mut Trail) {
        let slot = self.slot(arc, a);
        let cell = match table {
            TableKind::Pc => &mut self.last_pc[slot],
            TableKind::Ac => &mut self.last_ac[slot],
        };
        if self.mode == StoreMode::Incremental {
            trail.push(TrailEntry::Support {
                table,
                slot,
                old: *cell,
            });
        }
        *cell = v;
    }

    /// Undo hook used by the trail.
    pub(crate) fn write_raw(&mut self, table: TableKind, slot: usize, v: i32) {
        match table {
            TableKind::Pc => self.last_pc[slot] = v,
            TableKind::Ac => self.last_ac[slot] = v,
        }
    }

    /// Snapshot of both tables, for state-restoration tests.
    pub fn snapshot(&self) -> (Vec<i32>, Vec<i32>) {
        (self.last_pc.clone(), self.last_ac.clone())
    }
}

/// Per-(arc, value) high-water marks over PC-support scans, used to check the
/// branch amortization property of incremental mode: along one branch no value
/// index is scanned twice for a PC-support of the same (arc, value). Marks are
/// trailed like incremental support entries so they rewind with the branch.
#[derive(Debug, Clone)]
pub struct ScanMarks {
    enabled: bool,
    stride: usize,
    marks: Vec<i32>,
    violations: u64,
}

impl ScanMarks {
    pub fn new(net: &ConstraintNetwork) -> Self {
        let stride = net.max_domain_size();
        ScanMarks {
            enabled: true,
            stride,
            marks: vec![NIL; net.num_arcs() * stride],
            violations: 0,
        }
    }

    pub fn disabled() -> Self {
        ScanMarks {
            enabled: false,
            stride: 0,
            marks: Vec::new(),
            violations: 0,
        }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn violations(&self) -> u64 {
        self.violations
    }

    /// Mark at scan start; candidate indices at or below it would be rescans.
    pub fn start(&self, arc: ArcId, a: i32) -> i32 {
        if self.enabled {
            self.marks[arc * self.stride + a as usize]
        } else {
            NIL
        }
    }

    pub fn record_visit(&mut self, start_mark: i32, visited: i32) {
        if self.enabled && visited <= start_mark {
            self.violations += 1;
        }
    }

    /// Raises the mark to the highest visited index, trailed.
    pub fn finish(&mut self, arc: ArcId, a: i32, max_visited: i32, trail: &mut Trail) {
        if !self.enabled || max_visited == NIL {
            return;
        }
        let slot = arc * self.stride + a as usize;
        if max_visited > self.marks[slot] {
            trail.push(TrailEntry::Mark {
                slot,
                old: self.marks[slot],
            });
            self.marks[slot] = max_visited;
        }
    }

    pub(crate) fn write_raw(&mut self, slot: usize, v: i32) {
        self.marks[slot] = v;
    }
}
