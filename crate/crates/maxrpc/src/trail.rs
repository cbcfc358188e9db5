//! Single shared deletion trail with typed records.
//!
//! Domain removals, incremental support-table writes, and scan high-water
//! marks all land on one stack so a single reverse pass restores a decision
//! level exactly, with interleavings undone in reverse order.

use crate::domain::DomainStore;
use crate::network::VarId;
use crate::support::{ScanMarks, SupportStore, TableKind};

/// One undoable write.
#[derive(Debug, Clone, Copy)]
pub enum TrailEntry {
    /// Value `idx` was removed from `var`.
    Removal { var: VarId, idx: i32 },
    /// A support-table slot was overwritten; `old` is the previous entry.
    Support {
        table: TableKind,
        slot: usize,
        old: i32,
    },
    /// A scan high-water mark was raised; `old` is the previous mark.
    Mark { slot: usize, old: i32 },
}

/// Trail plus decision-level boundaries. Level 0 is the root: writes made
/// there are never undone by `restore`.
#[derive(Debug, Default)]
pub struct Trail {
    entries: Vec<TrailEntry>,
    level_starts: Vec<usize>,
}

impl Trail {
    pub fn new() -> Self {
        Trail::default()
    }

    pub fn level(&self) -> usize {
        self.level_starts.len()
    }

    /// Opens a new decision level and returns it.
    pub fn push_level(&mut self) -> usize {
        self.level_starts.push(self.entries.len());
        self.level_starts.len()
    }

    pub fn push(&mut self, entry: TrailEntry) {
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Undoes every write made at levels deeper than `level` and makes
    /// `level` current again.
    pub fn restore(
        &mut self,
        level: usize,
        domains: &mut DomainStore,
        supports: &mut SupportStore,
        marks: &mut ScanMarks,
    ) {
        debug_assert!(level <= self.level());
        while self.level_starts.len() > level {
            let mark = self.level_starts.pop().expect("level stack underflow");
            while self.entries.len() > mark {
                match self.entries.pop().expect("trail underflow") {
                    TrailEntry::Removal { var, idx } => domains.reinstate(var, idx),
                    TrailEntry::Support { table, slot, old } => {
                        supports.write_raw(table, slot, old)
                    }
                    TrailEntry::Mark { slot, old } => marks.write_raw(slot, old),
                }
            }
        }
    }
}
