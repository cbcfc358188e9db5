//! Mutable, trailed current domains over value indices.
//!
//! Membership is a flag array per variable, so the ordered scans that drive
//! support searches ("every value from `b` upward") are plain index walks.
//! Every removal is trailed; `restore` on the owning session brings back
//! exactly the values deleted at deeper levels.

use std::collections::BTreeSet;

use crate::network::{ConstraintNetwork, VarId};
use crate::stats::SolverStats;
use crate::trail::{Trail, TrailEntry};

#[derive(Debug, Clone)]
pub struct DomainStore {
    present: Vec<Vec<bool>>,
    size: Vec<usize>,
}

impl DomainStore {
    pub fn new(net: &ConstraintNetwork) -> Self {
        let present: Vec<Vec<bool>> = (0..net.num_vars())
            .map(|x| vec![true; net.domain_size(x)])
            .collect();
        let size = present.iter().map(Vec::len).collect();
        DomainStore { present, size }
    }

    pub fn num_vars(&self) -> usize {
        self.present.len()
    }

    pub fn init_size(&self, x: VarId) -> usize {
        self.present[x].len()
    }

    pub fn size(&self, x: VarId) -> usize {
        self.size[x]
    }

    pub fn is_empty(&self, x: VarId) -> bool {
        self.size[x] == 0
    }

    /// Membership test; `idx` may be the NIL sentinel (-1), which is never in
    /// any domain.
    pub fn contains(&self, x: VarId, idx: i32) -> bool {
        idx >= 0 && self.present[x][idx as usize]
    }

    /// Smallest present index `>= from`, clamping NIL-derived starts to 0.
    pub fn next_value(&self, x: VarId, from: i32) -> Option<i32> {
        let start = from.max(0) as usize;
        self.present[x][start.min(self.present[x].len())..]
            .iter()
            .position(|&p| p)
            .map(|off| (start + off) as i32)
    }

    pub fn first(&self, x: VarId) -> Option<i32> {
        self.next_value(x, 0)
    }

    /// Current value indices of `x`, ascending.
    pub fn indices(&self, x: VarId) -> Vec<i32> {
        self.present[x]
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.then_some(i as i32))
            .collect()
    }

    /// Removes a present value, trailing the deletion. Returns true iff the
    /// domain wiped out. Removing an absent value is a contract violation.
    pub fn remove(
        &mut self,
        x: VarId,
        idx: i32,
        trail: &mut Trail,
        stats: &mut SolverStats,
    ) -> bool {
        debug_assert!(self.contains(x, idx), "removing absent value {idx} of {x}");
        self.present[x][idx as usize] = false;
        self.size[x] -= 1;
        stats.deletions += 1;
        trail.push(TrailEntry::Removal { var: x, idx });
        self.size[x] == 0
    }

    /// Reduces `x` to the singleton `{idx}`; every other value is removed and
    /// trailed, so propagation needs no special casing for assignments.
    pub fn assign(&mut self, x: VarId, idx: i32, trail: &mut Trail, stats: &mut SolverStats) {
        debug_assert!(self.contains(x, idx));
        for i in 0..self.present[x].len() as i32 {
            if i != idx && self.present[x][i as usize] {
                self.remove(x, i, trail, stats);
            }
        }
    }

    /// Undo hook used by the trail.
    pub(crate) fn reinstate(&mut self, x: VarId, idx: i32) {
        debug_assert!(!self.present[x][idx as usize]);
        self.present[x][idx as usize] = true;
        self.size[x] += 1;
    }

    /// Current domains as plain value sets, for oracle comparisons.
    pub fn value_sets(&self, net: &ConstraintNetwork) -> Vec<BTreeSet<i32>> {
        (0..self.num_vars())
            .map(|x| self.indices(x).into_iter().map(|i| net.value(x, i)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::support::{ScanMarks, StoreMode, SupportStore};

    fn single_var(values: Vec<i32>) -> ConstraintNetwork {
        let mut b = NetworkBuilder::new("d");
        b.variable(values);
        b.build().unwrap()
    }

    #[test]
    fn remove_and_wipeout() {
        let net = single_var(vec![1, 2]);
        let mut dom = DomainStore::new(&net);
        let mut trail = Trail::new();
        let mut stats = SolverStats::default();
        assert!(!dom.remove(0, 0, &mut trail, &mut stats));
        assert_eq!(dom.indices(0), vec![1]);
        assert!(dom.remove(0, 1, &mut trail, &mut stats));
        assert!(dom.is_empty(0));
        assert_eq!(stats.deletions, 2);
    }

    #[test]
    fn restore_round_trip() {
        let net = single_var(vec![0, 1, 2, 3]);
        let mut dom = DomainStore::new(&net);
        let mut trail = Trail::new();
        let mut stats = SolverStats::default();
        let mut supports = SupportStore::new(&net, StoreMode::Incremental);
        let mut marks = ScanMarks::disabled();

        let before = dom.indices(0);
        let level = trail.push_level();
        dom.remove(0, 1, &mut trail, &mut stats);
        dom.remove(0, 3, &mut trail, &mut stats);
        dom.remove(0, 0, &mut trail, &mut stats);
        assert_eq!(dom.indices(0), vec![2]);
        trail.restore(level - 1, &mut dom, &mut supports, &mut marks);
        assert_eq!(dom.indices(0), before);

        // Restoring with nothing deleted is a no-op.
        let level = trail.push_level();
        trail.restore(level - 1, &mut dom, &mut supports, &mut marks);
        assert_eq!(dom.indices(0), before);
    }

    #[test]
    fn ordered_iteration_from_start() {
        let net = single_var(vec![0, 1, 2, 3, 4]);
        let mut dom = DomainStore::new(&net);
        let mut trail = Trail::new();
        let mut stats = SolverStats::default();
        dom.remove(0, 2, &mut trail, &mut stats);
        let mut seen = Vec::new();
        let mut v = dom.next_value(0, 1);
        while let Some(i) = v {
            seen.push(i);
            v = dom.next_value(0, i + 1);
        }
        assert_eq!(seen, vec![1, 3, 4]);
        // NIL + 1 clamps to the first value.
        assert_eq!(dom.next_value(0, -1), Some(0));
    }
}
