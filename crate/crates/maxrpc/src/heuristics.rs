//! Ordering heuristics: propagation-list extraction, revision orderings, and
//! the constraint weights behind wdeg-style fail-first policies.
//!
//! The orderings never change which values a propagation fixpoint deletes,
//! only how many checks it takes to get there and which constraint gets the
//! blame (and the weight bump) when a domain wipes out.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::DomainStore;
use crate::network::{ConstraintId, ConstraintNetwork, VarId};
use crate::stats::SolverStats;

/// Heuristic identifiers, spelled exactly as they appear in CLI flags and
/// bench manifests. `fifo` is legal only for propagation-list extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeuristicId {
    Fifo,
    Dom,
    DelRatio,
    Wdeg,
    DomWdeg,
}

impl HeuristicId {
    pub fn name(self) -> &'static str {
        match self {
            HeuristicId::Fifo => "fifo",
            HeuristicId::Dom => "dom",
            HeuristicId::DelRatio => "del_ratio",
            HeuristicId::Wdeg => "wdeg",
            HeuristicId::DomWdeg => "dom_wdeg",
        }
    }
}

impl FromStr for HeuristicId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fifo" => Ok(HeuristicId::Fifo),
            "dom" => Ok(HeuristicId::Dom),
            "del_ratio" => Ok(HeuristicId::DelRatio),
            "wdeg" => Ok(HeuristicId::Wdeg),
            "dom_wdeg" => Ok(HeuristicId::DomWdeg),
            other => Err(format!("unknown heuristic id '{other}'")),
        }
    }
}

/// Per-constraint failure weights, all starting at 1. A weight is bumped by
/// one exactly when a propagation pass returns failure on that constraint.
#[derive(Debug, Clone)]
pub struct WeightTable {
    weights: Vec<u64>,
}

impl WeightTable {
    pub fn new(net: &ConstraintNetwork) -> Self {
        WeightTable {
            weights: vec![1; net.num_constraints()],
        }
    }

    pub fn weight(&self, c: ConstraintId) -> u64 {
        self.weights[c]
    }

    pub fn bump(&mut self, c: ConstraintId, stats: &mut SolverStats) {
        self.weights[c] += 1;
        stats.bump_log.push(c);
    }

    /// Summed weights of constraints incident to `x` whose other endpoint is
    /// still unassigned (domain size above one). Never returns zero.
    pub fn wdeg(&self, x: VarId, net: &ConstraintNetwork, domains: &DomainStore) -> u64 {
        let sum: u64 = net
            .adjacency(x)
            .iter()
            .filter(|&&(_, other)| domains.size(other) > 1)
            .map(|&(c, _)| self.weights[c])
            .sum();
        sum.max(1)
    }
}

/// Compares `size_a / weight_a` against `size_b / weight_b` without floats.
fn ratio_less(size_a: usize, weight_a: u64, size_b: usize, weight_b: u64) -> bool {
    (size_a as u128) * (weight_b as u128) < (size_b as u128) * (weight_a as u128)
}

/// Pending-variable set driving coarse-grained propagation. A variable is
/// present iff its domain was pruned since it was last extracted; insertion
/// is idempotent.
#[derive(Debug, Clone)]
pub struct PropagationList {
    queue: VecDeque<VarId>,
    in_list: Vec<bool>,
}

impl PropagationList {
    pub fn new(num_vars: usize) -> Self {
        PropagationList {
            queue: VecDeque::new(),
            in_list: vec![false; num_vars],
        }
    }

    pub fn insert(&mut self, x: VarId) {
        if !self.in_list[x] {
            self.in_list[x] = true;
            self.queue.push_back(x);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn clear(&mut self) {
        for &x in &self.queue {
            self.in_list[x] = false;
        }
        self.queue.clear();
    }

    /// Extracts the next variable under heuristic `h`. `fifo` takes insertion
    /// order; the rest scan for the best key with ties broken by ascending
    /// variable id.
    pub fn extract(
        &mut self,
        h: HeuristicId,
        net: &ConstraintNetwork,
        domains: &DomainStore,
        weights: &WeightTable,
    ) -> Option<VarId> {
        if self.queue.is_empty() {
            return None;
        }
        let pos = match h {
            HeuristicId::Fifo => 0,
            _ => {
                let mut best = 0;
                for i in 1..self.queue.len() {
                    if list_key_better(h, self.queue[i], self.queue[best], net, domains, weights) {
                        best = i;
                    }
                }
                best
            }
        };
        let x = self.queue.remove(pos).expect("index in range");
        self.in_list[x] = false;
        Some(x)
    }
}

/// True iff `a` should be extracted before `b` under `h`.
fn list_key_better(
    h: HeuristicId,
    a: VarId,
    b: VarId,
    net: &ConstraintNetwork,
    domains: &DomainStore,
    weights: &WeightTable,
) -> bool {
    let tie = |better: bool, equal: bool| better || (equal && a < b);
    match h {
        HeuristicId::Fifo => false,
        HeuristicId::Dom => tie(domains.size(a) < domains.size(b), domains.size(a) == domains.size(b)),
        HeuristicId::DelRatio => {
            // Ascending |D| / |D_init|.
            let lhs = domains.size(a) as u128 * domains.init_size(b) as u128;
            let rhs = domains.size(b) as u128 * domains.init_size(a) as u128;
            tie(lhs < rhs, lhs == rhs)
        }
        HeuristicId::Wdeg => {
            let (wa, wb) = (
                weights.wdeg(a, net, domains),
                weights.wdeg(b, net, domains),
            );
            tie(wa > wb, wa == wb)
        }
        HeuristicId::DomWdeg => {
            let (wa, wb) = (
                weights.wdeg(a, net, domains),
                weights.wdeg(b, net, domains),
            );
            let less = ratio_less(domains.size(a), wa, domains.size(b), wb);
            let eq = !less && !ratio_less(domains.size(b), wb, domains.size(a), wa);
            tie(less, eq)
        }
    }
}

/// Orders the neighbors revised after `x_j` leaves the propagation list
/// (revision-ordering case 1). `None` keeps ascending neighbor id. For
/// `wdeg` the key is the connecting constraint's weight, descending.
pub fn order_neighbors_case1(
    x_j: VarId,
    h: Option<HeuristicId>,
    net: &ConstraintNetwork,
    domains: &DomainStore,
    weights: &WeightTable,
) -> Vec<(ConstraintId, VarId)> {
    let mut neighbors: Vec<(ConstraintId, VarId)> = net.adjacency(x_j).to_vec();
    let Some(h) = h else {
        return neighbors;
    };
    debug_assert!(h != HeuristicId::Fifo, "fifo is a queue policy only");
    neighbors.sort_by(|&(ca, a), &(cb, b)| {
        let ord = match h {
            HeuristicId::Fifo | HeuristicId::Dom => domains.size(a).cmp(&domains.size(b)),
            HeuristicId::DelRatio => {
                let lhs = domains.size(a) as u128 * domains.init_size(b) as u128;
                let rhs = domains.size(b) as u128 * domains.init_size(a) as u128;
                lhs.cmp(&rhs)
            }
            HeuristicId::Wdeg => weights.weight(cb).cmp(&weights.weight(ca)),
            HeuristicId::DomWdeg => {
                let (wa, wb) = (
                    weights.wdeg(a, net, domains),
                    weights.wdeg(b, net, domains),
                );
                (domains.size(a) as u128 * wb as u128).cmp(&(domains.size(b) as u128 * wa as u128))
            }
        };
        ord.then(a.cmp(&b))
    });
    neighbors
}

/// Orders the triangle variables of constraint `cid` for the witness and
/// replacement-support loops (revision-ordering cases 2, 3 and 4). `None`
/// keeps ascending id. For `wdeg` and `dom_wdeg` the weight of `x_k` is the
/// summed weight of its two clique constraints `c_ik` and `c_jk`.
pub fn order_triangle_vars(
    cid: ConstraintId,
    h: Option<HeuristicId>,
    net: &ConstraintNetwork,
    domains: &DomainStore,
    weights: &WeightTable,
) -> Vec<VarId> {
    let mut vars: Vec<VarId> = net.triangles(cid).to_vec();
    let Some(h) = h else {
        return vars;
    };
    debug_assert!(h != HeuristicId::Fifo, "fifo is a queue policy only");
    let c = net.constraint(cid);
    let pair_weight = |k: VarId| -> u64 {
        let c_ik = net.between(c.x, k).expect("triangle edge");
        let c_jk = net.between(c.y, k).expect("triangle edge");
        weights.weight(c_ik) + weights.weight(c_jk)
    };
    vars.sort_by(|&a, &b| {
        let ord = match h {
            HeuristicId::Fifo | HeuristicId::Dom => domains.size(a).cmp(&domains.size(b)),
            HeuristicId::DelRatio => {
                let lhs = domains.size(a) as u128 * domains.init_size(b) as u128;
                let rhs = domains.size(b) as u128 * domains.init_size(a) as u128;
                lhs.cmp(&rhs)
            }
            HeuristicId::Wdeg => pair_weight(b).cmp(&pair_weight(a)),
            HeuristicId::DomWdeg => {
                let (wa, wb) = (pair_weight(a), pair_weight(b));
                (domains.size(a) as u128 * wb as u128).cmp(&(domains.size(b) as u128 * wa as u128))
            }
        };
        ord.then(a.cmp(&b))
    });
    vars
}
