//! Backtracking search that maintains the configured consistency at every
//! node. Assignments are domain reductions to a singleton, so the propagation
//! engine needs no special casing; each decision seeds the propagation list
//! with the touched variable. Binary branching (x = a versus x != a) is the
//! default; d-way branching is available to probe sensitivity.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::network::{ConstraintNetwork, VarId};
use crate::propagate::{ConfigError, PropagatorConfig, Session};
use crate::stats::SolverStats;

/// Stored solutions are capped; counts stay exact beyond the cap.
pub const SOLUTION_STORE_CAP: usize = 1024;
/// Default node guard for exhaustive counting.
pub const COUNT_ALL_NODE_GUARD: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    /// x = a, refuted by deleting a and continuing at the same node.
    Binary,
    /// One branch per remaining value.
    DWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarHeuristic {
    DomWdeg,
    Dom,
    Lex,
}

impl VarHeuristic {
    pub fn name(self) -> &'static str {
        match self {
            VarHeuristic::DomWdeg => "dom_wdeg",
            VarHeuristic::Dom => "dom",
            VarHeuristic::Lex => "lex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    FirstSolution,
    CountAll,
    UnsatCheck,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub propagator: PropagatorConfig,
    pub branching: Branching,
    pub var_heuristic: VarHeuristic,
    pub mode: SearchMode,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchConfig {
    pub fn new(propagator: PropagatorConfig) -> Self {
        SearchConfig {
            propagator,
            branching: Branching::Binary,
            var_heuristic: VarHeuristic::DomWdeg,
            mode: SearchMode::FirstSolution,
            node_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Limit,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub verdict: Verdict,
    /// Satisfying assignments as values, one entry per variable; at most
    /// [`SOLUTION_STORE_CAP`] are stored.
    pub solutions: Vec<Vec<i32>>,
    /// Exact number of solutions encountered (all of them in count-all mode).
    pub solution_count: u64,
    pub stats: SolverStats,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("assignment covers {got} variables, network has {want}")]
    PartialAssignment { got: usize, want: usize },
    #[error("value {value} of variable {var} is not in its initial domain")]
    ValueOutOfDomain { var: VarId, value: i32 },
    #[error("node guard of {0} exceeded while counting")]
    CountGuardExceeded(u64),
}

enum Flow {
    Exhausted,
    Stop,
    Limit,
}

struct Driver<'n> {
    session: Session<'n>,
    branching: Branching,
    var_heuristic: VarHeuristic,
    mode: SearchMode,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    solutions: Vec<Vec<i32>>,
    solution_count: u64,
}

/// Complete search under `config`. Preprocessing (full initialization plus
/// propagation) runs at the root; an inconsistent root is UNSAT with zero
/// nodes.
pub fn solve(net: &ConstraintNetwork, config: &SearchConfig) -> Result<SearchResult, SolveError> {
    let started = Instant::now();
    let session = Session::new(net, config.propagator.clone())?;
    let mut driver = Driver {
        session,
        branching: config.branching,
        var_heuristic: config.var_heuristic,
        mode: config.mode,
        node_limit: config.node_limit,
        deadline: config.time_limit.map(|d| started + d),
        solutions: Vec::new(),
        solution_count: 0,
    };

    let verdict = if !driver.session.preprocess() {
        Verdict::Unsat
    } else {
        match driver.dfs() {
            Flow::Limit => Verdict::Limit,
            Flow::Stop | Flow::Exhausted => {
                if driver.solution_count > 0 {
                    Verdict::Sat
                } else {
                    Verdict::Unsat
                }
            }
        }
    };

    let mut stats = std::mem::take(&mut driver.session.stats);
    stats.elapsed = started.elapsed().as_secs_f64();
    stats.scan_rescans = driver.session.scan_violations();
    Ok(SearchResult {
        verdict,
        solutions: driver.solutions,
        solution_count: driver.solution_count,
        stats,
    })
}

/// Exact solution count via count-all search, guarded by a node limit
/// (default [`COUNT_ALL_NODE_GUARD`]).
pub fn count_solutions(
    net: &ConstraintNetwork,
    config: &SearchConfig,
) -> Result<u64, SolveError> {
    let mut config = config.clone();
    config.mode = SearchMode::CountAll;
    let guard = config.node_limit.unwrap_or(COUNT_ALL_NODE_GUARD);
    config.node_limit = Some(guard);
    let result = solve(net, &config)?;
    match result.verdict {
        Verdict::Limit => Err(SolveError::CountGuardExceeded(guard)),
        _ => Ok(result.solution_count),
    }
}

/// Checks a total assignment (values, one per variable) against every
/// constraint directly. Does not touch any counter.
pub fn verify_solution(
    net: &ConstraintNetwork,
    assignment: &[i32],
) -> Result<bool, SolveError> {
    if assignment.len() != net.num_vars() {
        return Err(SolveError::PartialAssignment {
            got: assignment.len(),
            want: net.num_vars(),
        });
    }
    let mut indices = Vec::with_capacity(assignment.len());
    for (x, &value) in assignment.iter().enumerate() {
        let idx = net
            .value_index(x, value)
            .ok_or(SolveError::ValueOutOfDomain { var: x, value })?;
        indices.push(idx);
    }
    Ok((0..net.num_constraints()).all(|cid| {
        let c = net.constraint(cid);
        net.check(cid, indices[c.x], indices[c.y])
    }))
}

impl<'n> Driver<'n> {
    fn limit_hit(&self) -> bool {
        if let Some(limit) = self.node_limit {
            if self.session.stats.nodes >= limit {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return true;
            }
        }
        false
    }

    /// Picks the next branching variable among those with more than one
    /// value left, ties broken by ascending id.
    fn pick_var(&self) -> Option<VarId> {
        let net = self.session.network();
        let domains = &self.session.domains;
        let mut best: Option<VarId> = None;
        for x in 0..net.num_vars() {
            if domains.size(x) <= 1 {
                continue;
            }
            best = Some(match (best, self.var_heuristic) {
                (None, _) => x,
                (Some(b), VarHeuristic::Lex) => b,
                (Some(b), VarHeuristic::Dom) => {
                    if domains.size(x) < domains.size(b) {
                        x
                    } else {
                        b
                    }
                }
                (Some(b), VarHeuristic::DomWdeg) => {
                    let wx = self.session.weights.wdeg(x, net, domains);
                    let wb = self.session.weights.wdeg(b, net, domains);
                    if (domains.size(x) as u128) * (wb as u128)
                        < (domains.size(b) as u128) * (wx as u128)
                    {
                        x
                    } else {
                        b
                    }
                }
            });
        }
        best
    }

    fn record_solution(&mut self) {
        let net = self.session.network();
        let assignment: Vec<i32> = (0..net.num_vars())
            .map(|x| {
                let idx = self.session.domains.first(x).expect("assigned variable");
                net.value(x, idx)
            })
            .collect();
        debug_assert_eq!(
            verify_solution(net, &assignment).ok(),
            Some(true),
            "propagated leaf violates a constraint"
        );
        self.solution_count += 1;
        if self.solutions.len() < SOLUTION_STORE_CAP {
            self.solutions.push(assignment);
        }
    }

    fn dfs(&mut self) -> Flow {
        loop {
            if self.limit_hit() {
                return Flow::Limit;
            }
            let Some(x) = self.pick_var() else {
                self.record_solution();
                return match self.mode {
                    SearchMode::CountAll => Flow::Exhausted,
                    SearchMode::FirstSolution | SearchMode::UnsatCheck => Flow::Stop,
                };
            };
            match self.branching {
                Branching::Binary => {
                    let a = self.session.domains.first(x).expect("non-empty domain");
                    let level = self.session.push_level();
                    self.session.stats.nodes += 1;
                    self.session.assign(x, a);
                    if self.session.propagate_from(x) {
                        match self.dfs() {
                            Flow::Exhausted => {}
                            flow => return flow,
                        }
                    }
                    self.session.restore(level - 1);
                    // Refutation branch: delete a at the current level and
                    // re-propagate from x before picking the next decision.
                    if self.session.remove_value(x, a) {
                        return Flow::Exhausted;
                    }
                    if !self.session.propagate_from(x) {
                        return Flow::Exhausted;
                    }
                }
                Branching::DWay => {
                    let values = self.session.domains.indices(x);
                    for a in values {
                        if self.limit_hit() {
                            return Flow::Limit;
                        }
                        let level = self.session.push_level();
                        self.session.stats.nodes += 1;
                        self.session.assign(x, a);
                        if self.session.propagate_from(x) {
                            match self.dfs() {
                                Flow::Exhausted => {}
                                flow => return flow,
                            }
                        }
                        self.session.restore(level - 1);
                    }
                    return Flow::Exhausted;
                }
            }
        }
    }
}

/// Convenience: parse an algorithm id and solve for the first solution under
/// the default search configuration.
pub fn solve_with(
    net: &ConstraintNetwork,
    algorithm: &str,
) -> Result<SearchResult, SolveError> {
    let propagator: PropagatorConfig = algorithm.parse()?;
    solve(net, &SearchConfig::new(propagator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_queens;
    use crate::network::{CmpOp, NetworkBuilder, Relation};
    use crate::propagate::Variant;

    fn queens_net(n: usize) -> ConstraintNetwork {
        gen_queens(n).to_network().unwrap()
    }

    fn light_rm() -> PropagatorConfig {
        PropagatorConfig::new(Variant::MaxRpc3Rm).light(true)
    }

    #[test]
    fn queens_solution_counts() {
        let mut config = SearchConfig::new(light_rm());
        config.mode = SearchMode::CountAll;
        assert_eq!(count_solutions(&queens_net(4), &config).unwrap(), 2);
        assert_eq!(count_solutions(&queens_net(3), &config).unwrap(), 0);
        assert_eq!(count_solutions(&queens_net(5), &config).unwrap(), 10);
    }

    #[test]
    fn queens_first_solution_is_verified_sat() {
        let net = queens_net(6);
        let result = solve(&net, &SearchConfig::new(light_rm())).unwrap();
        assert_eq!(result.verdict, Verdict::Sat);
        let solution = &result.solutions[0];
        assert!(verify_solution(&net, solution).unwrap());
        assert!(result.stats.nodes > 0);
    }

    #[test]
    fn ne_triangle_is_refuted_at_the_root() {
        let mut b = NetworkBuilder::new("tri");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        let z = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        b.constrain(y, z, Relation::Cmp(CmpOp::Ne));
        b.constrain(x, z, Relation::Cmp(CmpOp::Ne));
        let net = b.build().unwrap();
        let result = solve(&net, &SearchConfig::new(light_rm())).unwrap();
        assert_eq!(result.verdict, Verdict::Unsat);
        assert_eq!(result.stats.nodes, 0, "refuted by preprocessing");
    }

    #[test]
    fn two_variable_ne_has_two_solutions() {
        let mut b = NetworkBuilder::new("pair");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        let net = b.build().unwrap();
        let config = SearchConfig::new(light_rm());
        assert_eq!(count_solutions(&net, &config).unwrap(), 2);
    }

    #[test]
    fn already_solved_instance_needs_no_nodes() {
        let mut b = NetworkBuilder::new("fixed");
        let x = b.variable(vec![3]);
        let y = b.variable(vec![4]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Lt));
        let net = b.build().unwrap();
        let result = solve(&net, &SearchConfig::new(light_rm())).unwrap();
        assert_eq!(result.verdict, Verdict::Sat);
        assert_eq!(result.stats.nodes, 0);
        assert_eq!(result.solutions[0], vec![3, 4]);
    }

    #[test]
    fn verify_solution_contract() {
        let net = queens_net(4);
        assert!(verify_solution(&net, &[1, 3, 0, 2]).unwrap());
        assert!(!verify_solution(&net, &[0, 0, 0, 0]).unwrap());
        assert!(matches!(
            verify_solution(&net, &[1, 3]),
            Err(SolveError::PartialAssignment { got: 2, want: 4 })
        ));
        assert!(matches!(
            verify_solution(&net, &[1, 3, 0, 9]),
            Err(SolveError::ValueOutOfDomain { var: 3, value: 9 })
        ));
    }

    #[test]
    fn node_limit_yields_limit_verdict() {
        let net = queens_net(8);
        let mut config = SearchConfig::new(light_rm());
        config.mode = SearchMode::CountAll;
        config.node_limit = Some(3);
        let result = solve(&net, &config).unwrap();
        assert_eq!(result.verdict, Verdict::Limit);
    }

    #[test]
    fn dway_and_binary_agree_on_verdict_and_count() {
        let net = queens_net(5);
        for heuristic in [VarHeuristic::Lex, VarHeuristic::Dom, VarHeuristic::DomWdeg] {
            let mut binary = SearchConfig::new(light_rm());
            binary.var_heuristic = heuristic;
            binary.mode = SearchMode::CountAll;
            let mut dway = binary.clone();
            dway.branching = Branching::DWay;
            let b = solve(&net, &binary).unwrap();
            let d = solve(&net, &dway).unwrap();
            assert_eq!(b.solution_count, 10);
            assert_eq!(d.solution_count, 10);
        }
    }
}
