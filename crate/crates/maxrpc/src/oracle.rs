//! Ground-truth implementations used to cross-check the propagation engine.
//!
//! These are deliberately naive fixpoint computations straight from the
//! definitions, sharing no code with the propagators: relation evaluation
//! goes through the definitional [`Relation::allows`] on raw values, no
//! support is ever cached, and nothing here touches the check counters.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::network::{ConstraintNetwork, VarId};

/// Result of running a closure to fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    /// Surviving values per variable.
    pub domains: Vec<BTreeSet<i32>>,
    /// True iff some domain emptied.
    pub wipeout: bool,
    /// Number of sweeps until stability.
    pub passes: usize,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search space of {0:e} assignments exceeds the enumeration guard")]
    GuardExceeded(f64),
}

/// Assignment-space bound for exhaustive enumeration.
pub const ENUMERATION_GUARD: f64 = 1e7;

fn initial_domains(net: &ConstraintNetwork) -> Vec<BTreeSet<i32>> {
    (0..net.num_vars())
        .map(|x| net.domain_values(x).iter().copied().collect())
        .collect()
}

fn allows(net: &ConstraintNetwork, cid: usize, u: VarId, au: i32, _v: VarId, av: i32) -> bool {
    let c = net.constraint(cid);
    if c.x == u {
        c.relation.allows(au, av)
    } else {
        c.relation.allows(av, au)
    }
}

/// Does `a` (of `x`) have some compatible value in the current domain of the
/// other endpoint of `cid`?
fn has_ac_support(
    net: &ConstraintNetwork,
    domains: &[BTreeSet<i32>],
    cid: usize,
    x: VarId,
    a: i32,
    y: VarId,
) -> bool {
    domains[y].iter().any(|&b| allows(net, cid, x, a, y, b))
}

/// Arc consistency by definition: repeatedly delete any value without a
/// support on some incident constraint, until stable.
pub fn brute_ac(net: &ConstraintNetwork, start: Option<&[BTreeSet<i32>]>) -> ClosureResult {
    let mut domains = start.map(<[_]>::to_vec).unwrap_or_else(|| initial_domains(net));
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for x in 0..net.num_vars() {
            let doomed: Vec<i32> = domains[x]
                .iter()
                .copied()
                .filter(|&a| {
                    net.adjacency(x)
                        .iter()
                        .any(|&(cid, y)| !has_ac_support(net, &domains, cid, x, a, y))
                })
                .collect();
            for a in doomed {
                domains[x].remove(&a);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let wipeout = domains.iter().any(BTreeSet::is_empty);
    ClosureResult {
        domains,
        wipeout,
        passes,
    }
}

/// Is some value of `z` compatible with both `a` (of `x`) and `b` (of `y`)?
fn has_witness(
    net: &ConstraintNetwork,
    domains: &[BTreeSet<i32>],
    x: VarId,
    a: i32,
    y: VarId,
    b: i32,
    z: VarId,
) -> bool {
    let c_xz = net.between(x, z).expect("triangle edge");
    let c_yz = net.between(y, z).expect("triangle edge");
    domains[z]
        .iter()
        .any(|&w| allows(net, c_xz, x, a, z, w) && allows(net, c_yz, y, b, z, w))
}

/// Max restricted path consistency by definition: a value survives iff on
/// every incident constraint it has a compatible value whose pair carries a
/// witness in every variable closing a 3-clique with that constraint. Runs
/// the deletion rule to fixpoint.
pub fn brute_maxrpc(net: &ConstraintNetwork, start: Option<&[BTreeSet<i32>]>) -> ClosureResult {
    let mut domains = start.map(<[_]>::to_vec).unwrap_or_else(|| initial_domains(net));
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for x in 0..net.num_vars() {
            let doomed: Vec<i32> = domains[x]
                .iter()
                .copied()
                .filter(|&a| {
                    net.adjacency(x).iter().any(|&(cid, y)| {
                        !domains[y].iter().any(|&b| {
                            allows(net, cid, x, a, y, b)
                                && net
                                    .triangles(cid)
                                    .iter()
                                    .all(|&z| has_witness(net, &domains, x, a, y, b, z))
                        })
                    })
                })
                .collect();
            for a in doomed {
                domains[x].remove(&a);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let wipeout = domains.iter().any(BTreeSet::is_empty);
    ClosureResult {
        domains,
        wipeout,
        passes,
    }
}

/// All satisfying total assignments by exhaustive recursion with direct
/// constraint checks, guarded by [`ENUMERATION_GUARD`].
pub fn enumerate_solutions(net: &ConstraintNetwork) -> Result<Vec<Vec<i32>>, OracleError> {
    let space: f64 = (0..net.num_vars())
        .map(|x| net.domain_size(x) as f64)
        .product();
    if space > ENUMERATION_GUARD {
        return Err(OracleError::GuardExceeded(space));
    }
    let mut solutions = Vec::new();
    let mut partial: Vec<i32> = Vec::with_capacity(net.num_vars());
    recurse(net, &mut partial, &mut solutions);
    Ok(solutions)
}

fn recurse(net: &ConstraintNetwork, partial: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
    let x = partial.len();
    if x == net.num_vars() {
        out.push(partial.clone());
        return;
    }
    for &a in net.domain_values(x) {
        let consistent = net.adjacency(x).iter().all(|&(cid, y)| {
            if y < x {
                allows(net, cid, x, a, y, partial[y])
            } else {
                true
            }
        });
        if consistent {
            partial.push(a);
            recurse(net, partial, out);
            partial.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{CmpOp, NetworkBuilder, Relation};

    fn chain_lt() -> ConstraintNetwork {
        let mut b = NetworkBuilder::new("chain");
        let x = b.variable(vec![0, 1, 2]);
        let y = b.variable(vec![0, 1, 2]);
        let z = b.variable(vec![0, 1, 2]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Lt));
        b.constrain(y, z, Relation::Cmp(CmpOp::Lt));
        b.build().unwrap()
    }

    fn triangle(rel: Relation) -> ConstraintNetwork {
        let mut b = NetworkBuilder::new("tri");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        let z = b.variable(vec![0, 1]);
        b.constrain(x, y, rel.clone());
        b.constrain(y, z, rel.clone());
        b.constrain(x, z, rel);
        b.build().unwrap()
    }

    #[test]
    fn ac_on_lt_chain() {
        // x < y < z over {0,1,2}: first pass trims x=2, z=0 and y's ends,
        // second pass settles x in {0}, y in {1}, z in {2}.
        let result = brute_ac(&chain_lt(), None);
        assert!(!result.wipeout);
        assert_eq!(result.domains[0], BTreeSet::from([0]));
        assert_eq!(result.domains[1], BTreeSet::from([1]));
        assert_eq!(result.domains[2], BTreeSet::from([2]));
    }

    #[test]
    fn ac_identity_without_constraints() {
        let mut b = NetworkBuilder::new("free");
        b.variable(vec![0, 5, 9]);
        b.variable(vec![-1, 1]);
        let net = b.build().unwrap();
        let result = brute_ac(&net, None);
        assert!(!result.wipeout);
        assert_eq!(result.domains[0], BTreeSet::from([0, 5, 9]));
        assert_eq!(result.domains[1], BTreeSet::from([-1, 1]));
    }

    #[test]
    fn empty_relation_wipes_out() {
        let mut b = NetworkBuilder::new("empty");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Allowed(vec![]));
        let net = b.build().unwrap();
        assert!(brute_ac(&net, None).wipeout);
        assert!(brute_maxrpc(&net, None).wipeout);
    }

    #[test]
    fn maxrpc_on_triangles() {
        // All-different on a 2-value triangle has no path-consistent pair.
        let ne = brute_maxrpc(&triangle(Relation::Cmp(CmpOp::Ne)), None);
        assert!(ne.wipeout);
        assert!(ne.domains.iter().all(BTreeSet::is_empty));
        // AC alone sees nothing wrong.
        assert!(!brute_ac(&triangle(Relation::Cmp(CmpOp::Ne)), None).wipeout);

        // All-equal keeps everything.
        let eq = brute_maxrpc(&triangle(Relation::Cmp(CmpOp::Eq)), None);
        assert!(!eq.wipeout);
        assert!(eq.domains.iter().all(|d| d.len() == 2));
    }

    #[test]
    fn maxrpc_equals_ac_without_triangles() {
        let net = chain_lt();
        assert_eq!(brute_maxrpc(&net, None).domains, brute_ac(&net, None).domains);
    }

    #[test]
    fn maxrpc_is_idempotent_and_contained_in_ac() {
        let net = triangle(Relation::Cmp(CmpOp::Ne));
        let once = brute_maxrpc(&net, None);
        let twice = brute_maxrpc(&net, Some(&once.domains));
        assert_eq!(once.domains, twice.domains);

        let ac = brute_ac(&net, None);
        for (m, a) in once.domains.iter().zip(&ac.domains) {
            assert!(m.is_subset(a));
        }
    }

    #[test]
    fn enumeration_examples() {
        let mut b = NetworkBuilder::new("pair");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        let net = b.build().unwrap();
        assert_eq!(
            enumerate_solutions(&net).unwrap(),
            vec![vec![0, 1], vec![1, 0]]
        );

        assert!(enumerate_solutions(&triangle(Relation::Cmp(CmpOp::Ne)))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn every_solution_survives_the_closure() {
        let net = chain_lt();
        let closure = brute_maxrpc(&net, None);
        for solution in enumerate_solutions(&net).unwrap() {
            for (x, &v) in solution.iter().enumerate() {
                assert!(closure.domains[x].contains(&v));
            }
        }
    }
}
