//! Immutable problem representation: variables, domains, binary relations,
//! and the 3-clique (triangle) lists that path-consistency reasoning runs on.
//!
//! A [`ConstraintNetwork`] is built once, validated, and then shared read-only
//! by any number of solver sessions. Values are represented internally by
//! their index in the sorted initial domain, so "lexicographic order" is plain
//! index order and scan windows are index arithmetic. The special NIL support
//! pointer is index `-1`, strictly below every real index.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variable identifier: position in the network's variable list.
pub type VarId = usize;
/// Constraint identifier: position in the network's constraint list.
pub type ConstraintId = usize;
/// Directed arc identifier; each constraint contributes two arcs.
pub type ArcId = usize;

/// Comparison operator used by intensional relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    /// The operator obtained by swapping the two operands: `a op b == b op.swapped() a`.
    pub fn swapped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
        }
    }
}

/// Definitional form of a binary relation, evaluated on the values of the
/// constraint's first and second variable in that order.
///
/// Extensional relations list value pairs with either allowed or forbidden
/// semantics. Intensional relations are small closed-form predicates; they
/// never error on in-domain values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// The listed `(x, y)` value pairs are the allowed combinations.
    Allowed(Vec<(i32, i32)>),
    /// The listed `(x, y)` value pairs are forbidden; everything else is allowed.
    Forbidden(Vec<(i32, i32)>),
    /// `x op y`.
    Cmp(CmpOp),
    /// `|x - y| op k`.
    AbsDiff(CmpOp, i32),
    /// `x - y op k`.
    Diff(CmpOp, i32),
    /// `x != y` and `|x - y| != k`: one row-pair of the n-queens encoding.
    QueensSafe(i32),
}

impl Relation {
    /// Direct evaluation on raw values. This is the definitional semantics;
    /// the network compiles extensional relations into O(1) lookups and only
    /// uses this path for intensional forms.
    pub fn allows(&self, x: i32, y: i32) -> bool {
        let (xl, yl) = (i64::from(x), i64::from(y));
        match self {
            Relation::Allowed(pairs) => pairs.contains(&(x, y)),
            Relation::Forbidden(pairs) => !pairs.contains(&(x, y)),
            Relation::Cmp(op) => op.eval(xl, yl),
            Relation::AbsDiff(op, k) => op.eval((xl - yl).abs(), i64::from(*k)),
            Relation::Diff(op, k) => op.eval(xl - yl, i64::from(*k)),
            Relation::QueensSafe(k) => x != y && (xl - yl).abs() != i64::from(*k),
        }
    }
}

/// Errors rejected while assembling a network.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error("variable {0} has an empty initial domain")]
    EmptyDomain(VarId),
    #[error("variable {0} has a non-strictly-increasing initial domain")]
    UnsortedDomain(VarId),
    #[error("constraint references unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("self-loop constraint on variable {0}")]
    SelfLoop(VarId),
    #[error("duplicate constraint on variable pair ({0}, {1})")]
    DuplicatePair(VarId, VarId),
    #[error("extensional tuple ({1}, {2}) out of domain range on constraint {0}")]
    TupleOutOfRange(ConstraintId, i32, i32),
}

/// Compiled constant-time membership test for one constraint.
///
/// Extensional relations with at least half the value-pair square allowed are
/// stored as dense bit matrices over index pairs; sparser ones as hashed index
/// pair sets. Intensional relations evaluate on the underlying values.
#[derive(Debug, Clone)]
enum Compiled {
    Bits { stride: usize, words: Vec<u64> },
    Sparse(HashSet<(i32, i32)>),
    Predicate,
}

/// One binary constraint: variable pair plus relation, with the compiled
/// lookup used by `check`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub x: VarId,
    pub y: VarId,
    pub relation: Relation,
    compiled: Compiled,
}

/// Immutable binary-CSP instance: sorted integer domains, at most one
/// constraint per unordered variable pair, per-variable adjacency, and the
/// per-constraint triangle lists.
#[derive(Debug, Clone)]
pub struct ConstraintNetwork {
    name: String,
    domains: Vec<Vec<i32>>,
    constraints: Vec<Constraint>,
    adjacency: Vec<Vec<(ConstraintId, VarId)>>,
    triangles: Vec<Vec<VarId>>,
    pair_index: HashMap<(VarId, VarId), ConstraintId>,
}

/// Incremental builder for [`ConstraintNetwork`].
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    name: String,
    domains: Vec<Vec<i32>>,
    constraints: Vec<(VarId, VarId, Relation)>,
}

impl NetworkBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetworkBuilder {
            name: name.into(),
            domains: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Adds a variable with the given initial domain values and returns its id.
    pub fn variable(&mut self, values: Vec<i32>) -> VarId {
        self.domains.push(values);
        self.domains.len() - 1
    }

    /// Adds a binary constraint between `x` and `y`.
    pub fn constrain(&mut self, x: VarId, y: VarId, relation: Relation) -> &mut Self {
        self.constraints.push((x, y, relation));
        self
    }

    pub fn build(self) -> Result<ConstraintNetwork, BuildError> {
        ConstraintNetwork::new(self.name, self.domains, self.constraints)
    }
}

impl ConstraintNetwork {
    pub fn new(
        name: impl Into<String>,
        domains: Vec<Vec<i32>>,
        constraints: Vec<(VarId, VarId, Relation)>,
    ) -> Result<Self, BuildError> {
        let n = domains.len();
        for (x, dom) in domains.iter().enumerate() {
            if dom.is_empty() {
                return Err(BuildError::EmptyDomain(x));
            }
            if dom.windows(2).any(|w| w[0] >= w[1]) {
                return Err(BuildError::UnsortedDomain(x));
            }
        }

        let mut pair_index = HashMap::new();
        let mut compiled_constraints = Vec::with_capacity(constraints.len());
        for (cid, (x, y, relation)) in constraints.into_iter().enumerate() {
            if x >= n {
                return Err(BuildError::UnknownVariable(x));
            }
            if y >= n {
                return Err(BuildError::UnknownVariable(y));
            }
            if x == y {
                return Err(BuildError::SelfLoop(x));
            }
            let key = (x.min(y), x.max(y));
            if pair_index.insert(key, cid).is_some() {
                return Err(BuildError::DuplicatePair(key.0, key.1));
            }
            let compiled = compile(cid, &relation, &domains[x], &domains[y])?;
            compiled_constraints.push(Constraint {
                x,
                y,
                relation,
                compiled,
            });
        }

        let mut adjacency = vec![Vec::new(); n];
        for (cid, c) in compiled_constraints.iter().enumerate() {
            adjacency[c.x].push((cid, c.y));
            adjacency[c.y].push((cid, c.x));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(_, other)| other);
        }

        let triangles = build_triangles(&compiled_constraints, &pair_index);

        Ok(ConstraintNetwork {
            name: name.into(),
            domains,
            constraints: compiled_constraints,
            adjacency,
            triangles,
            pair_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Number of directed arcs: two per constraint.
    pub fn num_arcs(&self) -> usize {
        2 * self.constraints.len()
    }

    /// Largest initial domain cardinality, the `d` in complexity statements.
    pub fn max_domain_size(&self) -> usize {
        self.domains.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted initial values of variable `x`.
    pub fn domain_values(&self, x: VarId) -> &[i32] {
        &self.domains[x]
    }

    pub fn domain_size(&self, x: VarId) -> usize {
        self.domains[x].len()
    }

    /// Maps a value index back to the underlying value.
    pub fn value(&self, x: VarId, idx: i32) -> i32 {
        self.domains[x][idx as usize]
    }

    /// Index of `value` in the sorted initial domain of `x`, if present.
    pub fn value_index(&self, x: VarId, value: i32) -> Option<i32> {
        self.domains[x].binary_search(&value).ok().map(|i| i as i32)
    }

    pub fn constraint(&self, cid: ConstraintId) -> &Constraint {
        &self.constraints[cid]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Incident constraints of `x` as `(constraint, other endpoint)`, sorted
    /// by the other endpoint's id.
    pub fn adjacency(&self, x: VarId) -> &[(ConstraintId, VarId)] {
        &self.adjacency[x]
    }

    /// The constraint on the unordered pair `{x, y}`, if any.
    pub fn between(&self, x: VarId, y: VarId) -> Option<ConstraintId> {
        self.pair_index.get(&(x.min(y), x.max(y))).copied()
    }

    /// Variables forming a 3-clique with both endpoints of `cid`, ascending.
    pub fn triangles(&self, cid: ConstraintId) -> &[VarId] {
        &self.triangles[cid]
    }

    /// Directed arc id for `cid` oriented away from `from`.
    pub fn arc(&self, cid: ConstraintId, from: VarId) -> ArcId {
        let c = &self.constraints[cid];
        debug_assert!(from == c.x || from == c.y);
        2 * cid + usize::from(from == c.y)
    }

    /// Pure relation test on value indices; `ai` indexes the first variable of
    /// `cid` and `aj` the second. Constant time for every compiled form. The
    /// counted entry point lives on the solver session.
    pub fn check(&self, cid: ConstraintId, ai: i32, aj: i32) -> bool {
        let c = &self.constraints[cid];
        debug_assert!(ai >= 0 && (ai as usize) < self.domains[c.x].len());
        debug_assert!(aj >= 0 && (aj as usize) < self.domains[c.y].len());
        match &c.compiled {
            Compiled::Bits { stride, words } => {
                let bit = ai as usize * stride + aj as usize;
                words[bit / 64] >> (bit % 64) & 1 == 1
            }
            Compiled::Sparse(set) => set.contains(&(ai, aj)),
            Compiled::Predicate => c
                .relation
                .allows(self.domains[c.x][ai as usize], self.domains[c.y][aj as usize]),
        }
    }
}

fn compile(
    cid: ConstraintId,
    relation: &Relation,
    dom_x: &[i32],
    dom_y: &[i32],
) -> Result<Compiled, BuildError> {
    let (pairs, allowed) = match relation {
        Relation::Allowed(pairs) => (pairs, true),
        Relation::Forbidden(pairs) => (pairs, false),
        _ => return Ok(Compiled::Predicate),
    };

    let mut listed = HashSet::with_capacity(pairs.len());
    for &(vx, vy) in pairs {
        let ix = dom_x
            .binary_search(&vx)
            .map_err(|_| BuildError::TupleOutOfRange(cid, vx, vy))?;
        let iy = dom_y
            .binary_search(&vy)
            .map_err(|_| BuildError::TupleOutOfRange(cid, vx, vy))?;
        listed.insert((ix as i32, iy as i32));
    }

    let square = dom_x.len() * dom_y.len();
    let allowed_count = if allowed {
        listed.len()
    } else {
        square - listed.len()
    };

    if 2 * allowed_count >= square {
        // Dense regime: bit matrix of allowed index pairs.
        let stride = dom_y.len();
        let mut words = vec![0u64; square.div_ceil(64)];
        for ix in 0..dom_x.len() {
            for iy in 0..dom_y.len() {
                if listed.contains(&(ix as i32, iy as i32)) == allowed {
                    let bit = ix * stride + iy;
                    words[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
        Ok(Compiled::Bits { stride, words })
    } else if allowed {
        Ok(Compiled::Sparse(listed))
    } else {
        let mut set = HashSet::with_capacity(allowed_count);
        for ix in 0..dom_x.len() {
            for iy in 0..dom_y.len() {
                if !listed.contains(&(ix as i32, iy as i32)) {
                    set.insert((ix as i32, iy as i32));
                }
            }
        }
        Ok(Compiled::Sparse(set))
    }
}

/// For each constraint `c_ij`, the ascending list of variables `x_k` such that
/// both `c_ik` and `c_jk` exist.
fn build_triangles(
    constraints: &[Constraint],
    pair_index: &HashMap<(VarId, VarId), ConstraintId>,
) -> Vec<Vec<VarId>> {
    let has = |a: VarId, b: VarId| pair_index.contains_key(&(a.min(b), a.max(b)));
    let mut neighbor_sets: HashMap<VarId, Vec<VarId>> = HashMap::new();
    for c in constraints {
        neighbor_sets.entry(c.x).or_default().push(c.y);
        neighbor_sets.entry(c.y).or_default().push(c.x);
    }
    constraints
        .iter()
        .map(|c| {
            let mut tri: Vec<VarId> = neighbor_sets
                .get(&c.x)
                .map(|nbrs| {
                    nbrs.iter()
                        .copied()
                        .filter(|&z| z != c.y && has(c.y, z))
                        .collect()
                })
                .unwrap_or_default();
            tri.sort_unstable();
            tri
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ne_pair() -> ConstraintNetwork {
        let mut b = NetworkBuilder::new("pair");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        b.build().unwrap()
    }

    #[test]
    fn ne_relation_checks() {
        let net = ne_pair();
        assert!(!net.check(0, 0, 0));
        assert!(net.check(0, 0, 1));
    }

    #[test]
    fn extensional_allowed_lookup() {
        let mut b = NetworkBuilder::new("ext");
        let x = b.variable(vec![1, 2, 3]);
        let y = b.variable(vec![1, 2, 3]);
        b.constrain(x, y, Relation::Allowed(vec![(1, 2)]));
        let net = b.build().unwrap();
        let a1 = net.value_index(0, 1).unwrap();
        let a2 = net.value_index(1, 2).unwrap();
        let a3 = net.value_index(1, 3).unwrap();
        assert!(net.check(0, a1, a2));
        assert!(!net.check(0, a1, a3));
    }

    #[test]
    fn dense_and_sparse_agree_with_definition() {
        // Forbidden list below the half-square threshold compiles sparse;
        // the complementary allowed list compiles dense. Both must match
        // the definitional evaluation on every pair.
        let dom: Vec<i32> = (0..6).collect();
        let forbidden: Vec<(i32, i32)> = vec![(0, 0), (1, 3), (5, 2)];
        let allowed: Vec<(i32, i32)> = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .filter(|p| !forbidden.contains(p))
            .collect();
        for relation in [Relation::Forbidden(forbidden), Relation::Allowed(allowed)] {
            let net = ConstraintNetwork::new(
                "t",
                vec![dom.clone(), dom.clone()],
                vec![(0, 1, relation.clone())],
            )
            .unwrap();
            for a in 0..6 {
                for b in 0..6 {
                    assert_eq!(net.check(0, a, b), relation.allows(a, b), "({a},{b})");
                }
            }
        }
    }

    #[test]
    fn triangle_lists() {
        // x-y, y-z, x-z: the constraint on (x, y) has z as its only triangle.
        let mut b = NetworkBuilder::new("tri");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        let z = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        b.constrain(y, z, Relation::Cmp(CmpOp::Ne));
        b.constrain(x, z, Relation::Cmp(CmpOp::Ne));
        let net = b.build().unwrap();
        assert_eq!(net.triangles(0), &[z]);
        assert_eq!(net.triangles(1), &[x]);
        assert_eq!(net.triangles(2), &[y]);
    }

    #[test]
    fn chain_has_no_triangles() {
        let mut b = NetworkBuilder::new("chain");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        let z = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        b.constrain(y, z, Relation::Cmp(CmpOp::Ne));
        let net = b.build().unwrap();
        assert!(net.triangles(0).is_empty());
        assert!(net.triangles(1).is_empty());
    }

    #[test]
    fn triangles_match_brute_force_enumeration() {
        // K4 plus some extra sparse graphs, checked against direct triple
        // enumeration.
        for (n, edges) in [
            (4usize, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect::<Vec<_>>()),
            (6, vec![(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5)]),
            (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        ] {
            let mut b = NetworkBuilder::new("g");
            for _ in 0..n {
                b.variable(vec![0, 1]);
            }
            for &(i, j) in &edges {
                b.constrain(i, j, Relation::Cmp(CmpOp::Ne));
            }
            let net = b.build().unwrap();
            for (cid, &(i, j)) in edges.iter().enumerate() {
                let expected: Vec<VarId> = (0..n)
                    .filter(|&k| {
                        k != i
                            && k != j
                            && edges.iter().any(|&(a, b)| (a, b) == (i.min(k), i.max(k)) || (b, a) == (i.min(k), i.max(k)))
                            && edges.iter().any(|&(a, b)| (a, b) == (j.min(k), j.max(k)) || (b, a) == (j.min(k), j.max(k)))
                    })
                    .collect();
                assert_eq!(net.triangles(cid), expected.as_slice(), "edge ({i},{j})");
            }
        }
        // K4 specifically: every constraint closes with exactly the two other
        // vertices.
        let mut b = NetworkBuilder::new("k4");
        for _ in 0..4 {
            b.variable(vec![0, 1, 2]);
        }
        for i in 0..4 {
            for j in i + 1..4 {
                b.constrain(i, j, Relation::Cmp(CmpOp::Ne));
            }
        }
        let net = b.build().unwrap();
        for cid in 0..net.num_constraints() {
            assert_eq!(net.triangles(cid).len(), 2);
        }
    }

    #[test]
    fn rejects_duplicates_and_self_loops() {
        let mut b = NetworkBuilder::new("bad");
        let x = b.variable(vec![0, 1]);
        let y = b.variable(vec![0, 1]);
        b.constrain(x, y, Relation::Cmp(CmpOp::Ne));
        b.constrain(y, x, Relation::Cmp(CmpOp::Eq));
        assert!(matches!(b.build(), Err(BuildError::DuplicatePair(0, 1))));

        let mut b = NetworkBuilder::new("loop");
        let x = b.variable(vec![0, 1]);
        b.constrain(x, x, Relation::Cmp(CmpOp::Ne));
        assert!(matches!(b.build(), Err(BuildError::SelfLoop(0))));
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(matches!(
            ConstraintNetwork::new("e", vec![vec![]], vec![]),
            Err(BuildError::EmptyDomain(0))
        ));
        assert!(matches!(
            ConstraintNetwork::new("u", vec![vec![1, 1]], vec![]),
            Err(BuildError::UnsortedDomain(0))
        ));
    }
}
