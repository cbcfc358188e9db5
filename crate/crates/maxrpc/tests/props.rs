//! Property tests for the format and ordering invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use maxrpc::heuristics::HeuristicId;
use maxrpc::instance::{
    gen_model_b, parse_native, serialize_native, ConstraintSpec, InstanceDoc, ModelBParams,
};
use maxrpc::network::{CmpOp, ConstraintNetwork, NetworkBuilder, Relation};
use maxrpc::oracle::brute_maxrpc;
use maxrpc::propagate::{PropagatorConfig, Session};

fn arb_cmp() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Eq),
        Just(CmpOp::Ne),
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge),
    ]
}

fn arb_domain() -> impl Strategy<Value = Vec<i32>> {
    proptest::collection::btree_set(-20i32..20, 1..6).prop_map(|s| s.into_iter().collect())
}

fn arb_relation(dom_x: Vec<i32>, dom_y: Vec<i32>) -> BoxedStrategy<Relation> {
    let pairs = proptest::collection::vec(
        (0..dom_x.len(), 0..dom_y.len()),
        0..8,
    )
    .prop_map(move |idx| {
        idx.into_iter()
            .map(|(i, j)| (dom_x[i], dom_y[j]))
            .collect::<Vec<_>>()
    });
    prop_oneof![
        pairs.clone().prop_map(Relation::Allowed),
        pairs.prop_map(Relation::Forbidden),
        arb_cmp().prop_map(Relation::Cmp),
        (arb_cmp(), -5i32..5).prop_map(|(op, k)| Relation::AbsDiff(op, k)),
        (arb_cmp(), -5i32..5).prop_map(|(op, k)| Relation::Diff(op, k)),
        (1i32..5).prop_map(Relation::QueensSafe),
    ]
    .boxed()
}

prop_compose! {
    fn arb_doc()(
        name in "[a-z][a-z0-9_-]{0,10}",
        domains in proptest::collection::vec(arb_domain(), 2..5),
        meta in proptest::collection::vec(("[a-z]{1,6}", "[a-z0-9.]{1,8}"), 0..3),
    )(
        picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..4),
        relations in {
            let pair_list: Vec<(usize, usize)> = (0..domains.len())
                .flat_map(|i| ((i + 1)..domains.len()).map(move |j| (i, j)))
                .collect();
            let strategies: Vec<BoxedStrategy<Relation>> = pair_list
                .iter()
                .map(|&(x, y)| arb_relation(domains[x].clone(), domains[y].clone()))
                .collect();
            (Just(pair_list), strategies)
        },
        name in Just(name),
        domains in Just(domains),
        meta in Just(meta),
    ) -> InstanceDoc {
        let (pair_list, relations) = relations;
        let mut doc = InstanceDoc::new(name);
        doc.domains = domains;
        let mut used = BTreeSet::new();
        for pick in picks {
            let k = pick.index(pair_list.len().max(1)).min(pair_list.len().saturating_sub(1));
            if pair_list.is_empty() || !used.insert(k) {
                continue;
            }
            let (x, y) = pair_list[k];
            doc.constraints.push(ConstraintSpec { x, y, relation: relations[k].clone() });
        }
        doc.provenance = meta.into_iter().collect();
        doc
    }
}

proptest! {
    /// parse(serialize(doc)) is the identity.
    #[test]
    fn native_round_trip(doc in arb_doc()) {
        let text = serialize_native(&doc);
        let parsed = parse_native(&text).expect("serializer output parses");
        prop_assert_eq!(parsed, doc);
    }

    /// Every generated document builds into a validated network.
    #[test]
    fn generated_docs_build(doc in arb_doc()) {
        prop_assert!(doc.to_network().is_ok());
    }

    /// Triangle lists match direct triple enumeration (n <= 12).
    #[test]
    fn triangles_match_triples(
        n in 3usize..12,
        edge_bits in proptest::collection::vec(any::<bool>(), 66),
    ) {
        let mut b = NetworkBuilder::new("t");
        for _ in 0..n {
            b.variable(vec![0, 1]);
        }
        let mut edges = Vec::new();
        let mut bit = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if edge_bits[bit % edge_bits.len()] {
                    b.constrain(i, j, Relation::Cmp(CmpOp::Ne));
                    edges.push((i, j));
                }
                bit += 1;
            }
        }
        let net = b.build().unwrap();
        let has = |a: usize, c: usize| edges.contains(&(a.min(c), a.max(c)));
        for (cid, &(i, j)) in edges.iter().enumerate() {
            let expected: Vec<usize> = (0..n)
                .filter(|&k| k != i && k != j && has(i, k) && has(j, k))
                .collect();
            prop_assert_eq!(net.triangles(cid), expected.as_slice());
        }
    }
}

fn fixpoint(
    net: &ConstraintNetwork,
    mut config: PropagatorConfig,
) -> (bool, Vec<BTreeSet<i32>>) {
    config.debug_checks = true;
    let mut s = Session::new(net, config).unwrap();
    let ok = s.preprocess();
    (ok, s.domains.value_sets(net))
}

/// Queue and revision orderings may only change check counts and blame,
/// never the propagation fixpoint.
#[test]
fn orderings_never_change_fixpoints() {
    let order_choices = [
        HeuristicId::Dom,
        HeuristicId::DelRatio,
        HeuristicId::Wdeg,
        HeuristicId::DomWdeg,
    ];
    for seed in 0..24u64 {
        let params = ModelBParams {
            n: 8,
            d: 5,
            p1: 0.7,
            p2: 0.25 + (seed % 4) as f64 * 0.1,
            seed,
            forced: false,
        };
        let net = gen_model_b(params).unwrap().to_network().unwrap();
        for id in ["maxrpc3", "maxrpc3rm", "lmaxrpc3rm", "ac3rm"] {
            let base: PropagatorConfig = id.parse().unwrap();
            let (ok0, sets0) = fixpoint(&net, base.clone());
            let mut variants: Vec<PropagatorConfig> = Vec::new();
            for h in order_choices {
                let mut c = base.clone();
                c.queue_heuristic = h;
                variants.push(c);
                let mut c = base.clone();
                c.case1_ordering = Some(h);
                variants.push(c);
            }
            if !id.starts_with("ac") {
                for h in [HeuristicId::DomWdeg, HeuristicId::Wdeg] {
                    let mut c = base.clone();
                    c.case2_ordering = Some(h);
                    variants.push(c);
                    let mut c = base.clone();
                    c.case3_ordering = Some(h);
                    variants.push(c);
                    let mut c = base.clone();
                    c.case4_ordering = Some(h);
                    variants.push(c);
                }
            }
            for config in variants {
                let (ok, sets) = fixpoint(&net, config.clone());
                assert_eq!(ok, ok0, "verdict changed by {config:?} on {}", net.name());
                if ok {
                    assert_eq!(sets, sets0, "fixpoint changed by {config:?} on {}", net.name());
                }
            }
        }
    }
}

/// Witness-loss propagation is the one thing the full variants do that the
/// light ones skip: after a pruning event, a value whose cached support pair
/// lost its last witness (with no replacement support) must die under the
/// full check and survive the light one. Dense 4-clique-rich instances are
/// searched for such an event, and the extra deletions are confirmed against
/// the definitional closure.
#[test]
fn witness_loss_is_propagated_by_full_variants_only() {
    for seed in 0..200u64 {
        let params = ModelBParams {
            n: 5,
            d: 4,
            p1: 1.0, // complete graph: every triple is a clique
            p2: 0.3,
            seed,
            forced: false,
        };
        let net = gen_model_b(params).unwrap().to_network().unwrap();

        let run = |light: bool, victim: (usize, i32)| -> Option<(bool, Vec<BTreeSet<i32>>)> {
            let config: PropagatorConfig =
                if light { "lmaxrpc3" } else { "maxrpc3" }.parse().unwrap();
            let mut s = Session::new(&net, config).unwrap();
            if !s.preprocess() {
                return None;
            }
            if !s.domains.contains(victim.0, victim.1) || s.domains.size(victim.0) == 1 {
                return None;
            }
            s.push_level();
            s.remove_value(victim.0, victim.1);
            let ok = s.propagate_from(victim.0);
            Some((ok, s.domains.value_sets(&net)))
        };

        for var in 0..net.num_vars() {
            for idx in 0..net.domain_size(var) as i32 {
                let (Some((ok_full, full)), Some((ok_light, light))) =
                    (run(false, (var, idx)), run(true, (var, idx)))
                else {
                    continue;
                };
                if !ok_full || !ok_light || full == light {
                    continue;
                }
                // Found a witness-loss event: full pruned strictly more.
                for x in 0..net.num_vars() {
                    assert!(full[x].is_subset(&light[x]), "full must prune more, never less");
                }
                // The full fixpoint is exactly the definitional closure of
                // the post-deletion state; the light one is not.
                let pre = brute_maxrpc(&net, None);
                let mut start = pre.domains.clone();
                start[var].remove(&net.value(var, idx));
                let closure = brute_maxrpc(&net, Some(&start));
                assert!(!closure.wipeout);
                assert_eq!(full, closure.domains, "full variant must reach the closure");
                assert_ne!(light, closure.domains, "light variant must have skipped it");
                return;
            }
        }
    }
    panic!("no witness-loss event found across 200 seeds");
}

/// Consistencies prune the tree, never the solution set: every variant
/// agrees with the AC baseline on verdicts and exact counts.
#[test]
fn all_variants_agree_on_verdicts_and_counts() {
    use maxrpc::search::{count_solutions, SearchConfig, SearchMode};
    for seed in 0..12u64 {
        let params = ModelBParams {
            n: 7,
            d: 4,
            p1: 0.8,
            p2: 0.2 + (seed % 3) as f64 * 0.15,
            seed,
            forced: false,
        };
        let net = gen_model_b(params).unwrap().to_network().unwrap();
        let mut counts = Vec::new();
        for id in ["ac3rm", "maxrpc3", "maxrpc3rm", "lmaxrpc3", "lmaxrpc3rm", "lmaxrpc2", "lmaxrpcrm"] {
            let mut config = SearchConfig::new(id.parse().unwrap());
            config.mode = SearchMode::CountAll;
            counts.push(count_solutions(&net, &config).unwrap());
        }
        assert!(
            counts.windows(2).all(|w| w[0] == w[1]),
            "counts diverge on {}: {counts:?}",
            net.name()
        );
    }
}

/// Different neighbor orderings can blame different constraints for the same
/// wipeout, shifting the weight bump.
#[test]
fn case1_ordering_shifts_bump_target() {
    // x_j = {0}; both neighbors lose every value when revised against it.
    let build = || {
        let mut b = NetworkBuilder::new("blame");
        let xj = b.variable(vec![0]);
        let xa = b.variable(vec![1]);
        let xb = b.variable(vec![1]);
        b.constrain(xj, xa, Relation::Cmp(CmpOp::Eq));
        b.constrain(xj, xb, Relation::Cmp(CmpOp::Eq));
        b.build().unwrap()
    };
    let net = build();
    let config: PropagatorConfig = "lmaxrpc3rm".parse().unwrap();

    let mut plain = Session::new(&net, config.clone()).unwrap();
    assert!(!plain.propagate_from(0));
    assert_eq!(plain.stats.bump_log, vec![0], "ascending order blames c0");

    let mut weighted_cfg = config;
    weighted_cfg.case1_ordering = Some(HeuristicId::Wdeg);
    let mut weighted = Session::new(&net, weighted_cfg).unwrap();
    weighted.weights.bump(1, &mut maxrpc::stats::SolverStats::new());
    assert!(!weighted.propagate_from(0));
    assert_eq!(
        weighted.stats.bump_log,
        vec![1],
        "descending weight order blames the heavier c1"
    );
}
