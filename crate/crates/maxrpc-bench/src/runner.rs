//! Batch execution: instance loading, per-task measurement, aggregation.
//!
//! Instances in a batch may run in parallel (one session per worker); report
//! assembly is serialized and row order is fixed by (instance, algorithm)
//! position, so reports are deterministic apart from the `t` column.
//! Per-instance failures become `error` rows and never abort the batch.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use maxrpc::instance::{
    gen_geometric, gen_model_b, gen_queens, parse_native, parse_xcsp, InstanceDoc,
};
use maxrpc::network::ConstraintNetwork;
use maxrpc::oracle::{brute_ac, brute_maxrpc};
use maxrpc::propagate::{Session, Variant};
use maxrpc::search::{solve, SearchConfig, SearchMode};
use maxrpc::stats::SolverStats;

use crate::manifest::{BenchManifest, Source};
use crate::report::{infer_class_tag, Report, ReportRow};

/// A loadable instance or the reason it failed to load.
pub enum Loaded {
    Ok(Box<ConstraintNetwork>),
    Failed { name: String, error: String },
}

pub fn load_instance_file(path: &Path) -> Result<InstanceDoc, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "xml" | "xcsp" => parse_xcsp(&bytes).map_err(|e| format!("{}: {e}", path.display())),
        "json" => {
            let text = String::from_utf8(bytes).map_err(|_| "not UTF-8".to_string())?;
            InstanceDoc::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
        _ => {
            let text = String::from_utf8(bytes).map_err(|_| "not UTF-8".to_string())?;
            parse_native(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

fn is_glob(path: &str) -> bool {
    path.contains(['*', '?', '['])
}

fn push_doc(loaded: &mut Vec<Loaded>, name: String, doc: Result<InstanceDoc, String>) {
    match doc.and_then(|d| d.to_network().map_err(|e| e.to_string())) {
        Ok(net) => loaded.push(Loaded::Ok(Box::new(net))),
        Err(error) => loaded.push(Loaded::Failed { name, error }),
    }
}

/// Expands every manifest source into built networks, isolating failures.
pub fn load_sources(sources: &[Source]) -> Vec<Loaded> {
    let mut loaded = Vec::new();
    for source in sources {
        match source {
            Source::Path(path) if is_glob(path) => match glob::glob(path) {
                Ok(paths) => {
                    let mut matched = false;
                    for entry in paths {
                        matched = true;
                        match entry {
                            Ok(p) => {
                                push_doc(&mut loaded, p.display().to_string(), load_instance_file(&p))
                            }
                            Err(e) => loaded.push(Loaded::Failed {
                                name: path.clone(),
                                error: e.to_string(),
                            }),
                        }
                    }
                    if !matched {
                        loaded.push(Loaded::Failed {
                            name: path.clone(),
                            error: "glob matched no files".into(),
                        });
                    }
                }
                Err(e) => loaded.push(Loaded::Failed {
                    name: path.clone(),
                    error: e.to_string(),
                }),
            },
            Source::Path(path) => {
                push_doc(&mut loaded, path.clone(), load_instance_file(Path::new(path)));
            }
            Source::ModelB(params) => {
                push_doc(
                    &mut loaded,
                    format!("model_b(seed={})", params.seed),
                    gen_model_b(*params).map_err(|e| e.to_string()),
                );
            }
            Source::Geometric(params) => {
                push_doc(
                    &mut loaded,
                    format!("geometric(seed={})", params.seed),
                    gen_geometric(*params).map_err(|e| e.to_string()),
                );
            }
            Source::Queens(n) => {
                push_doc(&mut loaded, format!("queens-{n}"), Ok(gen_queens(*n)));
            }
        }
    }
    loaded
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RunKind {
    Preprocess,
    Search,
}

/// Stand-alone propagation runs (initialization plus fixpoint), one row per
/// instance and algorithm.
pub fn run_preprocess(manifest: &BenchManifest) -> Report {
    run(manifest, RunKind::Preprocess)
}

/// Full searches, one row per instance and algorithm.
pub fn run_search(manifest: &BenchManifest) -> Report {
    run(manifest, RunKind::Search)
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times[times.len() / 2]
}

fn run(manifest: &BenchManifest, kind: RunKind) -> Report {
    let loaded = load_sources(&manifest.sources);
    let tasks: Vec<(usize, usize)> = (0..loaded.len())
        .flat_map(|i| (0..manifest.algorithms.len()).map(move |a| (i, a)))
        .collect();
    let results: Mutex<Vec<Option<ReportRow>>> = Mutex::new(vec![None; tasks.len()]);
    let cursor = AtomicUsize::new(0);

    let worker = || loop {
        let t = cursor.fetch_add(1, Ordering::Relaxed);
        if t >= tasks.len() {
            break;
        }
        let (instance_idx, algo_idx) = tasks[t];
        let row = run_task(manifest, kind, &loaded[instance_idx], algo_idx);
        results.lock().expect("no poisoned workers")[t] = Some(row);
    };

    let jobs = manifest.jobs.max(1).min(tasks.len().max(1));
    if jobs <= 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(worker);
            }
        });
    }

    let rows = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect();
    Report::new(rows)
}

fn run_task(
    manifest: &BenchManifest,
    kind: RunKind,
    loaded: &Loaded,
    algo_idx: usize,
) -> ReportRow {
    let spec = &manifest.algorithms[algo_idx];
    let net = match loaded {
        Loaded::Failed { name, error } => {
            return ReportRow {
                instance: name.clone(),
                algorithm: spec.id.clone(),
                verdict: format!("error: {error}"),
                t: 0.0,
                n: 0,
                cc: 0,
                bumps: 0,
                class: "error".into(),
            }
        }
        Loaded::Ok(net) => net,
    };

    let mut times = Vec::with_capacity(manifest.repetitions);
    let mut reference: Option<(String, u64, u64, u64)> = None;
    for _ in 0..manifest.repetitions.max(1) {
        let (verdict, stats) = match kind {
            RunKind::Preprocess => run_preprocess_once(net, spec, manifest.oracle_check),
            RunKind::Search => run_search_once(net, spec, manifest),
        };
        times.push(stats.elapsed);
        let key = (verdict, stats.nodes, stats.cc, stats.bumps());
        match &reference {
            None => reference = Some(key),
            Some(prev) => assert_eq!(
                prev, &key,
                "nondeterministic repetition on {} with {}",
                net.name(),
                spec.id
            ),
        }
    }
    let (verdict, n, cc, bumps) = reference.expect("at least one repetition");
    ReportRow {
        instance: net.name().to_string(),
        algorithm: spec.id.clone(),
        verdict,
        t: median(times),
        n,
        cc,
        bumps,
        class: infer_class_tag(net.name()),
    }
}

fn run_preprocess_once(
    net: &ConstraintNetwork,
    spec: &crate::manifest::AlgorithmSpec,
    oracle_check: bool,
) -> (String, SolverStats) {
    let started = Instant::now();
    let mut session = Session::new(net, spec.config.clone()).expect("validated config");
    let ok = session.preprocess();
    let mut stats = std::mem::take(&mut session.stats);
    stats.elapsed = started.elapsed().as_secs_f64();

    let verdict = if oracle_check {
        oracle_verdict(net, &session, ok, &spec.config)
    } else if ok {
        "ok".to_string()
    } else {
        "wipeout".to_string()
    };
    (verdict, stats)
}

/// Cross-checks a preprocessing fixpoint against the definitional closures:
/// full variants must match the maxRPC closure exactly, light variants must
/// sit between it and the AC closure, and the AC baseline must match the AC
/// closure.
fn oracle_verdict(
    net: &ConstraintNetwork,
    session: &Session,
    ok: bool,
    config: &maxrpc::propagate::PropagatorConfig,
) -> String {
    let sets = session.domains.value_sets(net);
    let ac = brute_ac(net, None);
    let consistent = if config.variant == Variant::Ac3Rm {
        if ac.wipeout {
            !ok
        } else {
            ok && sets == ac.domains
        }
    } else {
        let closure = brute_maxrpc(net, None);
        if config.light {
            if ac.wipeout {
                !ok
            } else if !ok {
                closure.wipeout
            } else {
                (0..net.num_vars()).all(|x| {
                    closure.domains[x].is_subset(&sets[x]) && sets[x].is_subset(&ac.domains[x])
                })
            }
        } else if closure.wipeout {
            !ok
        } else {
            ok && sets == closure.domains
        }
    };
    let base = if ok { "ok" } else { "wipeout" };
    if consistent {
        format!("{base}+oracle")
    } else {
        format!("{base}+MISMATCH")
    }
}

fn run_search_once(
    net: &ConstraintNetwork,
    spec: &crate::manifest::AlgorithmSpec,
    manifest: &BenchManifest,
) -> (String, SolverStats) {
    let mut config = SearchConfig::new(spec.config.clone());
    config.branching = manifest.branching;
    config.var_heuristic = manifest.var_heuristic;
    config.mode = SearchMode::FirstSolution;
    config.node_limit = manifest.node_limit;
    config.time_limit = manifest.time_limit;
    let result = solve(net, &config).expect("validated config");
    (result.verdict.name().to_string(), result.stats)
}

/// Exact solution count for the `count` verb.
pub fn run_count(
    net: &ConstraintNetwork,
    spec: &crate::manifest::AlgorithmSpec,
    node_limit: Option<u64>,
) -> Result<u64, String> {
    let mut config = SearchConfig::new(spec.config.clone());
    config.node_limit = node_limit;
    maxrpc::search::count_solutions(net, &config).map_err(|e| e.to_string())
}
