//! Command-line benchmark harness: stand-alone propagation runs, full
//! searches, exact counting, oracle cross-checks, and instance generation.
//!
//! Exit codes: 0 when a batch completes (whatever the per-instance verdicts),
//! nonzero on harness errors (bad flags, unreadable manifest) and on
//! `oracle-check` mismatches.

use maxrpc_bench::{manifest, report, runner};

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use maxrpc::heuristics::HeuristicId;
use maxrpc::instance::{
    gen_geometric, gen_model_b, gen_queens, serialize_native, GeometricParams, InstanceDoc,
    ModelBParams,
};
use maxrpc::oracle::{brute_ac, brute_maxrpc};
use maxrpc::propagate::{Session, Variant};
use maxrpc::search::{Branching, VarHeuristic};

use manifest::{AlgorithmSpec, BenchManifest, Source};
use report::{emit, Report};
use runner::{load_sources, run_count, run_preprocess, run_search, Loaded};

#[derive(Parser)]
#[command(
    name = "maxrpc-bench",
    about = "Benchmark harness for maxRPC propagation and search",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonRunArgs {
    /// Instance files (native .csp, .json, or XCSP .xml); globs allowed.
    instances: Vec<String>,
    /// Manifest file; flags extend and override it.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Algorithm ids, comma separated or repeated
    /// ([l]{maxrpc3,maxrpc3rm,maxrpc2,maxrpcrm,ac3rm}[+h]).
    #[arg(long, value_delimiter = ',')]
    algorithm: Vec<String>,
    /// Run the light variant of every --algorithm id.
    #[arg(long)]
    light: bool,
    /// Propagation-list extraction policy
    /// (fifo, dom, del_ratio, wdeg, dom_wdeg).
    #[arg(long)]
    queue_heuristic: Option<String>,
    /// Neighbor-revision ordering heuristic (case 1).
    #[arg(long)]
    case1: Option<String>,
    /// Output format (csv or markdown).
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Repetitions per measurement; t is the median, n and cc must repeat
    /// exactly.
    #[arg(long)]
    repetitions: Option<usize>,
    /// Parallel workers (one solver session each).
    #[arg(long)]
    jobs: Option<usize>,
    /// Cross-check each fixpoint against the brute-force closures.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stand-alone propagation to fixpoint per instance and algorithm.
    Preprocess(PreprocessArgs),
    /// Full search per instance and algorithm.
    Solve(SolveArgs),
    /// Count all solutions of one instance.
    Count(CountArgs),
    /// Compare propagation fixpoints against the definitional closures.
    OracleCheck(OracleCheckArgs),
    /// Generate an instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// binary (x=a / x!=a) or dway.
    #[arg(long)]
    branching: Option<String>,
    /// Variable ordering: dom_wdeg, dom, or lex.
    #[arg(long)]
    var_order: Option<String>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct CountArgs {
    instance: String,
    /// Algorithm id (default lmaxrpc3rm).
    #[arg(long, default_value = "lmaxrpc3rm")]
    algorithm: String,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct OracleCheckArgs {
    instances: Vec<String>,
    /// Algorithms to check (default: maxrpc3, maxrpc3rm, lmaxrpc3,
    /// lmaxrpc3rm, ac3rm).
    #[arg(long, value_delimiter = ',')]
    algorithm: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    /// model_b, geometric, or queens.
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    dist: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a solution (model_b only).
    #[arg(long)]
    forced: bool,
    /// Output path; .json selects the structured form, anything else the
    /// native text format. Stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Preprocess(args) => run_batch(args.common, None),
        Command::Solve(args) => {
            let search = SearchOverrides {
                branching: args.branching,
                var_order: args.var_order,
                node_limit: args.node_limit,
                time_limit: args.time_limit,
            };
            run_batch(args.common, Some(search))
        }
        Command::Count(args) => count_command(args),
        Command::OracleCheck(args) => oracle_check_command(args),
        Command::Gen(args) => gen_command(args),
    }
}

struct SearchOverrides {
    branching: Option<String>,
    var_order: Option<String>,
    node_limit: Option<u64>,
    time_limit: Option<f64>,
}

fn fail(msg: impl AsRef<str>) -> ExitCode {
    eprintln!("error: {}", msg.as_ref());
    ExitCode::from(2)
}

fn parse_heuristic(name: &Option<String>) -> Result<Option<HeuristicId>, String> {
    name.as_deref().map(str::parse).transpose()
}

/// Builds the effective manifest from an optional manifest file plus flags.
fn build_manifest(
    common: &CommonRunArgs,
    search: Option<&SearchOverrides>,
) -> Result<BenchManifest, String> {
    let mut manifest = match &common.manifest {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            manifest::parse_manifest(&text).map_err(|e| e.to_string())?
        }
        None => BenchManifest::default(),
    };
    for instance in &common.instances {
        manifest.sources.push(Source::Path(instance.clone()));
    }
    let queue = parse_heuristic(&common.queue_heuristic)?;
    let case1 = parse_heuristic(&common.case1)?;
    for id in &common.algorithm {
        let id = if common.light && !id.starts_with('l') {
            format!("l{id}")
        } else {
            id.clone()
        };
        manifest
            .algorithms
            .push(AlgorithmSpec::parse(&id, queue, case1)?);
    }
    if manifest.algorithms.is_empty() {
        return Err("no algorithms selected (use --algorithm or a manifest)".into());
    }
    if manifest.sources.is_empty() {
        return Err(
            "no instances given (positional paths, --manifest sources, or gen lines)".into(),
        );
    }
    if let Some(format) = &common.format {
        manifest.format = format.parse()?;
    }
    if let Some(out) = &common.out {
        manifest.out = Some(out.display().to_string());
    }
    if let Some(r) = common.repetitions {
        manifest.repetitions = r.max(1);
    }
    if let Some(j) = common.jobs {
        manifest.jobs = j.max(1);
    }
    manifest.oracle_check |= common.oracle_check;

    if let Some(search) = search {
        if let Some(branching) = &search.branching {
            manifest.branching = match branching.as_str() {
                "binary" => Branching::Binary,
                "dway" => Branching::DWay,
                other => return Err(format!("unknown branching '{other}'")),
            };
        }
        if let Some(order) = &search.var_order {
            manifest.var_heuristic = match order.as_str() {
                "dom_wdeg" => VarHeuristic::DomWdeg,
                "dom" => VarHeuristic::Dom,
                "lex" => VarHeuristic::Lex,
                other => return Err(format!("unknown var order '{other}'")),
            };
        }
        if search.node_limit.is_some() {
            manifest.node_limit = search.node_limit;
        }
        if let Some(secs) = search.time_limit {
            manifest.time_limit = Some(Duration::from_secs_f64(secs));
        }
    }
    Ok(manifest)
}

fn write_report(manifest: &BenchManifest, report: &Report) -> Result<(), String> {
    let text = emit(report, manifest.format);
    match &manifest.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_batch(common: CommonRunArgs, search: Option<SearchOverrides>) -> ExitCode {
    let manifest = match build_manifest(&common, search.as_ref()) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let report = if search.is_some() {
        run_search(&manifest)
    } else {
        run_preprocess(&manifest)
    };
    for row in &report.rows {
        if row.verdict.starts_with("error") {
            eprintln!("note: {} / {}: {}", row.instance, row.algorithm, row.verdict);
        }
    }
    match write_report(&manifest, &report) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn count_command(args: CountArgs) -> ExitCode {
    let spec = match AlgorithmSpec::parse(&args.algorithm, None, None) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let loaded = load_sources(&[Source::Path(args.instance.clone())]);
    for entry in loaded {
        match entry {
            Loaded::Failed { name, error } => return fail(format!("{name}: {error}")),
            Loaded::Ok(net) => match run_count(&net, &spec, args.node_limit) {
                Ok(count) => println!("{} {} solutions={count}", net.name(), spec.id),
                Err(e) => return fail(format!("{}: {e}", net.name())),
            },
        }
    }
    ExitCode::SUCCESS
}

fn oracle_check_command(args: OracleCheckArgs) -> ExitCode {
    let ids: Vec<String> = if args.algorithm.is_empty() {
        ["maxrpc3", "maxrpc3rm", "lmaxrpc3", "lmaxrpc3rm", "ac3rm"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        args.algorithm.clone()
    };
    let mut specs = Vec::new();
    for id in &ids {
        match AlgorithmSpec::parse(id, None, None) {
            Ok(s) => specs.push(s),
            Err(e) => return fail(e),
        }
    }
    let sources: Vec<Source> = args.instances.iter().cloned().map(Source::Path).collect();
    if sources.is_empty() {
        return fail("no instances given");
    }
    let mut mismatches = 0usize;
    for entry in load_sources(&sources) {
        let net = match entry {
            Loaded::Failed { name, error } => {
                eprintln!("note: {name}: {error}");
                mismatches += 1;
                continue;
            }
            Loaded::Ok(net) => net,
        };
        let closure = brute_maxrpc(&net, None);
        let ac = brute_ac(&net, None);
        for spec in &specs {
            let mut session = Session::new(&net, spec.config.clone()).expect("validated");
            let ok = session.preprocess();
            let sets = session.domains.value_sets(&net);
            let good = if spec.config.variant == Variant::Ac3Rm {
                if ac.wipeout {
                    !ok
                } else {
                    ok && sets == ac.domains
                }
            } else if spec.config.light {
                if ac.wipeout {
                    !ok
                } else if !ok {
                    closure.wipeout
                } else {
                    (0..net.num_vars()).all(|x| {
                        closure.domains[x].is_subset(&sets[x])
                            && sets[x].is_subset(&ac.domains[x])
                    })
                }
            } else if closure.wipeout {
                !ok
            } else {
                ok && sets == closure.domains
            };
            if good {
                println!("{} {}: OK", net.name(), spec.id);
            } else {
                println!("{} {}: MISMATCH", net.name(), spec.id);
                mismatches += 1;
            }
        }
    }
    if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn gen_command(args: GenArgs) -> ExitCode {
    let doc: Result<InstanceDoc, String> = match args.family.as_str() {
        "model_b" => {
            let (Some(p1), Some(p2)) = (args.p1, args.p2) else {
                return fail("model_b needs --p1 and --p2");
            };
            if args.d == 0 {
                return fail("model_b needs --d");
            }
            gen_model_b(ModelBParams {
                n: args.n,
                d: args.d,
                p1,
                p2,
                seed: args.seed,
                forced: args.forced,
            })
            .map_err(|e| e.to_string())
        }
        "geometric" => {
            let (Some(dist), Some(p2)) = (args.dist, args.p2) else {
                return fail("geometric needs --dist and --p2");
            };
            if args.d == 0 {
                return fail("geometric needs --d");
            }
            gen_geometric(GeometricParams {
                n: args.n,
                d: args.d,
                dist,
                p2,
                seed: args.seed,
            })
            .map_err(|e| e.to_string())
        }
        "queens" => Ok(gen_queens(args.n)),
        other => return fail(format!("unknown family '{other}'")),
    };
    let doc = match doc {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let json = args
        .out
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = if json {
        doc.to_json()
    } else {
        serialize_native(&doc)
    };
    match &args.out {
        Some(path) => match fs::write(path, text) {
            Ok(()) => {
                println!("wrote {}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(format!("{}: {e}", path.display())),
        },
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}
