//! Bench manifests: which instances, which algorithms, which limits.
//!
//! Manifests use the same line-oriented style as the native instance format:
//!
//! ```text
//! bench <name>
//! source <path-or-glob>
//! gen model_b n=14 d=8 p1=0.6 p2=0.32 seed=7 [forced]
//! gen geometric n=16 d=6 dist=0.55 p2=0.3 seed=9
//! gen queens n=8
//! algorithm <id> [queue=<heuristic>] [case1=<heuristic>]
//! branching binary|dway
//! var-order dom_wdeg|dom|lex
//! node-limit <u64>
//! time-limit <seconds>
//! repetitions <count>
//! jobs <count>
//! format csv|markdown
//! out <path>
//! oracle-check on|off
//! ```
//!
//! Algorithm ids are the library's: `[l]{maxrpc3,maxrpc3rm,maxrpc2,maxrpcrm,
//! ac3rm}[+h]`. `#` comments and blank lines are ignored.

use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use maxrpc::heuristics::HeuristicId;
use maxrpc::instance::{GeometricParams, ModelBParams};
use maxrpc::propagate::PropagatorConfig;
use maxrpc::search::{Branching, VarHeuristic};

#[derive(Debug, Error)]
#[error("manifest line {line}: {msg}")]
pub struct ManifestError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ManifestError> {
    Err(ManifestError {
        line,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format '{other}' (csv or markdown)")),
        }
    }
}

/// One instance source.
#[derive(Debug, Clone)]
pub enum Source {
    /// File path; treated as a glob when it contains `*`, `?`, or `[`.
    Path(String),
    ModelB(ModelBParams),
    Geometric(GeometricParams),
    Queens(usize),
}

/// One algorithm column of the report.
#[derive(Debug, Clone)]
pub struct AlgorithmSpec {
    /// Verbatim id, echoed into report rows.
    pub id: String,
    pub config: PropagatorConfig,
}

impl AlgorithmSpec {
    pub fn parse(id: &str, queue: Option<HeuristicId>, case1: Option<HeuristicId>) -> Result<Self, String> {
        let mut config: PropagatorConfig = id.parse().map_err(|e| format!("{e}"))?;
        if let Some(q) = queue {
            config.queue_heuristic = q;
        }
        if let Some(c) = case1 {
            config.case1_ordering = Some(c);
        }
        config.validate().map_err(|e| format!("{e}"))?;
        Ok(AlgorithmSpec {
            id: id.to_string(),
            config,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchManifest {
    pub name: String,
    pub sources: Vec<Source>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub branching: Branching,
    pub var_heuristic: VarHeuristic,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub repetitions: usize,
    pub jobs: usize,
    pub format: OutputFormat,
    pub out: Option<String>,
    pub oracle_check: bool,
}

impl Default for BenchManifest {
    fn default() -> Self {
        BenchManifest {
            name: "bench".into(),
            sources: Vec::new(),
            algorithms: Vec::new(),
            branching: Branching::Binary,
            var_heuristic: VarHeuristic::DomWdeg,
            node_limit: None,
            time_limit: None,
            repetitions: 1,
            jobs: 1,
            format: OutputFormat::Markdown,
            out: None,
            oracle_check: false,
        }
    }
}

fn kv_map(tokens: &[&str]) -> Vec<(String, String)> {
    tokens
        .iter()
        .map(|t| match t.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => (t.to_string(), String::new()),
        })
        .collect()
}

fn parse_value<T: FromStr>(rest: &[&str], what: &str, line: usize) -> Result<T, ManifestError> {
    let joined = rest.join("");
    joined.parse().map_err(|_| ManifestError {
        line,
        msg: format!("bad {what} '{joined}'"),
    })
}

fn get_num<T: FromStr>(
    pairs: &[(String, String)],
    key: &str,
    line: usize,
) -> Result<T, ManifestError> {
    let value = pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| ManifestError {
            line,
            msg: format!("missing parameter '{key}'"),
        })?;
    value.parse().map_err(|_| ManifestError {
        line,
        msg: format!("bad value '{value}' for '{key}'"),
    })
}

pub fn parse_manifest(text: &str) -> Result<BenchManifest, ManifestError> {
    let mut manifest = BenchManifest::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().expect("non-empty");
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "bench" => manifest.name = rest.join(" "),
            "source" => {
                if rest.is_empty() {
                    return err(line, "source needs a path");
                }
                manifest.sources.push(Source::Path(rest.join(" ")));
            }
            "gen" => {
                if rest.is_empty() {
                    return err(line, "gen needs a family");
                }
                let pairs = kv_map(&rest[1..]);
                let source = match rest[0] {
                    "model_b" => Source::ModelB(ModelBParams {
                        n: get_num(&pairs, "n", line)?,
                        d: get_num(&pairs, "d", line)?,
                        p1: get_num(&pairs, "p1", line)?,
                        p2: get_num(&pairs, "p2", line)?,
                        seed: get_num(&pairs, "seed", line)?,
                        forced: pairs.iter().any(|(k, _)| k == "forced"),
                    }),
                    "geometric" => Source::Geometric(GeometricParams {
                        n: get_num(&pairs, "n", line)?,
                        d: get_num(&pairs, "d", line)?,
                        dist: get_num(&pairs, "dist", line)?,
                        p2: get_num(&pairs, "p2", line)?,
                        seed: get_num(&pairs, "seed", line)?,
                    }),
                    "queens" => Source::Queens(get_num(&pairs, "n", line)?),
                    other => return err(line, format!("unknown generator family '{other}'")),
                };
                manifest.sources.push(source);
            }
            "algorithm" => {
                if rest.is_empty() {
                    return err(line, "algorithm needs an id");
                }
                let mut queue = None;
                let mut case1 = None;
                for opt in &rest[1..] {
                    match opt.split_once('=') {
                        Some(("queue", v)) => {
                            queue = Some(v.parse::<HeuristicId>().map_err(|e| ManifestError { line, msg: e })?)
                        }
                        Some(("case1", v)) => {
                            case1 = Some(v.parse::<HeuristicId>().map_err(|e| ManifestError { line, msg: e })?)
                        }
                        _ => return err(line, format!("unknown algorithm option '{opt}'")),
                    }
                }
                let spec = AlgorithmSpec::parse(rest[0], queue, case1)
                    .map_err(|msg| ManifestError { line, msg })?;
                manifest.algorithms.push(spec);
            }
            "branching" => {
                manifest.branching = match rest.first().copied() {
                    Some("binary") => Branching::Binary,
                    Some("dway") => Branching::DWay,
                    other => return err(line, format!("unknown branching {other:?}")),
                }
            }
            "var-order" => {
                manifest.var_heuristic = match rest.first().copied() {
                    Some("dom_wdeg") => VarHeuristic::DomWdeg,
                    Some("dom") => VarHeuristic::Dom,
                    Some("lex") => VarHeuristic::Lex,
                    other => return err(line, format!("unknown var-order {other:?}")),
                }
            }
            "node-limit" => manifest.node_limit = Some(parse_value(&rest, "node limit", line)?),
            "time-limit" => {
                let secs: f64 = parse_value(&rest, "time limit", line)?;
                manifest.time_limit = Some(Duration::from_secs_f64(secs));
            }
            "repetitions" => manifest.repetitions = parse_value(&rest, "repetitions", line)?,
            "jobs" => manifest.jobs = parse_value(&rest, "jobs", line)?,
            "format" => {
                manifest.format = rest
                    .first()
                    .copied()
                    .unwrap_or("")
                    .parse()
                    .map_err(|msg| ManifestError { line, msg })?
            }
            "out" => manifest.out = Some(rest.join(" ")),
            "oracle-check" => {
                manifest.oracle_check = match rest.first().copied() {
                    Some("on") | Some("true") => true,
                    Some("off") | Some("false") => false,
                    other => return err(line, format!("oracle-check takes on/off, found {other:?}")),
                }
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }
    if manifest.repetitions == 0 {
        manifest.repetitions = 1;
    }
    if manifest.jobs == 0 {
        manifest.jobs = 1;
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_manifest() {
        let text = "\
# demo
bench smoke
gen queens n=8
gen model_b n=10 d=5 p1=0.5 p2=0.4 seed=1 forced
source fixtures/*.csp
algorithm lmaxrpc3rm
algorithm lmaxrpcrm queue=dom case1=wdeg
algorithm lmaxrpc3rm+h
branching binary
var-order dom_wdeg
node-limit 5000
time-limit 2.5
repetitions 3
jobs 2
format csv
oracle-check on
";
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.name, "smoke");
        assert_eq!(m.sources.len(), 3);
        assert_eq!(m.algorithms.len(), 3);
        assert_eq!(m.algorithms[1].config.queue_heuristic, HeuristicId::Dom);
        assert_eq!(
            m.algorithms[1].config.case1_ordering,
            Some(HeuristicId::Wdeg)
        );
        assert_eq!(m.algorithms[2].id, "lmaxrpc3rm+h");
        assert_eq!(m.node_limit, Some(5000));
        assert_eq!(m.repetitions, 3);
        assert!(m.oracle_check);
        assert_eq!(m.format, OutputFormat::Csv);
        match &m.sources[1] {
            Source::ModelB(p) => assert!(p.forced),
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn bad_lines_carry_numbers() {
        let e = parse_manifest("bench x\nalgorithm warp9\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_manifest("gen sudoku n=9\n").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
