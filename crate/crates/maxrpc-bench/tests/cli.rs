//! End-to-end tests of the bench binary and the report layer.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use maxrpc_bench::report::parse_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxrpc-bench"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("maxrpc-bench-test-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn gen_is_deterministic_and_reparsable() {
    let dir = scratch("gen");
    let a = dir.join("a.csp");
    let b = dir.join("b.csp");
    for path in [&a, &b] {
        let out = run(bin().args([
            "gen", "model_b", "--n", "10", "--d", "5", "--p1", "0.5", "--p2", "0.4", "--seed",
            "1", "--out",
        ])
        .arg(path));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text_a = fs::read_to_string(&a).unwrap();
    let text_b = fs::read_to_string(&b).unwrap();
    assert_eq!(text_a, text_b, "same seed, same bytes");
    let doc = maxrpc::instance::parse_native(&text_a).unwrap();
    assert_eq!(doc.constraints.len(), 22);
    assert_eq!(doc.meta("seed"), Some("1"));

    // JSON output is the same document in the structured form.
    let j = dir.join("a.json");
    let out = run(bin().args([
        "gen", "model_b", "--n", "10", "--d", "5", "--p1", "0.5", "--p2", "0.4", "--seed", "1",
        "--out",
    ])
    .arg(&j));
    assert!(out.status.success());
    let from_json = maxrpc::instance::InstanceDoc::from_json(&fs::read_to_string(&j).unwrap());
    assert_eq!(from_json.unwrap(), doc);
}

#[test]
fn count_verb_matches_enumeration() {
    let dir = scratch("count");
    let q5 = dir.join("queens5.csp");
    run(bin().args(["gen", "queens", "--n", "5", "--out"]).arg(&q5));
    let out = run(bin().arg("count").arg(&q5));
    assert!(out.status.success());
    assert!(stdout(&out).contains("solutions=10"), "{}", stdout(&out));
}

#[test]
fn solve_reports_equal_nodes_and_lower_cc_for_the_improved_light_variant() {
    let dir = scratch("solve");
    let q8 = dir.join("queens8.csp");
    run(bin().args(["gen", "queens", "--n", "8", "--out"]).arg(&q8));
    let csv = dir.join("report.csv");
    let out = run(bin()
        .arg("solve")
        .arg(&q8)
        .args(["--algorithm", "lmaxrpcrm,lmaxrpc3rm,ac3rm", "--format", "csv", "--out"])
        .arg(&csv));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    let emu = rows.iter().find(|r| r.algorithm == "lmaxrpcrm").unwrap();
    let new = rows.iter().find(|r| r.algorithm == "lmaxrpc3rm").unwrap();
    assert_eq!(emu.verdict, "sat");
    assert_eq!(new.verdict, "sat");
    assert_eq!(emu.n, new.n, "residual light pair visits identical nodes");
    assert!(new.cc < emu.cc, "LastAC shortcuts must save checks");
    assert!(rows.iter().any(|r| r.algorithm == "ac3rm"), "baseline present");
}

#[test]
fn csv_report_round_trips_and_is_deterministic_except_time() {
    let dir = scratch("det");
    let manifest = dir.join("bench.manifest");
    fs::write(
        &manifest,
        "bench determinism\n\
         gen model_b n=10 d=5 p1=0.6 p2=0.35 seed=4\n\
         gen queens n=6\n\
         algorithm lmaxrpc3rm\n\
         algorithm maxrpc2\n\
         repetitions 2\n\
         format csv\n",
    )
    .unwrap();
    let mut reports = Vec::new();
    for _ in 0..2 {
        let out = run(bin().arg("preprocess").arg("--manifest").arg(&manifest));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut rows = parse_csv(&stdout(&out)).unwrap();
        for row in &mut rows {
            row.t = 0.0;
        }
        reports.push(rows);
    }
    assert_eq!(reports[0], reports[1], "rows identical apart from t");

    // Aggregate rows come after per-instance rows: 2x2 instance rows, then
    // one aggregate per (class, algorithm).
    assert_eq!(reports[0].len(), 4 + 4);
    assert!(reports[0][..4].iter().all(|r| r.verdict != "-"));
    assert!(reports[0][4..].iter().all(|r| r.verdict == "-"));
}

#[test]
fn preprocess_aggregate_cc_favors_the_new_algorithm() {
    // Directional expectation at desk scale: summed preprocessing checks of
    // maxrpc3 stay at or below the maxrpc2 emulation's on a generated batch.
    let dir = scratch("agg");
    let manifest = dir.join("bench.manifest");
    let mut text = String::from("bench direction\nalgorithm maxrpc3\nalgorithm maxrpc2\nformat csv\n");
    for seed in 0..10 {
        text.push_str(&format!("gen model_b n=12 d=6 p1=0.6 p2=0.4 seed={seed}\n"));
    }
    for n in [6, 8, 10] {
        text.push_str(&format!("gen queens n={n}\n"));
    }
    fs::write(&manifest, text).unwrap();
    let out = run(bin().arg("preprocess").arg("--manifest").arg(&manifest));
    assert!(out.status.success());
    let rows = parse_csv(&stdout(&out)).unwrap();
    let total = |alg: &str| -> u64 {
        rows.iter()
            .filter(|r| r.algorithm == alg && r.verdict != "-")
            .map(|r| r.cc)
            .sum()
    };
    assert!(
        total("maxrpc3") <= total("maxrpc2"),
        "maxrpc3 {} vs maxrpc2 {}",
        total("maxrpc3"),
        total("maxrpc2")
    );
}

#[test]
fn oracle_check_verb_passes_on_generated_instances() {
    let dir = scratch("oracle");
    let inst = dir.join("m.csp");
    run(bin().args([
        "gen", "model_b", "--n", "8", "--d", "4", "--p1", "0.7", "--p2", "0.3", "--seed", "9",
        "--out",
    ])
    .arg(&inst));
    let out = run(bin().arg("oracle-check").arg(&inst));
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("maxrpc3: OK"), "{text}");
    assert!(text.contains("ac3rm: OK"), "{text}");
    assert!(!text.contains("MISMATCH"), "{text}");
}

#[test]
fn per_instance_errors_do_not_abort_the_batch() {
    let dir = scratch("errors");
    let good = dir.join("good.csp");
    run(bin().args(["gen", "queens", "--n", "5", "--out"]).arg(&good));
    let missing = dir.join("missing.csp");
    let out = run(bin()
        .arg("preprocess")
        .arg(&good)
        .arg(&missing)
        .args(["--algorithm", "lmaxrpc3rm", "--format", "csv"]));
    assert!(out.status.success(), "batch completion is exit 0");
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert!(rows.iter().any(|r| r.verdict == "ok"));
    assert!(rows.iter().any(|r| r.verdict.starts_with("error")));
}

#[test]
fn harness_errors_exit_nonzero() {
    let out = run(bin().args(["solve", "nowhere.csp", "--algorithm", "warp9"]));
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));

    let out = run(bin().args(["preprocess", "--algorithm", "maxrpc3"]));
    assert!(!out.status.success(), "no instances is a harness error");
}

#[test]
fn parallel_jobs_produce_the_sequential_report() {
    let dir = scratch("jobs");
    let manifest = dir.join("bench.manifest");
    let mut text =
        String::from("bench jobs\nalgorithm lmaxrpc3rm\nalgorithm ac3rm\nformat csv\n");
    for n in 4..9 {
        text.push_str(&format!("gen queens n={n}\n"));
    }
    fs::write(&manifest, text).unwrap();
    let mut collected = Vec::new();
    for jobs in ["1", "4"] {
        let out = run(bin()
            .arg("solve")
            .args(["--manifest"])
            .arg(&manifest)
            .args(["--jobs", jobs]));
        assert!(out.status.success());
        let mut rows = parse_csv(&stdout(&out)).unwrap();
        for row in &mut rows {
            row.t = 0.0;
        }
        collected.push(rows);
    }
    assert_eq!(collected[0], collected[1]);
}

#[test]
fn xcsp_files_flow_through_the_harness() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/rlfap-mini.xml");
    let out = run(bin()
        .arg("solve")
        .arg(fixture)
        .args(["--algorithm", "lmaxrpc3rm,ac3rm", "--format", "csv"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_csv(&stdout(&out)).unwrap();
    let row = rows.iter().find(|r| r.algorithm == "lmaxrpc3rm").unwrap();
    assert_eq!(row.instance, "rlfap-mini");
    assert_eq!(row.verdict, "sat");

    let out = run(bin().arg("oracle-check").arg(fixture));
    assert!(out.status.success());
    assert!(!stdout(&out).contains("MISMATCH"));
}

#[test]
fn light_flag_is_sugar_for_the_l_prefix() {
    let dir = scratch("light");
    let q = dir.join("q.csp");
    run(bin().args(["gen", "queens", "--n", "6", "--out"]).arg(&q));
    let out = run(bin()
        .arg("solve")
        .arg(&q)
        .args(["--algorithm", "maxrpc3rm", "--light", "--format", "csv"]));
    assert!(out.status.success());
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows[0].algorithm, "lmaxrpc3rm");
}
