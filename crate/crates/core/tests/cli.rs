use cdag_calculus::calculus::{check_rule, Verdict};
use cdag_calculus::cdag::CDag;
use cdag_calculus::cli::run;
use cdag_calculus::query::RuleQuery;
use cdag_calculus::text::parse_micro_graph;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn data(name: &str) -> String {
    format!("{}/data/{name}.cdag", env!("CARGO_MANIFEST_DIR"))
}

fn cdag(args: &[&str], stdin: &str) -> Out {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("cdag").chain(args.iter().copied());
    let code = run(argv, &mut input, &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn rule_two_holds_on_the_feedback_file() {
    let o = cdag(&["check-rule", &data("feedback_through_b"), "--rule", "2", "--x", "Z", "--y", "Y"], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("statement: P(y | do(z)) = P(y | z)"));
    assert!(o.stdout.contains("verdict: HOLDS"));
}

#[test]
fn dsep_failure_prints_a_witness() {
    let o = cdag(&["dsep", &data("three_needed"), "--x", "X", "--y", "Y", "--z", "Z1,Z2"], "");
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("verdict: FAILS"));
    assert!(o.stdout.contains("witness graph:\nvertex A.1"));
    let o = cdag(&["dsep", &data("three_needed_small"), "--x", "X", "--y", "Y", "--z", "Z1,Z2"], "");
    assert_eq!(o.code, 0);
}

#[test]
fn validate_reports_singleton_self_loops() {
    let o = cdag(&["validate"], "cluster A 1\nedge A -> A");
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("invalid: "));
    let o = cdag(&["validate", "-"], "cluster A 2\nedge A -> A");
    assert_eq!((o.code, o.stdout.as_str()), (0, "valid\n"));
    let o = cdag(&["validate", "--format", "json"], "cluster A 1\nedge A <-> A");
    assert_eq!(o.code, 1);
    let doc: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["valid"], false);
}

#[test]
fn input_errors_exit_two_with_one_line() {
    for (args, stdin) in [
        (vec!["validate"], "cluster A\n"),
        (vec!["canonical"], "cluster A 1\nedge A -> Q\n"),
        (vec!["validate", "/nonexistent/file.cdag"], ""),
        (vec!["check-rule", "--rule", "4", "--x", "A", "--y", "B"], "cluster A 1\ncluster B 1\n"),
        (vec!["check-rule", "--x", "A", "--y", "B"], "cluster A 1\ncluster B 1\n"),
        (vec!["check-rule", "--rule", "1", "--x", "A", "--y", "A"], "cluster A 1\n"),
        (vec!["check-rule", "--rule", "1", "--x", "A", "--y", "B", "--over", "A"], "cluster A 1\ncluster B 1\n"),
        (vec!["dsep", "--x", "A", "--y", "C"], "cluster A 1\ncluster B 1\n"),
        (vec!["dsep", "--x", "A", "--y", "B"], "cluster A 1\ncluster B 1\nedge A -> A\n"),
        (vec!["no-such-command"], ""),
    ] {
        let o = cdag(&args, stdin);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stderr);
        assert_eq!(o.stderr.lines().count(), 1, "{args:?}: {}", o.stderr);
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn parse_errors_carry_positions() {
    let o = cdag(&["validate"], "cluster A 1\nedge A => A\n");
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("error: <stdin>:2:"), "{}", o.stderr);
}

#[test]
fn oracle_counts_and_budgets() {
    let o = cdag(&["oracle-count", &data("two_cycle")], "");
    assert_eq!((o.code, o.stdout.as_str()), (0, "compatible graphs: 2\n"));
    let o = cdag(&["oracle-count", &data("three_needed_small"), "--up-to-permutation"], "");
    assert_eq!(o.stdout, "compatible graphs: 2\nup to index permutation: 1\n");
    let o = cdag(&["oracle-count", &data("two_cycle"), "--max-graphs", "1"], "");
    assert_eq!(o.code, 3);
    let o = cdag(&["oracle-count", &data("large_clusters")], "");
    assert_eq!(o.code, 3);
    assert!(o.stderr.starts_with("error: "));
    let o = cdag(&["oracle-violator", &data("large_clusters"), "--rule", "dsep", "--x", "X", "--y", "Y"], "");
    assert_eq!(o.code, 3);
}

#[test]
fn oracle_violator_matches_the_engine() {
    let args = |f: &str| vec!["oracle-violator".to_string(), data(f), "--rule".into(), "dsep".into(), "--x".into(), "X".into(), "--y".into(), "Y".into(), "--z".into(), "Z1,Z2".into()];
    let big: Vec<String> = args("three_needed");
    let o = cdag(&big.iter().map(String::as_str).collect::<Vec<_>>(), "");
    assert_eq!(o.code, 1);
    let g = parse_micro_graph(&o.stdout).unwrap().graph;
    assert_eq!(g.len(), 7);
    let small: Vec<String> = args("three_needed_small");
    let o = cdag(&small.iter().map(String::as_str).collect::<Vec<_>>(), "");
    assert_eq!((o.code, o.stdout.as_str()), (0, "ABSENT\n"));
}

#[test]
fn witness_prints_graph_or_holds() {
    let o = cdag(&["witness", &data("feedback_through_b"), "--rule", "2", "--x", "Z", "--y", "Y"], "");
    assert_eq!((o.code, o.stdout.as_str()), (0, "HOLDS\n"));
    let o = cdag(&["witness", &data("three_needed"), "--rule", "dsep", "--x", "X", "--y", "Y", "--z", "Z1,Z2"], "");
    assert_eq!(o.code, 1);
    let parsed = parse_micro_graph(&o.stdout).unwrap();
    let c = CDag::parse(&std::fs::read_to_string(data("three_needed")).unwrap()).unwrap();
    assert!(cdag_calculus::abstraction::is_compatible(&parsed.graph, &c).unwrap());
}

#[test]
fn graph_dumps() {
    let o = cdag(&["canonical", &data("singleton_chain")], "");
    assert_eq!(
        o.stdout,
        "vertex A.1\nvertex B.1\nvertex B.2\nvertex C.1\n\
         edge A.1 -> B.2\nedge B.1 -> A.1\nedge B.1 -> C.1\nedge C.1 -> B.2\n"
    );
    let o = cdag(&["unfolded", &data("feedback_through_b")], "");
    assert!(o.stdout.contains("edge A.1 -> B.2 eligible\n"));
    assert!(o.stdout.contains("edge A.1 -> B.3\n"));
    let parsed = parse_micro_graph(&o.stdout).unwrap();
    assert_eq!(parsed.eligible.len(), 2);
    let o = cdag(&["unfolded", &data("feedback_through_b"), "--format", "json"], "");
    let doc: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["eligible"].as_array().unwrap().len(), 2);
}

#[test]
fn reduce_caps_cardinalities() {
    let o = cdag(&["reduce", &data("large_clusters")], "");
    assert_eq!(o.code, 0);
    let r = CDag::parse(&o.stdout).unwrap();
    assert_eq!(r.cardinality("B"), Some(3));
    assert_eq!(r.cardinality("D"), Some(2));
    let o = cdag(&["reduce", &data("large_clusters"), "--format", "json"], "");
    let doc: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["clusters"][2]["cardinality"], 3);
}

#[test]
fn json_verdicts_round_trip_and_agree_with_text() {
    let cases: [(&str, &[&str]); 3] = [
        ("three_needed", &["dsep", "--x", "X", "--y", "Y", "--z", "Z1,Z2"]),
        ("feedback_through_b", &["check-rule", "--rule", "2", "--x", "Z", "--y", "Y"]),
        ("mixed_feedback", &["check-rule", "--rule", "3", "--x", "X", "--y", "Y", "--z", "D"]),
    ];
    for (file, args) in cases {
        let path = data(file);
        let mut json_args: Vec<&str> = vec![args[0], &path];
        json_args.extend_from_slice(&args[1..]);
        let text = cdag(&json_args, "");
        json_args.extend(["--format", "json"]);
        let json = cdag(&json_args, "");
        assert_eq!(text.code, json.code);
        let v = Verdict::from_json(&json.stdout).unwrap();
        assert_eq!(v.to_text(), text.stdout);
        assert_eq!(v.to_json() + "\n", json.stdout);
        let c = CDag::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let q: RuleQuery = v.query.clone();
        assert_eq!(check_rule(&c, &q).unwrap(), v);
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["crosscheck", "--seed", "11", "--count", "25"];
    let a = cdag(&args, "");
    let b = cdag(&args, "");
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with("checked "));
    let c = cdag(&["crosscheck", "--seed", "12", "--count", "25", "--format", "json"], "");
    let doc: serde_json::Value = serde_json::from_str(&c.stdout).unwrap();
    assert_eq!(doc["mismatches"].as_array().unwrap().len(), 0);
    let args = ["dsep", "--x", "X", "--y", "Y", "--z", "Z1,Z2", "--format", "json"];
    let input = std::fs::read_to_string(data("three_needed")).unwrap();
    assert_eq!(cdag(&args, &input).stdout, cdag(&args, &input).stdout);
}

#[test]
fn help_exits_zero() {
    let o = cdag(&["--help"], "");
    assert_eq!(o.code, 0);
    for sub in ["validate", "canonical", "unfolded", "reduce", "dsep", "check-rule", "witness", "oracle-count", "oracle-violator", "crosscheck"] {
        assert!(o.stdout.contains(sub), "{sub}");
    }
}
