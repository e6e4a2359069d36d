use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegrowth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tower_is_polynomial_of_degree_four() {
    let o = run(&["analyze", "--witness", &data("tower2.wta")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format"], "wta-growth/1");
    assert_eq!(v["verdict"], "polynomial");
    assert_eq!(v["degree"], 4);
    assert_eq!(v["witness"]["degree"], 4);
}

#[test]
fn heavy_loop_is_exponential() {
    let o = run(&["analyze", "--witness", &data("loop2.wta")]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "exponential");
    assert_eq!(v["witness"]["context"], "b(_HOLE)");
}

#[test]
fn no_accepting_state_is_empty() {
    let o = run(&["analyze", &data("empty.wta")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("\"verdict\": \"empty\""));
}

#[test]
fn parse_and_usage_errors() {
    let o = run(&["analyze", &data("broken.wta")]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3:1"));
    assert_eq!(run(&["analyze"]).status.code(), Some(64));
    assert_eq!(run(&["analyze", &data("missing.wta")]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn value_of_a_chain() {
    let o = run(&["value", &data("loop2.wta"), "--term", "b(b(b(b(b(c)))))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "32\n");
    let o = run(&["count-runs", &data("loop2.wta"), "--term", "b(b(c))"]);
    assert_eq!(stdout(&o), "1\n");
    let o = run(&["value", &data("loop2.wta"), "--term", "a(c,c)"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn generation_is_deterministic() {
    let args = ["gen", "--states", "3", "--seed", "7", "--count", "5"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_ne!(
        first.stdout,
        run(&["gen", "--states", "3", "--seed", "8", "--count", "5"]).stdout
    );
}

#[test]
fn repeated_analysis_is_byte_identical() {
    let files = [data("tower2.wta"), data("loop2.wta"), data("empty.wta")];
    let mut args = vec!["analyze", "--witness"];
    args.extend(files.iter().map(String::as_str));
    let serial = run(&args);
    args.extend(["--jobs", "3"]);
    let parallel = run(&args);
    assert_eq!(serial.stdout, parallel.stdout);
    assert_eq!(serial.status.code(), Some(2));
    assert_eq!(stdout(&serial).lines().count(), 3);
}

#[test]
fn timing_only_on_request() {
    let plain = stdout(&run(&["analyze", &data("tower2.wta")]));
    assert!(!plain.contains("timing_ms"));
    let timed = stdout(&run(&["analyze", "--timing", &data("tower2.wta")]));
    assert!(timed.contains("timing_ms"));
}

#[test]
fn transducer_example() {
    let o = run(&["mtt", "eval", &data("example.mtt"), "--term", "S(S(0))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a(a(c,b(c)),b(a(c,b(c))))\n");
    let o = run(&["mtt", "eval", &data("example.mtt"), "--term", "0"]);
    assert_eq!(stdout(&o), "b(c)\n");
    let o = run(&[
        "mtt",
        "eval",
        &data("example.mtt"),
        "--term",
        "S(S(S(S(S(S(0))))))",
        "--cap",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn transducer_branches_and_height() {
    let o = run(&["mtt", "branches", &data("example.mtt"), "--term", "S(S(0))"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.first().map(String::as_str), Some("END"));
    assert_eq!(
        lines.last().map(String::as_str),
        Some("hat_a(hat_b(hat_a(hat_b(END))))")
    );

    let o = run(&["mtt", "verify-height", &data("example.mtt"), "--term", "S(S(0))"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["max_branch_size"], 5);

    let o = run(&["mtt", "hat", &data("example.mtt"), "--materialize", "100"]);
    let out = stdout(&o);
    assert!(out.starts_with("states: q0_END:0 q1_END:0 q1_y1:1\n"));
    assert!(out.contains("letter S: 30 annotations"));
    assert!(out.contains("state q1_y1:1;"));
}

#[test]
fn oracles_print_csv_and_pairs() {
    let o = run(&["oracle", "growth", &data("loop2.wta"), "--max-size", "4"]);
    assert_eq!(stdout(&o), "n,maxValue\n1,1\n2,2\n3,4\n4,8\n");
    let o = run(&["oracle", "barbells", &data("tower2.wta"), "--max-context", "3"]);
    assert_eq!(stdout(&o), "q' q2\n");
    let o = run(&["oracle", "heavy", &data("loop2.wta")]);
    assert_eq!(stdout(&o), "q b(_HOLE)\n");
}

#[test]
fn singleton_query_is_linear() {
    let o = run(&["query", "growth", &data("singleton.wta")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degree"], 1);
    let o = run(&["query", "bf", &data("singleton.wta"), "--max-arity", "0"]);
    assert_eq!(o.status.code(), Some(65));
}
