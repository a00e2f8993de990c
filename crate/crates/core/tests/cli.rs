use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_liar-search"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn liar-search");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn optimal_family(n: usize) -> String {
    let out = run(&["plan", "--mode", "one-lie", "--n", &n.to_string()], None);
    assert_eq!(out.status.code(), Some(0));
    String::from_utf8(out.stdout).unwrap()
}

const OPTIMAL_2: &str = r#"{"n":2,"queries":[{"elements":[1,2],"multiplicity":1},{"elements":[1],"multiplicity":2},{"elements":[2],"multiplicity":2}]}"#;
const WHOLE_THRICE_2: &str = r#"{"n":2,"queries":[{"elements":[1,2],"multiplicity":3}]}"#;
const SINGLETONS_3: &str = r#"{"n":3,"queries":[{"elements":[1],"multiplicity":1},{"elements":[2],"multiplicity":1},{"elements":[3],"multiplicity":1}]}"#;

#[test]
fn plan_one_lie() {
    let out = run(&["plan", "--mode", "one-lie", "--n", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["m"], 7);
    assert_eq!(v["n"], 3);
    assert_eq!(
        v["queries"],
        json!([
            {"elements": [1, 2, 3], "multiplicity": 1},
            {"elements": [1], "multiplicity": 2},
            {"elements": [2], "multiplicity": 2},
            {"elements": [3], "multiplicity": 2},
        ])
    );
}

#[test]
fn plan_exactly_one_and_rounds() {
    let v = json_out(&run(&["plan", "--mode", "exactly-one", "--n", "8"], None));
    assert_eq!(v["m"], 3);
    let v = json_out(&run(&["plan", "--mode", "r-round", "--n", "27", "--r", "3"], None));
    assert_eq!(v["length_bound"], 9);
    assert!(v["length"].as_u64().unwrap() <= 9);
    assert_eq!(v["round1"]["queries"].as_array().unwrap().len(), 3);

    let v = json_out(&run(&["plan", "--mode", "two-round", "--n", "16", "--excellent", "7,9"], None));
    assert!(v["length"].as_u64().unwrap() <= 8);
    assert_eq!(v["run"]["verdict"], json!({"verdict": "found", "element": 7}));
    assert_eq!(v["run"]["questions"], 8);

    let v = json_out(&run(&["plan", "--mode", "adaptive", "--n", "7", "--excellent", "5"], None));
    assert_eq!(v["questions"], 3);
    assert_eq!(v["verdict"], json!({"verdict": "found", "element": 5}));
}

#[test]
fn plan_usage_errors() {
    assert_eq!(run(&["plan", "--mode", "r-round", "--n", "27"], None).status.code(), Some(2));
    assert_eq!(run(&["plan", "--mode", "nope", "--n", "3"], None).status.code(), Some(2));
    assert_eq!(run(&["plan", "--mode", "one-lie", "--n", "500"], None).status.code(), Some(2));
    assert_eq!(run(&[], None).status.code(), Some(2));
    for mode in ["no-lie", "exactly-one"] {
        assert_eq!(run(&["plan", "--mode", mode, "--n", "129"], None).status.code(), Some(2));
    }
}

#[test]
fn decode_examples() {
    let decode = |answers: &str, method: &str| {
        run(&["decode", "--family", "-", "--answers", answers, "--method", method], Some(OPTIMAL_2))
    };
    for method in ["optimal", "generic"] {
        let out = decode("NNNNN", method);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_out(&out), json!({"verdict": "none"}));

        let out = decode("YYYNN", method);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_out(&out), json!({"verdict": "found", "element": 1}));

        let out = decode("YYNYN", method);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(json_out(&out), json!({"verdict": "inconsistent"}));
    }
    let out = decode("yyynn", "generic");
    assert_eq!(json_out(&out), json!({"verdict": "found", "element": 1}));
}

#[test]
fn decode_errors_and_undecidable() {
    let out = run(&["decode", "--family", "-", "--answers", "YYY"], Some(OPTIMAL_2));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = run(&["decode", "--family", "-", "--answers", "YYYNN"], Some("{not json"));
    assert_eq!(out.status.code(), Some(2));
    let out = run(
        &["decode", "--family", "-", "--answers", "NNN", "--method", "optimal"],
        Some(SINGLETONS_3),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["decode", "--family", "-", "--answers", "NYN"], Some(SINGLETONS_3));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_out(&out), json!({"verdict": "undecidable"}));
    let out = run(
        &["decode", "--family", "-", "--answers", "NYN", "--lie-budget", "0"],
        Some(SINGLETONS_3),
    );
    assert_eq!(json_out(&out), json!({"verdict": "found", "element": 2}));
}

#[test]
fn simulate_examples() {
    let family = optimal_family(4);
    let out = run(&["simulate", "--family", "-", "--exhaustive"], Some(&family));
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["scenarios"], 16 * 10);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["cross_checked"], true);

    let out = run(&["simulate", "--family", "-", "--exhaustive", "--lie-budget", "1"], Some(SINGLETONS_3));
    assert_eq!(out.status.code(), Some(1));
    assert!(json_out(&out)["mismatches"].as_u64().unwrap() > 0);

    let out = run(&["simulate", "--family", "-", "--scenario", "{2},none"], Some(OPTIMAL_2));
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["results"][0]["verdict"], json!({"verdict": "found", "element": 2}));

    let out = run(&["simulate", "--family", "-", "--sample", "50", "--seed", "7"], Some(&family));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_out(&out)["scenarios"], 50);

    let out = run(&["simulate", "--family", "-"], Some(&family));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let family = optimal_family(5);
    let out = run(&["verify", "--family", "-", "--both"], Some(&family));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_out(&out)["solves"], true);

    let out = run(&["verify", "--family", "-"], Some(WHOLE_THRICE_2));
    assert_eq!(out.status.code(), Some(1));
    let v = json_out(&out);
    assert_eq!(v["solves"], false);
    assert!(v["partition"]["witness"]["assignment"]["first"].is_array());

    let out = run(&["verify", "--family", "-", "--semantic"], Some(SINGLETONS_3));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_out(&out)["semantic"]["witness"], "NNN");

    let out = run(&["verify", "--family", "-", "--semantic", "--lemma"], Some(SINGLETONS_3));
    assert_eq!(out.status.code(), Some(2));

    let big = optimal_family(21);
    let out = run(&["verify", "--family", "-"], Some(&big));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_min_examples() {
    let out = run(&["search-min", "--n", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["min_size"], 5);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());

    let out = run(&["search-min", "--n", "3", "--max-m", "9", "--no-prune", "--all-minimal"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["min_size"], 7);
    assert_eq!(v["all_minimal"], v["witnesses"]);

    assert_eq!(run(&["search-min", "--n", "5"], None).status.code(), Some(2));

    let out = run(&["search-min", "--n", "0"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_out(&out)["min_size"], 0);
}

#[test]
fn restrict_example() {
    let family = optimal_family(3);
    let out = run(&["restrict", "--family", "-", "--element", "3"], Some(&family));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_out(&out), serde_json::from_str::<Value>(OPTIMAL_2).unwrap());

    let out = run(&["restrict", "--family", "-", "--element", "1"], Some(SINGLETONS_3));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["search-min", "--n", "3"];
    let a = run(&args, None);
    let b = run(&args, None);
    assert_eq!(a.stdout, b.stdout);
    let args = ["simulate", "--family", "-", "--sample", "100", "--seed", "3"];
    let family = optimal_family(3);
    assert_eq!(run(&args, Some(&family)).stdout, run(&args, Some(&family)).stdout);
}
