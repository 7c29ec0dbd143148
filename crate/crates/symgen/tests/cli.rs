//! The symgen binary end to end: flag parsing, human output, machine
//! formats, environment fallback, and exit codes.

use std::process::Command;

fn symgen() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symgen"));
    cmd.env_remove("SYMGEN_WORKERS");
    cmd
}

fn stdout_of(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn series_prints_reference_value() {
    let out = symgen()
        .args(["series", "--n", "10", "--order", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("0.88199"), "{}", stdout_of(&out));
}

#[test]
fn series_rejects_unknown_orders() {
    let out = symgen()
        .args(["series", "--n", "10", "--order", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degree_two_always_generates() {
    let out = symgen()
        .args(["generate", "--n", "2", "--trials", "50", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("p_hat=1 "), "{text}");
    assert!(text.contains("seed=3"), "seed must be echoed: {text}");
}

#[test]
fn invalid_degree_is_a_usage_error() {
    let out = symgen()
        .args(["generate", "--n", "0", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_subcommand_prints_the_fraction() {
    let out = symgen().args(["exact", "--n", "3"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("13/18"), "{text}");
    assert!(text.contains("0.722222222222"), "{text}");
}

#[test]
fn word_rejects_equal_halves_with_usage_exit() {
    let out = symgen()
        .args(["word", "--u", "x", "--v", "x", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("halves are equal"), "{stderr}");
}

#[test]
fn exact_word_prints_known_fraction() {
    let out = symgen()
        .args(["word", "--u", "x", "--v", "y", "--n", "4", "--exact"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("1/24"), "{}", stdout_of(&out));
}

#[test]
fn csv_output_has_schema_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("one.csv");
    let second = dir.path().join("two.csv");
    for path in [&first, &second] {
        let status = symgen()
            .args([
                "word", "--u", "xy", "--v", "yx", "--n", "12", "--trials", "2000", "--seed",
                "11", "--workers", "1", "--output",
            ])
            .arg(path)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let one = std::fs::read_to_string(&first).unwrap();
    assert_eq!(one, std::fs::read_to_string(&second).unwrap());
    let mut lines = one.lines();
    assert!(lines.next().unwrap().starts_with("# symgen word n=12 u=xy v=yx"));
    assert_eq!(
        lines.next().unwrap(),
        "experiment,n,parameters,trials,successes,p_hat,ci_low,ci_high,bound_or_series,seed"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("word,12,u=xy;v=yx;ell=4,2000,"), "{row}");
    assert!(row.ends_with(",11"), "{row}");
}

#[test]
fn json_output_embeds_config_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    let status = symgen()
        .args([
            "generate", "--n", "5", "--trials", "300", "--seed", "2", "--workers", "1",
            "--format", "json", "--output",
        ])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["subcommand"], "generate");
    assert_eq!(v["config"]["seed"], "2");
    assert_eq!(v["report"]["estimate"]["trials"], 300);
    assert_eq!(v["report"]["estimate"]["seed"], 2);
    assert!(v["report"]["estimate"].get("wall_time").is_none());
    assert!(v["report"]["histogram"].is_object());
    assert!(v["series"].is_number());
}

#[test]
fn chain_trace_is_valid_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let status = symgen()
        .args([
            "chain", "--n", "16", "--u", "x", "--v", "y", "--k", "2", "--trials", "50",
            "--seed", "5", "--trace",
        ])
        .arg(&trace)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["trial", "i", "letter", "from", "to", "kind", "coincidence"] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
        assert!(v["from"].as_u64().unwrap() >= 1, "points are 1-based");
        lines += 1;
    }
    assert!(lines >= 50, "at least one query per traced chain");
}

#[test]
fn env_var_sets_default_workers() {
    let direct = symgen()
        .args(["generate", "--n", "4", "--trials", "400", "--seed", "21", "--workers", "1"])
        .output()
        .unwrap();
    let mut with_env = symgen();
    with_env.env("SYMGEN_WORKERS", "2");
    let via_env = with_env
        .args(["generate", "--n", "4", "--trials", "400", "--seed", "21"])
        .output()
        .unwrap();
    assert!(direct.status.success() && via_env.status.success());

    let estimate_line = |text: &str| {
        text.lines()
            .find(|l| l.contains("contains alternating"))
            .unwrap()
            .to_string()
    };
    assert_eq!(
        estimate_line(&stdout_of(&direct)),
        estimate_line(&stdout_of(&via_env)),
        "counts must not depend on worker scheduling"
    );
    assert!(stdout_of(&via_env).contains("workers=2"));

    let mut bad = symgen();
    bad.env("SYMGEN_WORKERS", "many");
    let out = bad
        .args(["generate", "--n", "3", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orders_reports_certification() {
    let out = symgen()
        .args([
            "orders", "--n", "40", "--r", "3", "--trials", "200", "--seed", "8", "--certify",
            "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("7 positive words"), "{text}");
    assert!(text.contains("4/4"), "{text}");
}

#[test]
fn chain_reports_each_step() {
    let out = symgen()
        .args(["chain", "--n", "20", "--u", "x", "--v", "y", "--trials", "500", "--seed", "13"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("k=5"), "default k is the capacity: {text}");
    assert!(text.contains("full chain"), "{text}");
}
