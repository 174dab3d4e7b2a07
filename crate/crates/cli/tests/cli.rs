use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bar_chart(name: &str) -> PathBuf {
    fixtures().join("bar_chart").join(name)
}

fn slate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slate"))
        .args(args)
        .env("RUST_LOG", "off")
        .env_remove("SLATE_API_KEY")
        .output()
        .expect("spawn slate")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_cassette(out_dir: &Path) -> Output {
    slate(&[
        "run",
        "--task",
        s(&bar_chart("task.json")),
        "--cassette",
        s(&bar_chart("cassette.json")),
        "--out",
        s(out_dir),
    ])
}

#[test]
fn cassette_run_writes_artifacts_and_replays() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("run");
    let out = run_cassette(&out_dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    for name in ["trajectory.jsonl", "final.html", "summary.txt", "config.json", "step_0.png", "step_2.png"] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("status: answered"), "{summary}");
    assert!(summary.contains("steps: 3"), "{summary}");
    assert!(summary.contains(r##"<rect id="bar1" fill="#a629a6" height="450" width="70" x="20" y="20" rx="4" ry="4"/>"##));

    let trajectory = out_dir.join("trajectory.jsonl");
    let replay = slate(&["replay", s(&trajectory), "--task", s(&bar_chart("task.json"))]);
    assert_eq!(code(&replay), 0, "{}", stderr(&replay));
    assert_eq!(stdout(&replay).trim(), "ok: 3 steps verified, contexts rebuilt");
}

#[test]
fn two_cassette_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run_cassette(&a)), 0);
    assert_eq!(code(&run_cassette(&b)), 0);
    for name in ["trajectory.jsonl", "final.html", "step_1.png"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let committed = std::fs::read_to_string(bar_chart("trajectory.jsonl")).unwrap();
    assert_eq!(std::fs::read_to_string(a.join("trajectory.jsonl")).unwrap(), committed);
}

#[test]
fn config_json_does_not_leak_the_key() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("run");
    let out = Command::new(env!("CARGO_BIN_EXE_slate"))
        .args(["run", "--task", s(&bar_chart("task.json")), "--cassette", s(&bar_chart("cassette.json"))])
        .args(["--out", s(&out_dir)])
        .env("RUST_LOG", "debug")
        .env("SLATE_API_KEY", "sk-not-for-logs-1234")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let config = std::fs::read_to_string(out_dir.join("config.json")).unwrap();
    assert!(config.contains("<set>"), "{config}");
    assert!(!config.contains("sk-not-for-logs"));
    assert!(!stderr(&out).contains("sk-not-for-logs"));
    assert!(!stdout(&out).contains("sk-not-for-logs"));
}

#[test]
fn never_answering_solver_exhausts_the_budget() {
    let tmp = TempDir::new().unwrap();
    let script = tmp.path().join("never.json");
    std::fs::write(&script, r#"{"turns": ["<thought>still looking</thought>"], "repeat": true}"#).unwrap();
    let out_dir = tmp.path().join("run");
    let out = slate(&[
        "run",
        "--task",
        s(&bar_chart("task.json")),
        "--script",
        s(&script),
        "--critic",
        "none",
        "--budget",
        "1",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let lines = std::fs::read_to_string(out_dir.join("trajectory.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 1);
}

#[test]
fn missing_task_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = slate(&[
        "run",
        "--task",
        s(&tmp.path().join("absent.json")),
        "--cassette",
        s(&bar_chart("cassette.json")),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("absent.json"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&slate(&["run", "--tusk", "x"])), 2);
    assert_eq!(code(&slate(&["frobnicate"])), 2);
}

#[test]
fn empty_cassette_is_a_solver_failure() {
    let tmp = TempDir::new().unwrap();
    let cassette = tmp.path().join("empty.json");
    std::fs::write(&cassette, "{}").unwrap();
    let out = slate(&[
        "run",
        "--task",
        s(&bar_chart("task.json")),
        "--cassette",
        s(&cassette),
        "--out",
        s(&tmp.path().join("run")),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn malformed_config_reports_its_line() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("slate.toml");
    std::fs::write(&config, "budget = 4\nbugdet = 5\n").unwrap();
    let out = slate(&["run", "--task", s(&bar_chart("task.json")), "--config", s(&config)]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn toml_config_supplies_solver_and_output() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("slate.toml");
    let text = format!(
        "budget = 6\nout = \"from-config\"\n\n[solver]\nkind = \"cassette\"\ncassette = \"{}\"\n\n[critic]\nkind = \"diff\"\nthreshold = 0.005\n",
        s(&bar_chart("cassette.json"))
    );
    std::fs::write(&config, text).unwrap();
    let out = slate(&["run", "--task", s(&bar_chart("task.json")), "--config", s(&config)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let resolved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("from-config/config.json")).unwrap()).unwrap();
    assert_eq!(resolved["episode"]["budget"], 6);
    assert_eq!(resolved["solver"]["kind"], "cassette");
}

#[test]
fn several_tasks_get_numbered_directories() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("batch");
    let task = bar_chart("task.json");
    let out = slate(&[
        "run",
        "--task",
        s(&task),
        "--task",
        s(&task),
        "--cassette",
        s(&bar_chart("cassette.json")),
        "--jobs",
        "2",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let a = std::fs::read(out_dir.join("00_task/trajectory.jsonl")).unwrap();
    let b = std::fs::read(out_dir.join("01_task/trajectory.jsonl")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tampered_trajectory_names_both_digests() {
    let tmp = TempDir::new().unwrap();
    let text = std::fs::read_to_string(bar_chart("trajectory.jsonl")).unwrap();
    let mut lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let recorded = lines[1]["renderDigest"].as_str().unwrap().to_owned();
    let forged = format!("{}{}", if recorded.starts_with('0') { '1' } else { '0' }, &recorded[1..]);
    lines[1]["renderDigest"] = serde_json::json!(forged);
    let path = tmp.path().join("tampered.jsonl");
    let body: String = lines.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, body).unwrap();

    let out = slate(&["replay", s(&path)]);
    assert_eq!(code(&out), 6);
    let err = stderr(&out);
    assert!(err.contains(&recorded) && err.contains(&forged), "{err}");
}

#[test]
fn validate_accepts_the_example_and_locates_errors() {
    let ok = slate(&["validate", s(&fixtures().join("fragments/insert_example.frag"))]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("sg1"));

    let bad = slate(&["validate", s(&fixtures().join("fragments/unclosed.frag"))]);
    assert_eq!(code(&bad), 7);
    assert!(stderr(&bad).contains("byte 15"), "{}", stderr(&bad));
}

#[test]
fn render_of_an_empty_document_is_one_colour() {
    let tmp = TempDir::new().unwrap();
    let doc = tmp.path().join("empty.html");
    std::fs::write(&doc, slate_boilerplate()).unwrap();
    let png = tmp.path().join("empty.png");
    let out = slate(&["render", s(&doc), "--out", s(&png), "--canvas-width", "64"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bytes = std::fs::read(&png).unwrap();
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
    let width = u32::from_be_bytes(bytes[16..20].try_into().unwrap());
    assert_eq!(width, 64);
}

fn slate_boilerplate() -> &'static str {
    "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n</head>\n<body>\n</body>\n</html>\n"
}

#[test]
fn stats_prints_a_row_per_step_and_writes_csv() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("stats.csv");
    let out = slate(&["stats", s(&bar_chart("trajectory.jsonl")), "--csv", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = stdout(&out);
    assert!(table.contains("tokens_out"), "{table}");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 4, "{rows}");
    assert!(rows.lines().next().unwrap().contains("method"));
}

#[test]
fn stats_without_input_is_a_usage_error() {
    assert_eq!(code(&slate(&["stats"])), 2);
}

#[test]
fn synthetic_stats_list_every_size() {
    let out = slate(&["stats", "--synthetic"]);
    assert_eq!(code(&out), 0);
    let table = stdout(&out);
    for n in ["10", "100", "1000"] {
        assert!(table.lines().any(|l| l.split_whitespace().next() == Some(n)), "{table}");
    }
}
