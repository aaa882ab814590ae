mod common;

use std::path::Path;
use std::process::{Command, Output};

use subrepair::{inject_errors, synthetic_clean, SyntheticSpec};

fn subrepair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subrepair"))
        .args(args)
        .env_remove("SUBREPAIR_THREADS")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn employee_args<'a>(data: &'a str, rules: &'a str) -> Vec<&'a str> {
    vec!["--data", data, "--rules", rules, "--exclude-cols", "Id", "--label-col", "Data labeling"]
}

#[test]
fn detect_reports_every_row_conflicting() {
    let dir = tempfile::tempdir().unwrap();
    let (data, rules) = (common::fixture("employee.csv"), common::fixture("employee_fds.txt"));
    let mut args = vec!["detect"];
    args.extend(employee_args(path(&data), path(&rules)));
    args.extend(["--out", path(dir.path())]);
    let out = subrepair(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("detect_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["stats"]["rows"], 10);
    assert_eq!(stats["stats"]["conflicting_rows"], 10);
    assert!(dir.path().join("graph.txt").exists());
}

#[test]
fn detect_without_rules_gives_empty_graph() {
    let data = common::fixture("employee.csv");
    let out = subrepair(&["detect", "--data", path(&data)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("edges 0"));
}

#[test]
fn bad_inputs_exit_with_two() {
    let data = common::fixture("employee.csv");
    let out = subrepair(&["detect", "--data", path(&data), "--rules", "/definitely/not/here"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let rules = common::fixture("employee_fds.txt");
    let mut args = vec!["repair", "--alpha", "1.5"];
    args.extend(employee_args(path(&data), path(&rules)));
    assert_eq!(subrepair(&args).status.code(), Some(2));
}

#[test]
fn zero_time_limit_falls_back_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let (data, rules) = (common::fixture("employee.csv"), common::fixture("employee_fds.txt"));
    let mut args = vec!["repair", "--algorithm", "mico", "--time-limit-ms", "0", "--out", path(dir.path())];
    args.extend(employee_args(path(&data), path(&rules)));
    let out = subrepair(&args);
    assert!(out.status.success());
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    for t in plan["per_component"].as_array().unwrap() {
        if t["is_clique"] == false {
            assert_eq!(t["strategy"], "MICO-Fallback");
        }
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("fell back"));
}

#[test]
fn synthetic_run_writes_metrics_and_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec { rows: 1000, cols: 6, domain: 100, seed: 4 };
    let (clean, rules) = synthetic_clean(&spec).unwrap();
    let (dirty, truth) = inject_errors(&clean, &rules, 0.05, 4).unwrap();
    let data = dir.path().join("dirty.csv");
    let labels = dir.path().join("labels.csv");
    let rules_path = dir.path().join("rules.txt");
    dirty.save_csv(&data).unwrap();
    truth.write_csv(std::fs::File::create(&labels).unwrap()).unwrap();
    let text: Vec<String> = rules.iter().map(|r| r.display(&dirty)).collect();
    std::fs::write(&rules_path, text.join("\n")).unwrap();

    let mut plans = Vec::new();
    for threads in ["1", "4"] {
        let out_dir = dir.path().join(format!("out{threads}"));
        let out = subrepair(&[
            "repair", "--data", path(&data), "--rules", path(&rules_path), "--labels", path(&labels),
            "--algorithm", "mico", "--threads", threads, "--out", path(&out_dir),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join("metrics.json").exists());
        plans.push((
            std::fs::read(out_dir.join("plan.json")).unwrap(),
            std::fs::read(out_dir.join("removal.txt")).unwrap(),
            std::fs::read(out_dir.join("scores.csv")).unwrap(),
        ));
    }
    assert!(plans[0] == plans[1]);
}

#[test]
fn bench_emits_one_row_per_configuration() {
    let out = subrepair(&["bench", "--rows", "200,300,400", "--cols", "4", "--seed", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 6);
    assert_eq!(lines.iter().filter(|l| l.starts_with("ppis,")).count(), 3);
    assert_eq!(lines.iter().filter(|l| l.starts_with("mico,")).count(), 3);

    let single = subrepair(&["bench", "--rows", "200", "--cols", "4", "--algorithm", "ppis"]);
    assert_eq!(String::from_utf8(single.stdout).unwrap().lines().count(), 2);
}
