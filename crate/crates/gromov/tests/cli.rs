use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn gromov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gromov")).args(args).env_remove("GROMOV_CATALOG_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gromov-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_prints_the_class_count() {
    let o = gromov(&["classify", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("classes: 3"));
    assert!(stdout(&o).contains("raw candidates: 7776"));
}

#[test]
fn classify_output_does_not_depend_on_workers() {
    let dir = temp_dir("workers");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    let one = gromov(&["classify", "--n", "6", "--workers", "1", "--out", a.to_str().unwrap()]);
    let two = gromov(&["classify", "--n", "6", "--workers", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn inspect_reports_the_exclusion_rule() {
    let o = gromov(&["inspect", "124,214,324,413"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not allowable: exclusion rule violated at node 2"), "{}", stdout(&o));
}

#[test]
fn inspect_shows_diagram_and_verdicts() {
    let o = gromov(&["inspect", "127,213,324,435,546,657,716"]);
    let text = stdout(&o);
    assert!(text.contains("type: 7 (Cycle)"));
    assert!(text.contains("•1—•2—•3—•4—•5—•6—•7"));
    assert!(text.contains("generic: yes"));
    let o = gromov(&["--json", "inspect", "124,213,324,413,513,613,713"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generic"], true);
    let labels: Vec<&str> = v["closed_subsets"].as_array().unwrap().iter().filter_map(|c| c["label"].as_str()).collect();
    assert!(labels.contains(&"X4") && labels.contains(&"X5C") && labels.contains(&"R1"));
}

#[test]
fn check_paper_up_to_six_points() {
    let o = gromov(&["check-paper", "--max-n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("scoreboard: 1 / 3 / 26"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gromov(&["classify", "--n", "3"]).status.code(), Some(2));
    assert_eq!(gromov(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gromov(&["inspect", "12x,213"]).status.code(), Some(2));
    assert_eq!(gromov(&["identify", "/nonexistent/metric.txt"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = gromov(&["verify", "--n", "6", "--verify-witnesses"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("26 matched"));
    let o = gromov(&["verify", "--n", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("123,214,315,436,547,627,716"));
    assert!(stdout(&o).contains("erratum"));
}

#[test]
fn verify_json_is_machine_readable() {
    let o = gromov(&["--json", "verify", "--n", "4", "--n", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn realize_then_identify() {
    let dir = temp_dir("realize");
    let metric = dir.join("x4.txt");
    let o = gromov(&["realize", "124,213,324,413", "--out", metric.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = gromov(&["identify", metric.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("class: 1 (X4)"));

    fs::write(&metric, "4\n0 1 1 1\n1 0 1 1\n1 1 0 1\n1 1 1 0\n").unwrap();
    let o = gromov(&["identify", metric.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not delta-generic"));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn realize_rejects_non_generic_structures() {
    let o = gromov(&["realize", "124,214,324,413"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not allowable"));
}

#[test]
fn catalog_directory_from_the_environment() {
    let dir = temp_dir("env");
    let good = gromov(&["classify", "--n", "5", "--out", dir.join("catalog-n5.json").to_str().unwrap()]);
    assert_eq!(good.status.code(), Some(0));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gromov"))
            .args(["verify", "--n", "5"])
            .env("GROMOV_CATALOG_DIR", &dir)
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));
    let path = dir.join("catalog-n5.json");
    let text = fs::read_to_string(&path).unwrap().replacen("\"rank\":2", "\"rank\":4", 1);
    fs::write(&path, text).unwrap();
    let o = run();
    assert_eq!(o.status.code(), Some(70));
    assert!(String::from_utf8_lossy(&o.stderr).contains("record 1"));
    fs::remove_dir_all(dir).unwrap();
}
