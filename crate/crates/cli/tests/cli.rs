use std::path::PathBuf;

use assert_cmd::Command;
use tempfile::TempDir;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn code_file() -> PathBuf {
    data().join("code_8_1_3.txt")
}

fn stablab() -> Command {
    Command::cargo_bin("stablab").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = stablab().args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn validate_shipped_code() {
    let out = stdout_of(&["validate", code_file().to_str().unwrap()]);
    assert!(out.contains("n = 8, k = 1"), "{out}");
    assert!(out.contains("distance 3"), "{out}");
}

#[test]
fn validate_rejects_anticommuting_generators() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.txt", "name bad\nn 2\nk 0\nstabilizer XI\nstabilizer ZI\n");
    stablab().args(["validate", f.to_str().unwrap()]).assert().code(2);
}

#[test]
fn trivial_code_validates_and_tabulates() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "trivial.txt", "name trivial\nn 1\nk 1\nlogical_x X\nlogical_z Z\n");
    stablab().args(["validate", f.to_str().unwrap()]).assert().success();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&["tables", f.to_str().unwrap()])).unwrap();
    let lookup = json["lookup"].as_object().unwrap();
    assert_eq!(lookup.len(), 1, "{json}");
    assert_eq!(lookup[""]["correction"], "I");
}

#[test]
fn parse_error_exits_three() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "garbled.txt", "name x\nn 2\nk 0\nstabilizer XQ\n");
    stablab().args(["validate", f.to_str().unwrap()]).assert().code(3);
}

#[test]
fn tables_match_golden_for_ft_schedule() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tables.json");
    stablab()
        .args(["tables", code_file().to_str().unwrap(), "--schedule", "ft", "--out", out.to_str().unwrap()])
        .args(["--golden", data().join("golden").to_str().unwrap()])
        .assert()
        .success();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn tables_refuse_non_ft_schedule() {
    let a = stablab().args(["tables", code_file().to_str().unwrap(), "--schedule", "table1"]).assert().code(2);
    let stderr = String::from_utf8(a.get_output().stderr.clone()).unwrap();
    assert!(stderr.contains("not fault tolerant"), "{stderr}");
}

#[test]
fn ft_check_reports_witness() {
    let a = stablab().args(["ft-check", code_file().to_str().unwrap(), "--schedule", "table1"]).assert().code(2);
    let stdout = String::from_utf8(a.get_output().stdout.clone()).unwrap();
    assert!(stdout.contains("Z_6Z_7") && stdout.contains("Y_5"), "{stdout}");
    let ok = stdout_of(&["ft-check", code_file().to_str().unwrap(), "--schedule", "ft"]);
    assert!(ok.contains("fault tolerant"));
}

#[test]
fn reorder_search_keeps_prefix() {
    let out = stdout_of(&[
        "reorder-search",
        code_file().to_str().unwrap(),
        "--budget",
        "2",
        "--prefix-from",
        "ft",
        "--prefix-rows",
        "4",
    ]);
    assert!(out.contains("found1") && out.contains("found2"), "{out}");
    assert!(!out.contains("found3"));
}

#[test]
fn noiseless_run_is_perfect_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        stablab()
            .args(["run", code_file().to_str().unwrap(), "--schedule", "ft", "--method", "practical,modified"])
            .args(["--p", "0,0.002", "--shots", "500", "--batches", "3", "--seed", "11", "--out", out.to_str().unwrap()])
            .assert()
            .success();
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let rows: Vec<&str> = a.lines().collect();
    assert_eq!(rows.len(), 5);
    for row in &rows[1..3] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[5].parse::<f64>().unwrap(), 0.0);
        assert_eq!(f[11].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn fit_recovers_quadratic() {
    let dir = TempDir::new().unwrap();
    let mut body = String::from(
        "p,noise,method,shots,batches,logical_mean,logical_min,logical_max,total_mean,total_min,total_max,fidelity_mean\n",
    );
    for p in [1e-4, 2e-4, 5e-4, 1e-3, 2e-3] {
        let r = 300.0 * p * p;
        body += &format!("{p},std-dep,modified,1000000,10,{r},{r},{r},{r},{r},{r},{}\n", 1.0 - r);
    }
    let f = write(&dir, "q.csv", &body);
    let out = stdout_of(&["fit", f.to_str().unwrap(), "--degree", "2"]);
    let a0: f64 = out
        .lines()
        .find_map(|l| l.trim().strip_prefix("leading order: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((a0 - 300.0).abs() < 1e-6 * 300.0, "{out}");
    assert!(out.contains("pseudo-threshold: 2.222"), "{out}");
}

#[test]
fn fit_without_rows_exits_four() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "empty.csv",
        "p,noise,method,shots,batches,logical_mean,logical_min,logical_max,total_mean,total_min,total_max,fidelity_mean\n",
    );
    stablab().args(["fit", f.to_str().unwrap()]).assert().code(4);
}
