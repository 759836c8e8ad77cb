use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn growthlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthlab"))
        .args(args)
        .env_remove("GROWTHLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON report")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("growthlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn taylor_grid_passes() {
    let o = growthlab(&["run", scenario("bell-taylor.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let checks = r["checks"].as_array().unwrap();
    // m = 1..=5 and 3m < n ≤ 60
    assert_eq!(checks.len(), 57 + 54 + 51 + 48 + 45);
    assert!(checks.iter().all(|c| c["verdict"] == "pass"));
}

#[test]
fn schema_violation_exits_3_with_path() {
    let o = growthlab(&["run", scenario("broken.json").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("$.payload.vs[0]"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let path = scenario("slalom-cl2.json");
    let (a, b) = (tmp("cl2-a.json"), tmp("cl2-b.json"));
    for out in [&a, &b] {
        let o = growthlab(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let r: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(r["seed"], 7);

    // a different seed draws different samples
    let o = growthlab(&["run", path.to_str().unwrap(), "--seed", "8"]);
    assert_ne!(o.stdout, x);
}

#[test]
fn numbers_are_rational_strings() {
    let o = growthlab(&["run", scenario("kelley-kappa.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["checks"][0]["values"]["kappa"], "2/3");
    fn no_floats(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(n) => n.is_u64() || n.is_i64(),
            serde_json::Value::Array(a) => a.iter().all(no_floats),
            serde_json::Value::Object(m) => m.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&r));
}

#[test]
fn failing_check_exits_1() {
    let f = tmp("wrong.json");
    std::fs::write(
        &f,
        r#"{"kind": "cantor", "payload": {"check": "measure", "set": [{"0": 1}], "expect": "1/3"}}"#,
    )
    .unwrap();
    let o = growthlab(&["run", f.to_str().unwrap(), "--format", "table"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("fail"));
}

#[test]
fn exhausted_budget_exits_2() {
    let o = growthlab(&["run", scenario("bell-iso.json").to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&o)["verdict"], "unknown");

    let o = Command::new(env!("CARGO_BIN_EXE_growthlab"))
        .args(["run", scenario("bell-iso.json").to_str().unwrap()])
        .env("GROWTHLAB_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_growthlab"))
        .args(["run", scenario("bell-iso.json").to_str().unwrap()])
        .env("GROWTHLAB_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&growthlab(&["verify", "nope"])), 3);
    assert_eq!(code(&growthlab(&["frobnicate"])), 3);
    assert_eq!(code(&growthlab(&["run", "/nonexistent/scenario.json"])), 3);
    assert_eq!(code(&growthlab(&["verify", "diagonal", "--format", "yaml"])), 3);
}

#[test]
fn verify_suite_table() {
    let o = growthlab(&["verify", "kappa", "--format", "table"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("LP value equals stabilized upper bound"), "{text}");
    assert!(text.starts_with("kappa (seed"));
}

#[test]
fn every_example_scenario_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = growthlab(&["run", path.to_str().unwrap()]);
        let expected = if path.file_name().unwrap() == "broken.json" { 3 } else { 0 };
        assert_eq!(code(&o), expected, "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn describe_lists_kinds_and_suites() {
    let o = growthlab(&["describe"]);
    assert_eq!(code(&o), 0);
    let d: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for kind in ["cantor", "density", "ad", "slalom", "kelley", "bell"] {
        assert!(d["checks"][kind].is_object(), "{kind}");
    }
    assert_eq!(d["suites"].as_array().unwrap().len(), 9);
}
