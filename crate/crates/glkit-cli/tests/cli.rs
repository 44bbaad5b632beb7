use std::path::PathBuf;
use std::process::{Command, Output};

fn verify(args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_verify"));
    cmd.args(args).env_remove("GLKIT_CONFIG");
    if let Some(c) = config {
        cmd.env("GLKIT_CONFIG", c);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("glkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exponent_table_csv() {
    let o = verify(&["exponents", "--nmax", "10"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0], "n,delta,delta_sharp");
    assert_eq!(lines[2], "3,1/186,1/279");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(verify(&["hecke", "--j", "3"], None).status.code(), Some(2));
    assert_eq!(verify(&["hecke", "--p", "4"], None).status.code(), Some(2));
    assert_eq!(verify(&["hecke", "--pair", "gl4-gl3"], None).status.code(), Some(2));
    assert_eq!(verify(&["nonsense"], None).status.code(), Some(2));
    assert_eq!(verify(&["exponents", "--format", "yaml"], None).status.code(), Some(2));
    let bad = scratch("bad.toml");
    std::fs::write(&bad, "sede = 1\n").unwrap();
    assert_eq!(verify(&["exponents"], Some(bad.to_str().unwrap())).status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "format = \"json\"\n[exponents]\nnmax = 3\n").unwrap();
    let from_config = verify(&["exponents"], Some(cfg.to_str().unwrap()));
    let v: serde_json::Value = serde_json::from_str(&stdout(&from_config)).unwrap();
    assert_eq!(v["params"]["nmax"], "3");
    assert_eq!(v["schema"], "glkit-report/1");
    let overridden = verify(&["exponents", "--nmax", "5", "--format", "csv"], Some(cfg.to_str().unwrap()));
    assert_eq!(stdout(&overridden).lines().count(), 6);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["tau", "--cases", "20", "--nmax", "4", "--seed", "11", "--no-timing"];
    let a = verify(&args, None);
    let b = verify(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let timed = verify(&["tau", "--cases", "5", "--format", "json"], None);
    assert!(stdout(&timed).contains("runtime_ms"));
}

#[test]
fn soft_tolerance_and_strict_mode() {
    let base = ["hecke", "--p", "3", "--bound", "13", "--ratio-bound", "1.5", "--format", "json"];
    let warned = verify(&base, None);
    assert_eq!(warned.status.code(), Some(0));
    assert!(stdout(&warned).contains("\"warn\""));
    let mut strict = base.to_vec();
    strict.push("--strict-soft");
    assert_eq!(verify(&strict, None).status.code(), Some(1));
}

#[test]
fn budget_marker_and_merge() {
    let slow = verify(&["eisenstein", "--T", "256", "--budget-secs", "0.05", "--format", "json"], None);
    assert_eq!(slow.status.code(), Some(1));
    assert!(stdout(&slow).contains("budget-exceeded"));

    let a = scratch("exp.json");
    let b = scratch("tau.json");
    assert_eq!(verify(&["exponents", "--format", "json", "-o", a.to_str().unwrap()], None).status.code(), Some(0));
    assert_eq!(verify(&["tau", "--cases", "5", "--format", "json", "-o", b.to_str().unwrap()], None).status.code(), Some(0));
    let merged = verify(&["report", "--merge", b.to_str().unwrap(), a.to_str().unwrap()], None);
    assert_eq!(merged.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&merged)).unwrap();
    assert_eq!(v["reports"][0]["suite"], "exponents");
    assert_eq!(v["reports"][1]["suite"], "tau");
    assert_eq!(v["summary"]["verdict"], "pass");
}
