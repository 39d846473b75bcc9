use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn bvinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvinf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn demo_passes_and_reports_t2_t2() {
    let o = bvinf(&["demo-a1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        rep["values"]["pairing-compatibility:A1->B/(1*t^2,1*t^2)"],
        "(-1)*h^2*1"
    );
}

#[test]
fn demo_is_deterministic() {
    assert_eq!(bvinf(&["demo-a1"]).stdout, bvinf(&["demo-a1"]).stdout);
}

#[test]
fn mutated_a1_fails_with_koszul_witness() {
    let o = bvinf(&["check-bv", &fixture("a1_mutated.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("[FAIL] koszul condition n=3"), "{out}");
    assert!(out.contains("witness: K_3("), "{out}");
}

#[test]
fn fixtures_check_out() {
    for args in [
        vec!["check-bv", &fixture("a1.toml")],
        vec!["check-morphism", &fixture("a1_to_b.toml"), "--n-poly", "8"],
        vec!["twist", &fixture("a1.toml"), &fixture("gamma_a1_ut.json"), "--n-poly", "8"],
        vec!["pairing", &fixture("pairing_a1.toml")],
    ] {
        let args: Vec<&str> = args.iter().map(|s| s.as_ref()).collect();
        let o = bvinf(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn solve_mc_on_a2() {
    let dir = std::env::temp_dir().join(format!("bvinf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("mc.json");
    let o = bvinf(&["solve-mc", &fixture("a2.toml"), "--n-param", "4", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("gamma = 1*u2*t + 1*u1*1"));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["truncation"]["n_param"], 4);
    assert_eq!(rep["values"]["gamma"], "1*u2*t + 1*u1*1");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_input_exits_2() {
    let dir = std::env::temp_dir().join(format!("bvinf-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "name = \"X\"\nm = 1\noperator = { components = [\"t *\"] }\n").unwrap();
    let o = bvinf(&["check-bv", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(bvinf(&["check-bv", dir.join("missing.toml").to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
