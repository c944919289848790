use std::path::PathBuf;
use std::process::{Command, Output};

fn microlax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microlax"))
        .args(args)
        .env_remove("MICROLAX_CAP")
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    root.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn every_scenario_file_passes() {
    for name in ["kdv.toml", "kdv-pair.toml", "fano.toml", "ruled.toml", "normalize.toml", "elimination.toml", "property-suite.toml"] {
        let out = microlax(&["run", &scenario(name)]);
        assert!(out.status.success(), "{name}:\n{}", stdout(&out));
        assert!(stdout(&out).ends_with("verdict PASS\n"));
    }
}

#[test]
fn kdv_prints_right_hand_side() {
    let out = microlax(&["kdv", "--r", "2", "--j", "3", "--torder", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("value rhs.u0 [")));
    assert!(text.contains("check kdv-equation PASS"));
}

#[test]
fn reports_are_byte_identical() {
    let a = microlax(&["run", &scenario("normalize.toml")]);
    let b = microlax(&["run", &scenario("normalize.toml")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn normalize_prints_fano_recipe() {
    let out = microlax(&["normalize", "--policy", "previous-entry", "--degrees", "2,3,3,3,4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("value recipe D5 = +L(1,4,-1) +L(4,5,-1)\n"));
}

#[test]
fn eliminate_and_check() {
    assert!(microlax(&["eliminate", "--dims", "2,1", "--seed", "3"]).status.success());
    assert!(microlax(&["check", "--suite", "recipes"]).status.success());
}

#[test]
fn exit_status_reflects_verdict() {
    let out = microlax(&["normalize"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("error normalize "));
    assert!(stdout(&out).ends_with("verdict FAIL\n"));
    assert_eq!(microlax(&["normalize", "--degrees", "3,1"]).status.code(), Some(2));
    assert_eq!(microlax(&["check", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn cap_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_microlax"))
        .args(["kdv", "--torder", "1"])
        .env("MICROLAX_CAP", "3")
        .output()
        .unwrap();
    assert!(stdout(&out).contains("series=3 "));
}

#[test]
fn report_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("microlax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ruled.txt");
    let out = microlax(&["run", &scenario("ruled.toml"), "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}
