//! End-to-end tests of the `ncforge` binary: subcommands, exit codes, and
//! schema validation.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncforge"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("ncforge-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn run_passing_suite_exits_zero() {
    let cfg = write_temp("kxpm.json", r#"{"suite":"kxpm","n":2}"#);
    let out = bin().args(["run"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[pass] kxpm::kappa.alpha[1]"));
    assert!(text.contains("0 failed"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let cfg = write_temp("bad_suite.json", r#"{"suite":"nonsense"}"#);
    let out = bin().args(["run"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_quiver_is_rejected_with_a_path() {
    let quiver = write_temp(
        "dangling.json",
        r#"{"vertices":["1"],"arrows":[{"id":"a","src":"1","dst":"missing"}]}"#,
    );
    let out = bin().args(["normalize"]).arg(&quiver).arg("a").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing"), "error names the dangling vertex: {err}");
}

#[test]
fn normalize_reports_localized_normal_forms() {
    let out = bin()
        .args(["normalize"])
        .arg(fixture("a2.json"))
        .arg("Le**e**e")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "e(1) + -1*Le*");
}

#[test]
fn normalize_rejects_syntax_errors_with_position() {
    let out = bin()
        .args(["normalize"])
        .arg(fixture("a2.json"))
        .arg("e + * e")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "{err}");
    assert!(err.contains("column 5"), "{err}");
}

#[test]
fn fuse_prints_presentation_and_confluence() {
    let out = bin()
        .args(["fuse"])
        .arg(fixture("a2.json"))
        .args(["--pair", "1", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fused vertices: 1"));
    assert!(text.contains("all resolvable: true"));
}

#[test]
fn rep_subcommand_verifies_moment_identities() {
    let out = bin()
        .args(["rep"])
        .arg(fixture("loop.json"))
        .args(["--dims", "2", "--trials", "3", "--seed", "5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rep.moment_condition"));
}

#[test]
fn json_reports_are_identical_across_runs() {
    let cfg = write_temp("det.json", r#"{"suite":"rep-moment","quiver":"a2","dims":[[1,1]],"trials":4,"seed":3}"#);
    let run = || {
        let out = bin().args(["run"]).arg(&cfg).arg("--json").output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn bundled_structure_data_round_trips() {
    let quiver = write_temp(
        "loop_additive.json",
        r#"{
            "vertices": ["1"],
            "arrows": [{"id": "a", "src": "1", "dst": "1"}],
            "structure": {
                "kind": "additive",
                "omega": "d(a*)*d(a)",
                "moments": {"1": "a*a* - a**a"}
            }
        }"#,
    );
    let cfg = write_temp(
        "loop_additive_cfg.json",
        &format!(
            r#"{{"suite":"quiver-additive","quiver":{}}}"#,
            serde_json::to_string(quiver.to_str().unwrap()).unwrap()
        ),
    );
    let out = bin().args(["run"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("bisymplectic.moment[1]"));
    assert!(text.contains("0 failed"));
}

#[test]
fn starved_budgets_exit_undecided() {
    let cfg = write_temp(
        "starved.json",
        r#"{"suite":"a2","budgets":{"dr_depth":0,"dr_monomials":1}}"#,
    );
    let out = bin().args(["run"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "undecided-only runs exit 2");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("undecided"));
}
