//! End-to-end tests of the `koszul` binary: subcommands, formats, config
//! precedence, and exit codes (0 success, 1 verification failure, 2 usage).

use std::process::Command;

fn koszul() -> Command {
    Command::new(env!("CARGO_BIN_EXE_koszul"))
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = koszul().args(args).output().expect("spawn koszul");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn critical_n4_lists_the_three_classes() {
    let (stdout, _, code) = run(&["critical", "--n", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("dim 3"), "{stdout}");
    for class in ["v0^3 y1", "v4 R23 R7 y1", "v4 R21 R9 y1"] {
        assert!(stdout.contains(class), "missing {class} in {stdout}");
    }
}

#[test]
fn adem_subcommand_matches_worked_identities() {
    let (stdout, _, code) = run(&["adem", "--side", "R", "--word", "8,5"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "R9 R4");
    let (stdout, _, _) = run(&["adem", "--side", "R", "--word", "9,5"]);
    assert_eq!(stdout.trim(), "0");
    let (stdout, _, _) = run(&["adem", "--side", "Q", "--word", "9,4"]);
    assert_eq!(stdout.trim(), "0");
    let (stdout, _, _) = run(&["adem", "--side", "Q", "--word", "22,6"]);
    assert_eq!(stdout.trim(), "Q13 Q15 + Q14 Q14 + Q15 Q13 + Q17 Q11");
}

#[test]
fn verify_bigrelation_reports_ok() {
    let (stdout, _, code) = run(&["verify-bigrelation"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("OK residual=0"), "{stdout}");
}

#[test]
fn qeval_normalizes_expressions() {
    let (stdout, _, code) = run(&[
        "qeval",
        "--expr",
        "Q22(Q6(x))",
        "--gen-degree",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(Q13(x))^2 + Q17(Q11(x))"), "{stdout}");
    assert!(stdout.contains("degree: 30"), "{stdout}");
}

#[test]
fn usage_errors_exit_2() {
    let (_, _, code) = run(&["no-such-subcommand"]);
    assert_eq!(code, 2);
    let (_, _, code) = run(&["basis", "--format", "yaml"]);
    assert_eq!(code, 2);
    let (_, stderr, code) = run(&["basis", "--module", "/nonexistent/file.json"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn stability_mismatch_exits_1() {
    let (stdout, _, code) = run(&[
        "stability",
        "--n-lo",
        "-1",
        "--n-hi",
        "0",
        "--x-min",
        "-12",
        "--x-max",
        "-2",
        "--s-max",
        "3",
    ]);
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("MISMATCH"), "{stdout}");
    let (stdout, _, code) = run(&[
        "stability",
        "--n-lo",
        "2",
        "--n-hi",
        "3",
        "--x-min",
        "-20",
        "--x-max",
        "-2",
        "--s-max",
        "4",
        "--weight-max",
        "2",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("equal everywhere"), "{stdout}");
}

#[test]
fn chart_json_is_deterministic_and_valid() {
    let args = [
        "chart", "--mode", "basis", "--n", "-1", "--x-min", "-16", "--x-max", "-2", "--s-max",
        "2", "--format", "json",
    ];
    let (a, _, code) = run(&args);
    assert_eq!(code, 0);
    let (b, _, _) = run(&args);
    assert_eq!(a, b, "chart JSON must be bit-exact across runs");
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["chart-format"], 1);
    let labels: Vec<&str> = doc["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert!(labels.contains(&"R8 R4 y1"));
    assert!(labels.contains(&"R9 R4 y1"));
    // d1 arrow from (-6, 0) to (-7, 1)
    let classes = doc["classes"].as_array().unwrap();
    let find = |id: &str| {
        classes
            .iter()
            .find(|c| c["id"] == id)
            .unwrap_or_else(|| panic!("class {id}"))
    };
    let has_arrow = doc["differentials"].as_array().unwrap().iter().any(|d| {
        let from = find(d["from"].as_str().unwrap());
        let to = find(d["to"].as_str().unwrap());
        (from["x"].as_i64(), from["s"].as_i64(), to["x"].as_i64(), to["s"].as_i64())
            == (Some(-6), Some(0), Some(-7), Some(1))
    });
    assert!(has_arrow, "missing the d1 arrow out of y2");
}

#[test]
fn chart_svg_renders() {
    let dir = std::env::temp_dir().join("koszul-cli-test-svg");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chart.svg");
    let (_, _, code) = run(&[
        "chart", "--mode", "cohomology", "--n", "1", "--x-min", "-12", "--x-max", "-2",
        "--s-max", "3", "--format", "svg", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("R7 y1"));
}

#[test]
fn module_files_and_config_precedence() {
    let dir = std::env::temp_dir().join("koszul-cli-test-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let module_path = dir.join("two-cell.json");
    std::fs::write(
        &module_path,
        r##"{
            "format": 1,
            "name": "two-cell",
            "generators": [{"id": "y1", "degree": -2}, {"id": "y2", "degree": -6}],
            "differential": {"y2": [{"R": 5, "gen": "y1"}]}
        }"##,
    )
    .unwrap();
    let (stdout, _, code) = run(&[
        "cohomology",
        "--module",
        module_path.to_str().unwrap(),
        "--n",
        "-1",
        "--x-min",
        "-10",
        "--x-max",
        "-2",
        "--s-max",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("R7 y1"), "{stdout}");
    assert!(!stdout.contains("(-7, 1)"), "R5 y1 must die: {stdout}");

    // config supplies the window; a flag overrides one bound
    let config_path = dir.join("config.json");
    std::fs::write(
        &config_path,
        r##"{"n": -1, "x_min": -8, "x_max": -2, "s_max": 1}"##,
    )
    .unwrap();
    let (stdout, _, code) = run(&[
        "basis",
        "--config",
        config_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(-8, 1): R6 y1"), "{stdout}");
    assert!(!stdout.contains("(-9"), "{stdout}");
    let (stdout, _, _) = run(&[
        "basis",
        "--config",
        config_path.to_str().unwrap(),
        "--x-min",
        "-9",
    ]);
    assert!(stdout.contains("(-9, 1): R7 y1"), "flag must override config: {stdout}");

    // invalid module document: bidegree-law violation
    let bad_path = dir.join("bad.json");
    std::fs::write(
        &bad_path,
        r##"{
            "format": 1,
            "name": "bad",
            "generators": [{"id": "y1", "degree": -2}, {"id": "y2", "degree": -6}],
            "differential": {"y2": [{"R": 4, "gen": "y1"}]}
        }"##,
    )
    .unwrap();
    let (_, stderr, code) = run(&[
        "basis",
        "--module",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bidegree law"), "{stderr}");
}

#[test]
fn bockstein_subcommand_shows_first_differential() {
    let (stdout, _, code) = run(&[
        "bockstein-d1",
        "--n",
        "0",
        "--x-min",
        "-20",
        "--x-max",
        "-2",
        "--s-max",
        "4",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("d1[R6 y1] = v0 [R7 y1]"), "{stdout}");
}

#[test]
fn selftest_passes_end_to_end() {
    let (stdout, _, code) = run(&["selftest"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("15/15 checks passed"), "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}
