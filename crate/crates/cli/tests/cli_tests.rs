//! End-to-end checks of the binary: output shapes, exit codes, and the
//! environment hooks, driven through the compiled executable.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gaplab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaplab"));
    cmd.env_remove("GAPLAB_DEFAULT_BITS");
    cmd
}

fn run(args: &[&str]) -> Output {
    gaplab().args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn approx(v: &Value) -> f64 {
    v["real"].as_str().expect("approximate scalar").parse().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn cosine_gaps_match_reference_values() {
    let out = run(&["gaps", "--fn", "cosine", "--alpha", "1/4", "--N", "3"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    let gaps: Vec<f64> = v["gap_set"].as_array().unwrap().iter().map(approx).collect();
    let expected = [0.09132985982, 0.14589369301, 1.76277644716];
    assert_eq!(gaps.len(), 3);
    for (g, e) in gaps.iter().zip(expected) {
        assert!((g - e).abs() < 1e-9, "{g} vs {e}");
    }
}

#[test]
fn sawtooth_gaps_are_exact_rationals() {
    let out = run(&["gaps", "--fn", "sawtooth", "--alpha", "1/4", "--N", "3"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["ctx"]["precision_bits"], 256);
    assert_eq!(v["gap_set"][0]["rational"], "1/4");
    assert_eq!(v["gap_set"][1]["rational"], "1/2");
    assert_eq!(v["gaps"][0]["kind"], "interior");
    assert_eq!(v["gaps"][0]["piece"], 1);
}

fn write_two_branch(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("two_branch.json");
    let doc = r#"{
        "period": {"rational": "1"},
        "pieces": [
            {"left": {"rational": "0"}, "right": {"rational": "3/4"},
             "slope": {"rational": "1"}, "intercept": {"rational": "1"},
             "right_closed": false},
            {"left": {"rational": "3/4"}, "right": {"rational": "1"},
             "slope": {"rational": "1"}, "intercept": {"rational": "-1/2"},
             "right_closed": false}
        ]
    }"#;
    std::fs::write(&path, doc).unwrap();
    path
}

#[test]
fn function_files_load_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_two_branch(dir.path());
    let spec = format!("@{}", path.display());
    let out = run(&["gaps", "--fn", &spec, "--alpha", "pi/16", "--N", "7"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["gap_set"].as_array().unwrap().len(), 4);
    let kinds: Vec<&str> = v["gaps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"non_interior"));
    assert_eq!(*kinds.last().unwrap(), "extremal");
}

#[test]
fn bad_function_files_are_usage_or_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = format!("@{}", dir.path().join("nope.json").display());
    assert_eq!(code(&run(&["gaps", "--fn", &missing, "--alpha", "1/4", "--N", "3"])), 2);

    let path = dir.path().join("gap.json");
    std::fs::write(
        &path,
        r#"{"period": {"rational": "1"}, "pieces": [
            {"left": {"rational": "0"}, "right": {"rational": "1/2"},
             "slope": {"rational": "1"}, "intercept": {"rational": "0"},
             "right_closed": false}
        ]}"#,
    )
    .unwrap();
    let spec = format!("@{}", path.display());
    assert_eq!(code(&run(&["gaps", "--fn", &spec, "--alpha", "1/4", "--N", "3"])), 3);
}

#[test]
fn three_gap_verification_passes_at_scale() {
    let out = run(&["verify", "three_gap", "--alpha", "sqrt2", "--N", "5000"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["pass"], true);
    assert!(v["observed"].as_u64().unwrap() <= 3);
}

#[test]
fn main_construction_verification_reports_parameters() {
    let out = run(&["verify", "main_construction", "--n", "10"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["params"]["N"], 24);
    assert_eq!(v["params"]["epsilon"]["rational"], "1/21");
    assert_eq!(v["params"]["ladder_included"], true);
}

#[test]
fn violated_preconditions_exit_three() {
    let out = run(&[
        "verify",
        "five_distance",
        "--alpha",
        "sqrt2",
        "--beta",
        "0",
        "--N",
        "10",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn usage_problems_exit_two() {
    assert_eq!(code(&run(&["construct", "main", "--n", "0"])), 2);
    assert_eq!(code(&run(&["verify", "nonsense", "--N", "5"])), 2);
    assert_eq!(
        code(&run(&["gaps", "--fn", "parabola", "--alpha", "1/4", "--N", "3"])),
        2
    );
}

#[test]
fn construct_main_prints_the_instance() {
    let out = run(&["construct", "main", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["N"], 10);
    assert_eq!(v["epsilon"]["rational"], "1/7");
    assert_eq!(v["alpha"]["rational"], "1/10");
    let ladder = v["ladder"].as_array().unwrap();
    assert_eq!(ladder.len(), 4);
    assert_eq!(ladder[0]["rational"], "1/70");
    assert_eq!(v["report"]["pass"], true);
}

#[test]
fn construct_c2_finds_the_cosine_step() {
    let out = run(&["construct", "c2", "--fn", "cosine", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    let alpha = approx(&v["witness"]["alpha"]);
    assert!((alpha - std::f64::consts::PI / 6.0).abs() < 1e-9);
    assert_eq!(v["report"]["pass"], true);
}

#[test]
fn construct_c2_rejects_a_flat_start() {
    let out = run(&["construct", "c2", "--fn", "shifted_cosine(pi/2)", "--n", "2"]);
    assert_eq!(code(&out), 3);
    let out = run(&["construct", "c2", "--fn", "sawtooth", "--n", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweeps_are_reproducible() {
    let args = ["sweep", "three_gap", "--draws", "25", "--seed", "9"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let v = json_stdout(&first);
    assert_eq!(v["summary"]["all_pass"], true);
    assert_eq!(v["summary"]["draws"], 25);
}

#[test]
fn csv_output_lands_in_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gaps.csv");
    let out = run(&[
        "gaps",
        "--fn",
        "sawtooth",
        "--alpha",
        "1/4",
        "--N",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("d_range,lower,upper,length,kind\n"));
    assert!(text.contains("1-2,1/4,1/2,1/4,interior(1)"));
}

#[test]
fn default_bits_come_from_the_environment() {
    let out = gaplab()
        .env("GAPLAB_DEFAULT_BITS", "96")
        .args(["gaps", "--fn", "cosine", "--alpha", "1/4", "--N", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json_stdout(&out)["ctx"]["precision_bits"], 96);

    let out = gaplab()
        .env("GAPLAB_DEFAULT_BITS", "lots")
        .args(["gaps", "--fn", "cosine", "--alpha", "1/4", "--N", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn exact_mode_keeps_decimals_rational() {
    let out = run(&[
        "gaps", "--fn", "sawtooth", "--alpha", "0.25", "--mode", "exact", "--N", "3",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["gap_set"][0]["rational"], "1/4");

    let out = run(&[
        "gaps", "--fn", "sawtooth", "--alpha", "pi", "--mode", "exact", "--N", "3",
    ]);
    assert_eq!(code(&out), 2);
}
