use std::fs;
use std::process::Command;

use essmin_cli::run;
use serde_json::Value;

fn essmin(args: &[&str]) -> essmin_cli::Outcome {
    run(std::iter::once("essmin").chain(args.iter().copied()))
}

fn report(args: &[&str]) -> Value {
    let out = essmin(args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let help = essmin(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("construct"));
    assert_eq!(essmin(&["--version"]).code, 0);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(essmin(&["criteria", "--mode", "b"]).code, 1);
    assert_eq!(essmin(&["criteria", "--g", "nonsense:1", "--mode", "b"]).code, 1);
    let missing = essmin(&["criteria", "--g", "power:1", "--mode", "sum"]);
    assert_eq!(missing.code, 1);
    assert!(missing.stderr.contains("--weights"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "# essmin sequence v1\npoint rho=0.5 phi=0\npoint rho=1.5 phi=0\n").unwrap();
    let out = essmin(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn convergent_bound_is_refused_with_exit_two() {
    let out = essmin(&["construct", "lemma61", "--g", "exp-log:2", "--depth", "8"]);
    assert_eq!(out.code, 2);
    let r: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r["status"], "refused");
    assert!(r["result"]["certificate"].as_str().is_some_and(|c| !c.is_empty()));
}

#[test]
fn criteria_modes() {
    let b = report(&["criteria", "--g", "exp-log:2", "--mode", "b"]);
    assert_eq!(b["result"]["report"]["verdict"], "holds");
    assert_eq!(b["schema"], "essmin-report/1");
    let sum = report(&["criteria", "--g", "power:1", "--mode", "sum", "--weights", "const:1"]);
    assert_eq!(sum["result"]["report"]["verdict"], "fails");
    let lim = report(&["criteria", "--g", "level:1,2,0,1", "--mode", "limsup", "--weights", "power:1,1"]);
    assert_eq!(lim["result"]["fast_path"]["agrees"], true);
    let single = report(&[
        "criteria", "--g", "level:1,2,0,1", "--mode", "limsup", "--weights", "power:1,1", "--C", "2", "--E", "1,4",
    ]);
    assert_eq!(single["parameters"]["E"], "1,4");
}

#[test]
fn construct_then_analyze_classify_verify() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    let out = essmin(&["construct", "lemma61", "--g", "level:1,1,1,0", "--depth", "10", "--out", run_dir.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let seq = run_dir.join("sequence.txt");
    let seq = seq.to_str().unwrap();

    let a = report(&["analyze", seq, "--g", "level:1,1,1,0"]);
    assert_eq!(a["result"]["coverage_bound"]["failures"], 0);
    assert!(a["result"]["separation"]["separated"].as_bool().unwrap());

    let c = report(&["classify", seq, "--weights", "const:1", "--class", "s"]);
    assert!(c["result"]["summary"].as_str().is_some());

    let measure = run_dir.join("measure.txt");
    let v = report(&["verify", "--sequence", seq, "--measure", measure.to_str().unwrap()]);
    assert_eq!(v["result"]["holds"], true);
    let halved = report(&["verify", "--sequence", seq, "--measure", measure.to_str().unwrap(), "--halve"]);
    assert_eq!(halved["result"]["holds"], false);
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = essmin(&["criteria", "--g", "power:2", "--mode", "b", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["command"], "criteria");
}

#[test]
fn ring_sequences_stay_symbolic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("rings");
    let out = essmin(&["construct", "rings", "--levels", "arithmetic:1,1", "--out", d.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = fs::read_to_string(d.join("sequence.txt")).unwrap();
    assert!(text.contains("rings kind=arithmetic"));
    let c = report(&["classify", d.join("sequence.txt").to_str().unwrap(), "--weights", "const:1", "--class", "L"]);
    assert_eq!(c["result"]["evidence"], "infinite ring family");
    assert_eq!(c["result"]["report"]["verdict"], "holds");
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_essmin");
    let ok = Command::new(bin).args(["criteria", "--g", "power:1", "--mode", "b"]).output().unwrap();
    assert!(ok.status.success());
    let r: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(r["result"]["report"]["verdict"], "fails");
    let refused = Command::new(bin).args(["construct", "lemma61", "--g", "exp-log:2"]).output().unwrap();
    assert_eq!(refused.status.code(), Some(2));
    let bad = Command::new(bin).args(["verify"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
