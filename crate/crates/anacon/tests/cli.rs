//! End-to-end exercises of the command-line interface: exit codes, result
//! files, reverse translation and option spellings.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anacon"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    all.push("--out");
    all.push(out);
    run(&all)
}

#[test]
fn conflicting_contract_exits_one_and_writes_both_results() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("airport_contract.txt");
    let output = run_in(dir.path(), &[input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("CONFLICT"), "{stdout}");
    let cl = std::fs::read_to_string(dir.path().join("Result_Cl.txt")).unwrap();
    assert!(cl.contains("% verdict CONFLICT"), "{cl}");
    let eng = std::fs::read_to_string(dir.path().join("Result_Eng.txt")).unwrap();
    assert!(eng.contains("% conflict"), "{eng}");
}

#[test]
fn conflict_free_contract_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("internet_provider.txt");
    let output = run_in(dir.path(), &[input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("NO CONFLICT"), "{stdout}");
    let cl = std::fs::read_to_string(dir.path().join("Result_Cl.txt")).unwrap();
    assert!(cl.contains("% verdict NO CONFLICT"), "{cl}");
    assert!(!dir.path().join("Result_Eng.txt").exists());
}

#[test]
fn validation_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("diag_undeclared_contract.txt");
    let output = run_in(dir.path(), &[input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("Undeclared"), "{stderr}");
}

#[test]
fn missing_input_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_file.txt");
    let output = run(&[missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn depth_bound_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("airport_contract.txt");
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "--max-depth", "0"]);
    assert_eq!(output.status.code(), Some(3));
    let cl = std::fs::read_to_string(dir.path().join("Result_Cl.txt")).unwrap();
    assert!(cl.contains("% verdict INCONCLUSIVE"), "{cl}");
}

#[test]
fn reverse_mode_translates_symbolic_to_english() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("formula.txt");
    std::fs::write(&input, "( O ( pay_a_fine ) )\n").unwrap();
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "--cl"]);
    assert_eq!(output.status.code(), Some(0));
    let eng = std::fs::read_to_string(dir.path().join("Result_Eng.txt")).unwrap();
    assert!(
        eng.contains("( It is mandatory to ( pay_a_fine ) )"),
        "{eng}"
    );
}

#[test]
fn reverse_mode_accepts_single_dash_cl() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("formula.txt");
    std::fs::write(&input, "( P ( pay ) )\n").unwrap();
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "-cl"]);
    assert_eq!(output.status.code(), Some(0));
    let eng = std::fs::read_to_string(dir.path().join("Result_Eng.txt")).unwrap();
    assert!(eng.contains("( It is permitted to ( pay ) )"), "{eng}");
}

#[test]
fn reverse_mode_on_empty_file_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    std::fs::write(&input, "").unwrap();
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "--cl"]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn reverse_output_parses_back_to_the_same_formula() {
    use anacon::english::parse_re;
    use anacon::syntax::parse_cl;

    let formula = "( [ 1 * ] ( [ ( opening_the_desk_with_the_passenger_manifest ) ] \
                   ( O ( reply_to_the_passenger_manifest_request ) _ ( O ( pay_a_fine ) ) ) ) )";
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("formula.txt");
    std::fs::write(&input, format!("{formula}\n")).unwrap();
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "--cl"]);
    assert_eq!(output.status.code(), Some(0));
    let eng = std::fs::read_to_string(dir.path().join("Result_Eng.txt")).unwrap();
    let line = eng.lines().next().unwrap();
    assert!(line.contains("( Always )"), "{line}");
    assert_eq!(parse_re(line).unwrap(), parse_cl(formula).unwrap());
}

#[test]
fn xml_flag_writes_contract_xml() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("internet_provider.txt");
    let output = run_in(dir.path(), &[input.to_str().unwrap(), "--xml"]);
    assert_eq!(output.status.code(), Some(0));
    let xml = std::fs::read_to_string(dir.path().join("contract.xml")).unwrap();
    assert!(xml.starts_with("<contract>"), "{xml}");
    assert!(xml.contains("<prohibition>"), "{xml}");
}
