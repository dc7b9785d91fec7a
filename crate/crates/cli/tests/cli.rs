use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grover_netlogic::report::RunReport;
use grover_netlogic::satcore::verify_params;
use grover_netlogic::{ConstraintSet, ParamBitstring};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grover-netlogic"));
    cmd.env_remove("GROVER_NETLOGIC_MAX_QUBITS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const XOR: &str = r#"{"variables": ["a", "b"], "target": "a", "samples": [
  {"input": [0, 0], "output": 0}, {"input": [1, 1], "output": 0},
  {"input": [0, 1], "output": 1}, {"input": [1, 0], "output": 1}]}"#;

#[test]
fn generate_full_table_reports_t() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ft.json");
    let o = run(&[
        "generate",
        "--model",
        "cortex",
        "--target",
        "Fgf8",
        "--mode",
        "full-table",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("t = 4"));
    assert_eq!(ConstraintSet::load(&out).unwrap().len(), 32);
}

#[test]
fn generate_random_states_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["generate", "--count", "8", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let c = ConstraintSet::load(&out).unwrap();
    let mut inputs: Vec<u32> = c.samples().iter().map(|s| s.input.mask()).collect();
    inputs.sort();
    inputs.dedup();
    assert_eq!(inputs.len(), 8);
}

#[test]
fn generate_over_capacity_exits_4() {
    let o = run(&["generate", "--count", "40", "--mode", "random-states"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn generate_bad_flag_exits_2() {
    assert_eq!(run(&["generate", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--target", "Wnt"]).status.code(), Some(2));
}

#[test]
fn enumerate_schema_and_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let ft = dir.path().join("ft.json");
    run(&["generate", "--mode", "full-table", "--out", ft.to_str().unwrap()]);
    let o = run(&["enumerate", ft.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["t"], 4);
    assert_eq!(doc["solutions"].as_array().unwrap().len(), 4);
    assert_eq!(doc["expressions"][0]["expr"], "Fgf8 ∧ ¬Emx2 ∧ Sp8");
    assert_eq!(doc["expressions"][0]["class_size"], 4);

    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"variables": ["Fgf8", "Emx2", "Pax6", "Sp8", "COUP-TFI"], "target": "Fgf8", "samples": []}"#,
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&run(&["enumerate", &empty]))).unwrap();
    assert_eq!(doc["t"], 1024);

    let xor = write(dir.path(), "xor.json", XOR);
    let o = run(&["enumerate", &xor]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"t\": 0"));

    let contradiction = write(
        dir.path(),
        "bad.json",
        r#"{"variables": ["a"], "target": "a", "samples": [{"input": [1], "output": 1}, {"input": [1], "output": 0}]}"#,
    );
    let o = run(&["enumerate", &contradiction]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sample #"), "{}", stderr(&o));

    let malformed = write(dir.path(), "m.json", "{\"variables\": [\"a\"],\n  \"target\": 3}");
    let o = run(&["enumerate", &malformed]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
}

#[test]
fn solve_sixteen_constraint_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("h.csv");
    let input = fixture("fgf8_j16_t4.json");
    let o = run(&["solve", &input, "--out", report.to_str().unwrap(), "--plot", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("t = 4, m = 12"));
    let text = std::fs::read_to_string(&report).unwrap();
    let r = RunReport::from_json_str(&text).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert!(r.rows.iter().all(|row| row.expression == "Fgf8 ∧ ¬Emx2 ∧ Sp8" && row.correct));
    assert_eq!(r.rerank().to_json_pretty(), text);
    let csv = std::fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("bitstring,count,probability,is_solution\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn solve_with_noise_flags_incorrect_rows() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let svg = dir.path().join("h.svg");
    let input = fixture("fgf8_j8_t51.json");
    let o = run(&[
        "solve",
        &input,
        "--noise-p",
        "0.002",
        "--shots",
        "3000",
        "--seed",
        "5",
        "--out",
        report.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = RunReport::from_json_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.rows.iter().any(|row| !row.correct));
    let c = ConstraintSet::load(Path::new(&input)).unwrap();
    for row in &r.rows {
        let b: ParamBitstring = row.bitstring.parse().unwrap();
        assert_eq!(row.correct, verify_params(&b.decode(), &c).unwrap());
    }
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn solve_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let xor = write(dir.path(), "xor.json", XOR);
    let o = run(&["solve", &xor]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unsatisfiable"));

    let o = run(&["solve", &fixture("fgf8_j16_t4.json"), "--oracle", "handcrafted"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("predicate"));

    let o = bin()
        .args(["solve", &fixture("fgf8_j8_t51.json"), "--shots", "10"])
        .env("GROVER_NETLOGIC_MAX_QUBITS", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));

    assert_eq!(run(&["solve", &xor, "--iterations", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", &xor, "--plot", "h.png"]).status.code(), Some(2));
    assert_eq!(run(&["solve", &xor, "--noise-p", "1.5"]).status.code(), Some(2));
}

#[test]
fn decode_examples() {
    let cortex = "Fgf8,Emx2,Pax6,Sp8,COUP-TFI";
    let o = run(&["decode", "1011001000", "--variables", cortex]);
    assert_eq!(stdout(&o).trim(), "Fgf8 ∧ ¬Emx2 ∧ Sp8");
    assert!(stderr(&o).is_empty());

    let o = run(&["decode", "0000000000"]);
    assert_eq!(stdout(&o).trim(), "TRUE");

    let o = run(&["decode", "1011011000", "--variables", cortex]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("Fgf8 ∧ ¬Emx2 ∧ Sp8\n"));
    assert!(stdout(&o).contains("1011001000"));
    assert!(stderr(&o).contains("warning"));

    assert_eq!(run(&["decode", "10110"]).status.code(), Some(2));
    assert_eq!(run(&["decode", "10a1"]).status.code(), Some(2));
    assert_eq!(run(&["decode", "1011", "--variables", "a,b,c"]).status.code(), Some(2));
}
