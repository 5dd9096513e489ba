use std::path::PathBuf;
use std::process::{Command, Output};

use sofic_dyck::fixtures::{self, RandomSpec};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sofic-dyck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit status")
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sofic-dyck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_temp(name: &str, text: &str) -> String {
    let p = temp(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_fixture() {
    let o = run(&["validate", "@fix-ex1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("valid: 2 states"));
}

#[test]
fn validate_rejects_bad_files() {
    let typing = write_temp(
        "typing.json",
        r#"{"alphabet":{"call":["a"],"return":["b"],"internal":[]},"states":["1"],
            "edges":[{"from":"1","label":"a","to":"1"},{"from":"1","label":"b","to":"1"}],
            "matched":[[1,0]]}"#,
    );
    let missing = write_temp(
        "missing.json",
        r#"{"alphabet":{"call":["a"],"return":["b"],"internal":[]},"states":["1"],
            "edges":[{"from":"1","label":"a","to":"2"}],"matched":[]}"#,
    );
    let broken = write_temp("broken.json", "{\"alphabet\": ");
    for f in [&typing, &missing, &broken] {
        let o = run(&["validate", f]);
        assert_eq!(code(&o), 1, "{f}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["validate", &broken]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn zeta_cross_check() {
    let o = run(&["zeta", "@fix-ex1", "--order", "6", "--cross-check"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("p_n: 5 13 53 169 605 1981"), "{out}");
    assert!(out.contains("zeta_CMc*"));
    let o = run(&["zeta", "@fix-nd", "--order", "5", "--cross-check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn no_reduce_matches_on_ex1() {
    let series_line = |args: &[&str]| stdout(&run(args)).lines().nth(1).unwrap().to_string();
    assert_eq!(
        series_line(&["zeta", "@fix-ex1", "--order", "8"]),
        series_line(&["zeta", "@fix-ex1", "--order", "8", "--no-reduce"])
    );
}

#[test]
fn mismatch_exit_status() {
    // FIX-LR is not deterministic enough to skip reduction
    let o = run(&["zeta", "@fix-lr", "--order", "4", "--no-reduce", "--cross-check"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn resource_guard_exit_status() {
    let big = write_temp("big.json", &fixtures::random_automaton(2, &RandomSpec::default()).to_json());
    let o = run(&["zeta", &big, "--order", "3"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn periodic_tables() {
    let o = run(&["periodic", "@fix-d2", "--max-n", "3", "--method", "both"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Vec<String>> =
        stdout(&o).lines().skip(2).map(|l| l.split_whitespace().map(String::from).collect()).collect();
    assert_eq!(rows, [["1", "4", "4"], ["2", "12", "12"], ["3", "40", "40"]]);

    let o = run(&["periodic", "@fix-d2", "--max-n", "0", "--method", "both"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(&["--format", "json", "periodic", "@fix-motz", "--max-n", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let p: Vec<u64> = serde_json::from_value(v["results"]["oracle"].clone()).unwrap();
    assert!(p[0] > 0 && p.windows(2).all(|w| w[0] < w[1]), "{p:?}");
}

#[test]
fn reduce_writes_automaton_and_sidecar() {
    let out = temp("lr-left.json");
    let out_s = out.to_string_lossy().into_owned();
    let o = run(&["reduce", "@fix-lr", "--side", "left", "-o", &out_s]);
    assert_eq!(code(&o), 0);
    let reduced = sofic_dyck::DyckAutomaton::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // includes (∅, {2,3}), reached from the initial state by the unmatched return b
    assert_eq!(reduced.num_states(), 8);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out_s}.states.json")).unwrap()).unwrap();
    assert_eq!(sidecar.as_array().unwrap().len(), 8);
    let o = run(&["validate", &out_s]);
    assert_eq!(code(&o), 0);
}

#[test]
fn word_queries() {
    let o = run(&["rel", "@fix-ex1", "--word", "a b"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("(1,1)"));
    let o = run(&["admissible", "@fix-ex1", "--word", "a b'"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("not admissible"));
    let o = run(&["rel", "@fix-ex1", "--word", "q"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn nonempty_search() {
    let o = run(&["nonempty", "@fix-ex1", "--bound", "1"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("witness: a"));
    let dead = write_temp(
        "dead.json",
        r#"{"alphabet":{"call":["a"],"return":["b"],"internal":[]},"states":["1","2"],
            "edges":[{"from":"1","label":"a","to":"2"}],"matched":[]}"#,
    );
    let o = run(&["nonempty", &dead, "--bound", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("no witness up to 3"));
}

#[test]
fn constructions_round_trip() {
    let vpa = temp("ex1.vpa.json");
    let o = run(&["vpa", "@fix-ex1", "-o", &vpa.to_string_lossy()]);
    assert_eq!(code(&o), 0);
    let file = sofic_dyck::constructions::VpaFile::from_json(&std::fs::read_to_string(&vpa).unwrap()).unwrap();
    assert_eq!(file.resolve().unwrap(), sofic_dyck::constructions::to_vpa(&fixtures::ex1()));

    let o = run(&["from-grammar", "@sample-grammar"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let ftd = write_temp(
        "d2.ftd.json",
        r#"{"alphabet":{"call":["a"],"return":["b"],"internal":[]},"m":1,"n":1,
            "forbidden":[],"unmatchable":[]}"#,
    );
    let out = temp("d2.ftd.out.json");
    let o = run(&["ftd", &ftd, "-o", &out.to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = sofic_dyck::DyckAutomaton::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(sofic_dyck::oracle::periodic_count(&a, 2).unwrap(), 4);
}

#[test]
fn json_report_has_digest() {
    let o = run(&["--format", "json", "zeta", "@fix-d2", "--order", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], 0);
    assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["results"]["zeta"]["periodic"], serde_json::json!(["4", "12", "40"]));
    let again: serde_json::Value = serde_json::from_slice(&run(&["--format", "json", "zeta", "@fix-d2", "--order", "3"]).stdout).unwrap();
    assert_eq!(v, again);
}
