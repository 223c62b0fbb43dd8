use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monalg")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = run(&["build", "--depth", "6", "--strategy", "prime", "--out", path(&a)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(a.join("build.log").exists());
    let o = run(&["build", "--depth", "7", "--strategy", "prime", "--out", path(&a)]);
    assert!(stdout(&o).contains("resumed from depth 6"));
    let o = run(&["build", "--depth", "7", "--strategy", "prime", "--out", path(&b)]);
    assert!(stdout(&o).contains("fresh build"));
    let read = |d: &Path| std::fs::read(d.join("state.monalg")).unwrap();
    assert_eq!(read(&a), read(&b));
    let o = run(&["build", "--depth", "0", "--out", path(&dir.path().join("c"))]);
    assert_eq!(code(&o), 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&run(&["build", "--f", "bogus", "--out", out])), 2);
    assert_eq!(code(&run(&["build", "--strategy", "nosuch", "--out", out])), 2);
    assert_eq!(code(&run(&["build", "--depth", "70", "--out", out])), 3);
    assert_eq!(code(&run(&["verify", "nosuch"])), 2);
    let st = dir.path().join("state.monalg");
    std::fs::write(&st, b"MONALG-STATE v1\n").unwrap();
    assert_eq!(code(&run(&["verify", "growth", "--state", path(&st), "--out", out])), 2);
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&run(&["build", "--depth", "8", "--strategy", "prime", "--out", out])), 0);
    let st = dir.path().join("state.monalg");
    let o = run(&["verify", "growth", "--state", path(&st), "--out", out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("growth bounds (horizon 8, config "));
    let first = std::fs::read(dir.path().join("report-growth.json")).unwrap();
    run(&["verify", "growth", "--state", path(&st), "--out", out]);
    assert_eq!(first, std::fs::read(dir.path().join("report-growth.json")).unwrap());
    let o = run(&["verify", "nonprime", "--state", path(&st), "--out", out]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL a occurs at most once"));
    let o = run(&["verify", "all", "--state", path(&st), "--out", out, "--max-len", "2", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("# all suites"));
    assert!(text.contains("f(2^n) <= dim(2^n)") && text.contains("every pair of nonzero words"));
    let o = run(&["verify", "locnil", "--strategy", "tilde", "--depth", "9", "--gens", "c", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn dims_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    let o = run(&["dims", "--depth", "4", "--from", "3", "--to", "2", "--out", out]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = run(&["dims", "--depth", "4", "--out", out]);
    let rows: Vec<Vec<String>> = stdout(&o).lines().skip(2).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 16);
    let o = run(&["verify", "growth", "--depth", "4", "--out", out, "--format", "json"]);
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for c in rep["claims"].as_array().unwrap() {
        if c["claim"] == "f(2^n) <= dim(2^n)" {
            let n = c["level"].as_u64().unwrap() as usize;
            assert_eq!(rows[(1 << n) - 1][1], c["rhs"].as_str().unwrap());
        }
    }
    let o = run(&["dump", "--depth", "3", "--level", "2"]);
    assert!(stdout(&o).contains("W aaaa,aaab,aaba,aabb"));
    assert_eq!(code(&run(&["dump", "--depth", "3", "--level", "4"])), 2);
}
