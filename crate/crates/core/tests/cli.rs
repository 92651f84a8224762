use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hyperwidth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperwidth")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn approx_writes_and_validates() {
    let dir = TempDir::new().unwrap();
    let hg = write(dir.path(), "p9.hg", &(1..9).map(|i| format!("{i} {}\n", i + 1)).collect::<String>());
    let out = dir.path().join("p9.td");
    let o = hyperwidth(&["approx", "--k", "1", "--mode", "ghw4", "--input", &hg, "--output", out.to_str().unwrap(), "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    let stats = String::from_utf8(o.stderr).unwrap();
    assert!(stats.starts_with("{invocations: ") && stats.contains(", depth: "), "{stats}");
    let td = fs::read_to_string(&out).unwrap();
    assert!(td.starts_with("s ghtd "));

    let o = hyperwidth(&["validate", "--hypergraph", &hg, "--decomposition", out.to_str().unwrap(), "--check-width", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("valid width "));
    let o = hyperwidth(&["validate", "--hypergraph", &hg, "--decomposition", out.to_str().unwrap(), "--check-width", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn approx_refuses_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let mut text = String::new();
    for u in 1..=4 {
        for v in 1..=4 {
            text.push_str(&format!("u{u} v{v}\n"));
        }
    }
    let hg = write(dir.path(), "k44.hg", &text);
    let o = hyperwidth(&["approx", "--k", "1", "--mode", "fhw", "--input", &hg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NO "));
}

#[test]
fn approx_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let hg = dir.path().join("g.hg");
    let o = hyperwidth(&["gen", "--n", "11", "--m", "9", "--rank", "3", "--seed", "42", "--output", hg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let runs: Vec<String> = (0..2)
        .map(|_| stdout(&hyperwidth(&["approx", "--k", "1", "--mode", "ghw6", "--input", hg.to_str().unwrap()])))
        .collect();
    assert_eq!(runs[0], runs[1]);
    let again = hyperwidth(&["gen", "--n", "11", "--m", "9", "--rank", "3", "--seed", "42"]);
    assert_eq!(stdout(&again), fs::read_to_string(&hg).unwrap());
}

#[test]
fn exact_and_cover() {
    let dir = TempDir::new().unwrap();
    let hg = write(dir.path(), "tri.hg", "ab: a b\nbc: b c\nca: c a\n");
    let o = hyperwidth(&["exact", "--mode", "ghw", "--input", &hg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("s ghtd 1 2/1 3 3\n"));
    let o = hyperwidth(&["exact", "--mode", "fhw", "--input", &hg]);
    assert!(stdout(&o).starts_with("s ghtd 1 3/2 3 3\n"));

    let o = hyperwidth(&["cover", "--input", &hg, "--set", "a,b,c"]);
    assert_eq!(stdout(&o), "2 ab bc\n");
    let o = hyperwidth(&["cover", "--input", &hg, "--set", "a,b,c", "--fractional"]);
    assert_eq!(stdout(&o), "3/2 ab=1/2 bc=1/2 ca=1/2\n");
    let o = hyperwidth(&["cover", "--input", &hg, "--set", "a,b,c", "--fractional", "--at-most", "3/2"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "true\n".to_string()));
    let o = hyperwidth(&["cover", "--input", &hg, "--set", "a,b,c", "--at-most", "1"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "false\n".to_string()));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.hg", "# nothing\n");
    assert_eq!(hyperwidth(&["approx", "--k", "1", "--mode", "ghw4", "--input", &empty]).status.code(), Some(2));
    let hg = write(dir.path(), "tri.hg", "a b\nb c\nc a\n");
    assert_eq!(hyperwidth(&["approx", "--k", "x", "--mode", "ghw4", "--input", &hg]).status.code(), Some(2));
    assert_eq!(hyperwidth(&["approx", "--k", "3/2", "--mode", "ghw4", "--input", &hg]).status.code(), Some(2));
    assert_eq!(hyperwidth(&["cover", "--input", &hg, "--set", "a,zz"]).status.code(), Some(2));
    assert_eq!(hyperwidth(&["gen", "--n", "1", "--m", "1", "--rank", "2", "--seed", "0"]).status.code(), Some(2));
    assert_eq!(hyperwidth(&["frobnicate"]).status.code(), Some(2));
    let missing = dir.path().join("nope.hg");
    assert_eq!(hyperwidth(&["exact", "--mode", "ghw", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_decomposition_exits_one() {
    let dir = TempDir::new().unwrap();
    let hg = write(dir.path(), "p3.hg", "1 2\n2 3\n");
    let td = write(dir.path(), "bad.td", "s ghtd 2 1/1 3 2\nb 1 1 2\nb 2 3\nt 1 2\n");
    let o = hyperwidth(&["validate", "--hypergraph", &hg, "--decomposition", &td]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("edge e2 is in no bag"));
}
