use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn yamabe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yamabe")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|rest| rest.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    for args in [
        &["ground-state", "0", "2"][..],
        &["ground-state", "1", "1"],
        &["table", "--max-dim", "3"],
        &["periodic", "2", "1"],
        &["periodic", "4", "-1"],
        &["bound", "2", "2", "/definitely/not/here.dat"],
    ] {
        let o = yamabe(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn malformed_profile_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dat");
    fs::write(&path, "0 1\n1 0.5\n0.5 0\n").unwrap();
    let o = yamabe(&["bound", "2", "2", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn table_has_the_reference_rows() {
    let o = yamabe(&["table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 21);
    assert!(rows[1].starts_with("2,3,") && rows[1].contains("3.87947"), "{}", rows[1]);

    let o = yamabe(&["table", "--max-dim", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["m"], 2);
    assert!((rows[0]["sigma_inv"].as_f64().unwrap() - 2.41877).abs() < 1e-5);
}

#[test]
fn output_is_deterministic_and_out_writes_the_same_bytes() {
    let a = yamabe(&["table", "--max-dim", "6"]);
    let b = yamabe(&["table", "--max-dim", "6"]);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = yamabe(&["table", "--max-dim", "6", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
}

fn three_columns(path: &Path) -> Vec<[f64; 3]> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            assert_eq!(v.len(), 3, "{l}");
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn ground_state_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.dat");
    let o = yamabe(&["ground-state", "2", "2", "--format", "text", "--dump", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((field(&text, "alpha0        =") - 2.2062008).abs() < 1e-6);
    assert!((field(&text, "sigma_inv     =") - 2.41877).abs() < 1e-5);
    let rows = three_columns(&path);
    assert!(rows.len() > 100);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!((rows[0][1] - 2.2062008).abs() < 1e-6);
}

#[test]
fn periodic_counts_and_dump() {
    let o = yamabe(&["periodic", "4", "0.01", "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "count ="), 0.0);

    let o = yamabe(&["periodic", "4", "100", "--format", "text"]);
    assert!(field(&stdout(&o), "count =") >= 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.dat");
    let o = yamabe(&["periodic", "4", "1", "--format", "text", "--dump", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = three_columns(&path);
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    assert!((first[1] - last[1]).abs() < 1e-12 && last[2].abs() < 1e-12);
    assert!((last[0] - field(&text, "2 pi r =")).abs() < 1e-6);
}

#[test]
fn bound_for_triangle_and_bundled_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.dat");
    fs::write(&path, "# triangle\n0 1\n1 0\n").unwrap();
    let o = yamabe(&["bound", "2", "2", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(field(&stdout(&o), "Y_inf <=") > 59.405);

    let o = yamabe(&["bound", "2", "2"]);
    let text = stdout(&o);
    assert!(text.contains("L < 2.427458: PASS"), "{text}");
    assert!(text.contains("bound < Y_4: PASS"));
}
