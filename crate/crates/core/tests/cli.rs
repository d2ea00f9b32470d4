use std::path::Path;
use std::process::{Command, Output};

fn abid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abid")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = abid(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_shapes_and_counts() {
    let ball = ok(&["generate", "--shape", "ball", "--n", "1000", "--d", "5", "--seed", "1"]);
    let lines: Vec<&str> = ball.lines().collect();
    assert_eq!(lines.len(), 1000);
    assert!(lines.iter().all(|l| l.split(',').count() == 5));

    let lattice = ok(&["generate", "--shape", "lattice"]);
    assert_eq!(lattice.lines().count(), 65536);
    assert!(lattice.lines().all(|l| l.split(',').count() == 8));

    let koch = ok(&["generate", "--shape", "koch", "--n", "20000", "--depth", "6"]);
    assert_eq!(koch.lines().count(), 20000);

    let cubes = ok(&["generate", "--shape", "nested-cubes", "--n-per-cube", "10", "--max-dim", "3"]);
    assert_eq!(cubes.lines().count(), 30);
    assert!(cubes.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn estimate_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ball.csv");
    ok(&["generate", "--shape", "ball", "--n", "500", "--d", "3", "--seed", "2", "-o", p(&data)]);
    let table = ok(&["estimate", "-i", p(&data), "--k", "20", "--estimators", "abid,mle"]);
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("index,abid,mle"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 500);
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0], i.to_string());
        let v: f64 = f[1].parse().unwrap();
        assert!(v > 0.0 && v <= 20.0);
    }

    let diag = ok(&["estimate", "-i", p(&data), "--k", "20", "--estimators", "rabid", "--diagnostics"]);
    let header = diag.lines().next().unwrap();
    assert!(header.starts_with("index,rabid") && header.contains("mean_cosine"), "{header}");
}

#[test]
fn estimate_external_query() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("disc.csv");
    ok(&["generate", "--shape", "ball", "--n", "2000", "--d", "2", "--seed", "3", "-o", p(&data)]);
    let out = ok(&["estimate", "-i", p(&data), "--k", "100", "--query", "-0.1,0.05"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let v: f64 = lines[1].split(',').last().unwrap().parse().unwrap();
    assert!((1.6..=2.4).contains(&v), "{v}");
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("small.csv");
    ok(&["generate", "--shape", "ball", "--n", "30", "--d", "2", "-o", p(&data)]);

    // usage errors
    assert_eq!(abid(&[]).status.code(), Some(1));
    assert_eq!(abid(&["estimate", "-i", p(&data), "--k", "5", "--estimators", "foo"]).status.code(), Some(1));
    assert_eq!(abid(&["frobnicate"]).status.code(), Some(1));

    // data errors
    let out = abid(&["estimate", "-i", p(&data), "--k", "1", "--estimators", "rabid"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = abid(&["estimate", "-i", p(&data), "--k", "30"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.csv");
    assert_eq!(abid(&["estimate", "-i", p(&missing), "--k", "3"]).status.code(), Some(2));

    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "1,2\n3,4\n5\n").unwrap();
    let out = abid(&["estimate", "-i", p(&ragged), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
}

#[test]
fn validate_passes() {
    let out = ok(&["validate", "--d", "5", "--samples", "100000", "--seed", "4"]);
    assert!(out.contains("PASS"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn histogram_and_trails() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ball.csv");
    let table = dir.path().join("est.csv");
    ok(&["generate", "--shape", "ball", "--n", "400", "--d", "3", "--seed", "5", "-o", p(&data)]);
    ok(&["estimate", "-i", p(&data), "--k", "40", "--estimators", "abid,ged", "-o", p(&table)]);

    let hist = ok(&["histogram", "-i", p(&table), "--column", "ged", "--bin-width", "0.5"]);
    let mut lines = hist.lines();
    assert_eq!(lines.next(), Some("bin_left,count"));
    let total: usize = lines.map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 400);

    let trails = ok(&[
        "trails", "-i", p(&data), "--k-min", "10", "--k-max", "60", "--k-step", "10", "--points", "25", "--seed", "6",
    ]);
    let mut lines = trails.lines();
    assert_eq!(lines.next(), Some("index,10,20,30,40,50,60"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("g.csv");
    ok(&["generate", "--shape", "gaussian", "--n", "800", "--d", "4", "--seed", "7", "-o", p(&data)]);
    let args = ["estimate", "-i", p(&data), "--k", "25", "--estimators", "abid,rabid,mle,mom,ged"];
    let one = ok(&[&["--threads", "1"], &args[..]].concat());
    let four = ok(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one, four);
}
