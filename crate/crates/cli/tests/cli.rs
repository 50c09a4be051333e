use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn numrad(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numrad"))
        .args(args)
        .current_dir(dir)
        .env_remove("NUMRAD_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(' ')?.split_whitespace().next()?.parse().ok())
        .unwrap_or_else(|| panic!("no {key:?} line in:\n{text}"))
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn fixtures() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "shift.txt", "# strongly certified disk\n2\n0 2\n0 0\n");
    write(d.path(), "three.txt", "3\n0 0 2\n0 0.8 0\n0 0 0\n");
    write(d.path(), "chain.txt", "3\n0 0 1\n0 1 0\n0 0 0\n");
    write(d.path(), "zero.txt", "2\n0 0\n0 0\n");
    write(d.path(), "eye.txt", "2\n1 0\n0 1\n");
    write(d.path(), "jordan4.txt", "4\n0 1 0 0\n0 0 1 0\n0 0 0 1\n0 0 0 0\n");
    write(d.path(), "bad.txt", "2\n0 2\n0 zz\n");
    d
}

#[test]
fn radius_of_examples() {
    let d = fixtures();
    let o = numrad(&["radius", "shift.txt"], d.path());
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!((value_of(&text, "radius") - 1.0).abs() < 1e-12, "{text}");
    assert!((value_of(&text, "sdp radius") - 1.0).abs() < 1e-7, "{text}");

    let o = numrad(&["radius", "jordan4.txt", "--method", "boundary"], d.path());
    let golden = (1.0 + 5f64.sqrt()) / 4.0;
    assert!((value_of(&stdout(&o), "radius") - golden).abs() < 1e-12);

    let o = numrad(&["radius", "zero.txt", "--method", "boundary"], d.path());
    assert!(o.status.success());
    assert_eq!(value_of(&stdout(&o), "radius"), 0.0);
}

#[test]
fn prox_writes_parseable_outputs() {
    let d = fixtures();
    let o = numrad(&["prox", "eye.txt", "--out-a", "a.txt", "--out-z", "z.txt"], d.path());
    assert!(o.status.success(), "{o:?}");
    // prox(I_2) with coefficient 3/4 is (2/3) I.
    assert!((value_of(&stdout(&o), "radius") - 2.0 / 3.0).abs() < 1e-6);
    let o = numrad(&["radius", "a.txt", "--method", "boundary"], d.path());
    assert!((value_of(&stdout(&o), "radius") - 2.0 / 3.0).abs() < 1e-6, "{o:?}");
    assert!(d.path().join("z.txt").exists());

    let o = numrad(&["prox", "zero.txt", "--out-a", "a0.txt", "--out-z", "z0.txt"], d.path());
    assert!(o.status.success(), "{o:?}");
    let o = numrad(&["radius", "a0.txt", "--method", "boundary"], d.path());
    assert!(value_of(&stdout(&o), "radius") < 1e-6);
}

#[test]
fn certify_verdicts() {
    let d = fixtures();
    let verdict = |file: &str| {
        let o = numrad(&["certify", file], d.path());
        assert!(o.status.success(), "{o:?}");
        stdout(&o).lines().find_map(|l| l.strip_prefix("verdict ").map(str::to_owned)).unwrap()
    };
    assert_eq!(verdict("shift.txt"), "strongly-certified-disk");
    assert_eq!(verdict("three.txt"), "disk");
    assert_eq!(verdict("chain.txt"), "non-disk");
    assert_eq!(verdict("eye.txt"), "identity-multiple");

    let o = numrad(&["certify", "shift.txt", "--coefficients", "p.txt"], d.path());
    assert!(o.status.success());
    assert!(fs::read_to_string(d.path().join("p.txt")).unwrap().starts_with("2\n"));
}

#[test]
fn ando_factors_of_shift() {
    let d = fixtures();
    let o = numrad(&["ando", "shift.txt"], d.path());
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.contains("canonical representor"), "{text}");
    assert!(text.contains("property holds: true"), "{text}");
}

#[test]
fn experiment_is_deterministic_and_reportable() {
    let d = fixtures();
    let run = |out: &str| {
        let o = numrad(
            &["experiment", "--n", "2", "--trials", "10", "--seed", "7", "--out", out],
            d.path(),
        );
        assert!(o.status.success(), "{o:?}");
        fs::read(d.path().join(out).join("n2").join("records.csv")).unwrap()
    };
    let first = run("run1");
    let second = run("run2");
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("trial_id,"));
    assert!(d.path().join("run1/n2/measures.svg").exists());

    let o = numrad(&["report", "run1/n2/records.csv", "--svg", "again.svg"], d.path());
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("records=10 "));
    let svg = fs::read_to_string(d.path().join("again.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn exit_codes() {
    let d = fixtures();
    let code = |args: &[&str]| numrad(args, d.path()).status.code();
    assert_eq!(code(&["radius", "bad.txt"]), Some(3));
    let o = numrad(&["radius", "bad.txt"], d.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 3"));
    assert_eq!(code(&["radius", "missing.txt"]), Some(5));
    assert_eq!(code(&["certify", "zero.txt"]), Some(6));
    assert_eq!(code(&["radius"]), Some(2));
    assert_eq!(code(&["experiment", "--n", "1", "--trials", "1"]), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_numrad"))
        .args(["radius", "shift.txt"])
        .current_dir(d.path())
        .env("NUMRAD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
