use std::process::{Command, Output};

fn univoque(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_univoque"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn constants_lists_all_four() {
    let o = univoque(&["constants", "--M", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "name,value,radius,provenance");
    assert_eq!(lines.len(), 5);
    let kl = lines.iter().find(|l| l.starts_with("q_KL,")).unwrap();
    assert!(kl.contains("1.7872"), "{kl}");
}

#[test]
fn golden_base_quasi_greedy_digits() {
    let o = univoque(&["expand", "--M", "1", "--x", "1", "--q", "phi", "--n", "6", "--kind", "quasi"]);
    assert_eq!(stdout(&o), "digits,exact\n101010,(10)\n");
    // the decimal 1.61803398875 lies above φ, so 1 = 1/q + 1/q² + (tiny)
    let o = univoque(&["expand", "--M", "1", "--x", "1", "--q", "1.61803398875", "--n", "6", "--kind", "quasi"]);
    assert!(stdout(&o).contains("\n110000,"));
}

#[test]
fn verify_paper_suite_passes() {
    let o = univoque(&["verify-paper", "--suite", "thue-morse"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("tm.windows,true"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["expand", "--x", "abc", "--q", "2"][..],
        &["frobnicate"][..],
        &["constants", "--M", "0"][..],
        &["constants", "--precision-bits", "8"][..],
        &["constants", "--tol", "-1"][..],
        &["invert", "--word", "1(2)", "--x", "1"][..],
        &["scan-ux", "--x", "1.2", "--from", "1.1"][..],
    ] {
        let o = univoque(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn computation_errors_exit_with_one_and_one_line() {
    for args in [&["isolated", "--M", "2", "--x", "1.5"][..], &["expand", "--x", "5", "--q", "1.5"][..]] {
        let o = univoque(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn isolated_emits_a_versioned_certificate() {
    let o = univoque(&["isolated", "--x", "1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], "1");
    let row = &v["rows"][0];
    assert_eq!(row["family"], "C");
    assert_eq!(row["n"], 1);
    assert_eq!(row["verified"], true);
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let args = ["members", "--x", "0.5", "--family", "dense", "--k", "3", "--seed", "7"];
    let a = univoque(&args);
    let b = univoque(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn staircase_writes_csv_to_a_file() {
    let path = std::env::temp_dir().join(format!("univoque-staircase-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let o = univoque(&["staircase", "--kind", "psi", "--from", "1.6", "--to", "2", "--steps", "5", "--jobs", "2", "--out", p]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "abscissa,lower,upper");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1.6,0,0"));
    assert!(lines[3].starts_with("1.8,"));
}

#[test]
fn scan_and_cover_tables() {
    let o = univoque(&["scan-ux", "--x", "2", "--steps", "4", "--depth", "32"]);
    let out = stdout(&o);
    assert!(out.starts_with("q_lo,q_hi,verdict\n"));
    assert!(out.trim_end().ends_with("1.5,CANDIDATE"), "{out}");
    let o = univoque(&["iso-cover", "--n-max", "2", "--k-max", "2"]);
    let out = stdout(&o);
    assert!(out.starts_with("lo,hi,n,k,family\n"));
    assert_eq!(out.lines().count(), 1 + 4 + 2);
}

#[test]
fn named_constants_resolve() {
    let o = univoque(&["classify", "--x", "xG"]);
    assert!(stdout(&o).contains("SINGLETON"), "{}", stderr(&o));
    let o = univoque(&["alpha", "--q", "q3", "--n", "8"]);
    assert_eq!(stdout(&o), "digits,exact\n11010010,(11010010)\n");
    let o = univoque(&["dim-uq", "--q", "qG", "--M", "2"]);
    assert!(stdout(&o).contains("qG,0,0,"), "{}", stdout(&o));
}
