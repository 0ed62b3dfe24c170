use std::path::Path;
use std::process::Command;

use hindman_core::formats::{parse_certificate, parse_coloring, parse_witness, to_json, WitnessFile};

struct Run {
    stdout: String,
    code: i32,
}

fn hindman(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_hindman")).args(args).output().expect("binary runs");
    Run { stdout: String::from_utf8(out.stdout).unwrap(), code: out.status.code().unwrap() }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_examples() {
    let r = hindman(&["sp", "--m", "1", "--p", "1", "--c", "1"]);
    assert_eq!((r.stdout.as_str(), r.code), ("exact 1\n", 0));
    let r = hindman(&["u", "--n", "3", "--c", "1"]);
    assert_eq!((r.stdout.as_str(), r.code), ("exact 3\n", 0));
    let r = hindman(&["hind", "--n", "2", "--c", "2", "--max-k", "3", "--max-nodes", "10"]);
    assert!(r.stdout.starts_with("unknown >= "), "{}", r.stdout);
    assert_eq!(r.code, 2);
    assert_eq!(hindman(&["hind", "--n", "2"]).code, 3);
    assert_eq!(hindman(&["sp", "--m", "1", "--p", "1", "--c", "1", "--threads", "0"]).code, 3);
}

#[test]
fn certificates_round_trip_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let r = hindman(&["hind", "--n", "2", "--c", "2", "--cert", path(&cert)]);
    assert_eq!((r.stdout.as_str(), r.code), ("exact 5\n", 0));
    let text = std::fs::read_to_string(&cert).unwrap();
    let parsed = parse_certificate(&text).unwrap();
    assert_eq!(format!("{}\n", to_json(&parsed)), text);
    let r = hindman(&["verify", "--certificate", path(&cert)]);
    assert_eq!((r.stdout.as_str(), r.code), ("VALID\n", 0));

    // A constant coloring is not bad.
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{"problem":{"kind":"hind","n":2},"coloring":{"kind":"subsets","k":4,"colors":2,"assign":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}}"#,
    )
    .unwrap();
    let r = hindman(&["verify", "--certificate", path(&good)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("INVALID: "));
}

#[test]
fn bound_examples() {
    let r = hindman(&["bound", "--m", "1", "--p", "1", "--c", "1", "--oracle", "exact"]);
    assert_eq!(r.code, 0);
    for line in ["k*=2", "n_0=0", "n_1=1", "n_2=2", "bound_paper=4", "bound_operative=8"] {
        assert!(r.stdout.lines().any(|l| l == line), "{line}");
    }
    let again = hindman(&["bound", "--m", "1", "--p", "1", "--c", "1", "--oracle", "exact"]);
    assert_eq!(again.stdout, r.stdout);

    let r = hindman(&["bound", "--m", "1", "--p", "1", "--c", "2", "--oracle", "symbolic"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("(pow2 n_{k*})"));

    assert_eq!(hindman(&["bound", "--m", "1", "--p", "1", "--c", "1", "--oracle", "table:missing.json"]).code, 3);
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    std::fs::write(&table, r#"{"hind":[[2,2,5]],"u":[[1,65536,1]]}"#).unwrap();
    let r = hindman(&["bound", "--m", "1", "--p", "1", "--c", "2", "--oracle", &format!("table:{}", path(&table))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("k*=5\n") && r.stdout.contains("n_1=1\n"), "{}", r.stdout);
    std::fs::write(&table, "{\"hind\":").unwrap();
    let r = hindman(&["bound", "--m", "1", "--p", "1", "--c", "2", "--oracle", &format!("table:{}", path(&table))]);
    assert_eq!(r.code, 3);

    let r = hindman(&["bound", "--m", "1", "--p", "1", "--c", "2", "--oracle", "exact", "--max-k", "3", "--max-nodes", "100"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("n_0=0"));
}

#[test]
fn extract_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let col8 = dir.path().join("c8.json");
    let r = hindman(&["gen-coloring", "--kind", "interval", "--k", "8", "--colors", "1"]);
    assert_eq!(r.code, 0);
    std::fs::write(&col8, &r.stdout).unwrap();
    assert_eq!(parse_coloring(&r.stdout).unwrap().assign(), &[0; 8]);

    let transcript = dir.path().join("t.json");
    let r = hindman(&[
        "extract", "--m", "1", "--p", "1", "--c", "1", "--coloring", path(&col8), "--transcript", path(&transcript),
    ]);
    assert_eq!(r.code, 0);
    match parse_witness(&r.stdout).unwrap() {
        WitnessFile::Spencer(w) => assert_eq!(w.h, vec![1, 2, 4]),
        other => panic!("{other:?}"),
    }
    assert!(std::fs::read_to_string(&transcript).unwrap().contains("\"audit\":true"));
    let wfile = dir.path().join("w.json");
    std::fs::write(&wfile, &r.stdout).unwrap();
    let v = hindman(&["verify", "--witness", path(&wfile), "--coloring", path(&col8)]);
    assert_eq!((v.stdout.as_str(), v.code), ("VALID\n", 0));

    let col4 = dir.path().join("c4.json");
    std::fs::write(&col4, hindman(&["gen-coloring", "--kind", "interval", "--k", "4", "--colors", "1"]).stdout).unwrap();
    assert_eq!(hindman(&["extract", "--m", "1", "--p", "1", "--c", "1", "--coloring", path(&col4)]).code, 3);
    let v = hindman(&["verify", "--witness", path(&wfile), "--coloring", path(&col4)]);
    assert_eq!((v.stdout.as_str(), v.code), ("INVALID: sum 7 outside [k]\n", 1));

    let r = hindman(&["extract", "--m", "1", "--p", "1", "--c", "1", "--coloring", path(&col8), "--n-seq", "0,1,1"]);
    assert_eq!(r.code, 1);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"kind\":\"spencer\",\"m\":1").unwrap();
    assert_eq!(hindman(&["verify", "--witness", path(&broken), "--coloring", path(&col8)]).code, 3);
}

#[test]
fn union_witness_verification() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c.json");
    std::fs::write(&col, r#"{"kind":"subsets","k":2,"colors":2,"assign":[0,0,0]}"#).unwrap();
    let w = dir.path().join("w.json");
    std::fs::write(&w, r#"{"kind":"union","n":2,"ordered":true,"d":[[0],[1]]}"#).unwrap();
    assert_eq!(hindman(&["verify", "--witness", path(&w), "--coloring", path(&col)]).stdout, "VALID\n");
    std::fs::write(&col, r#"{"kind":"subsets","k":2,"colors":2,"assign":[0,0,1]}"#).unwrap();
    assert_eq!(hindman(&["verify", "--witness", path(&w), "--coloring", path(&col)]).code, 1);
}

#[test]
fn gen_coloring_examples() {
    let a = hindman(&["gen-coloring", "--kind", "subsets", "--k", "5", "--colors", "3", "--seed", "42"]);
    let b = hindman(&["gen-coloring", "--kind", "subsets", "--k", "5", "--colors", "3", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let c = parse_coloring(&a.stdout).unwrap();
    assert_eq!(format!("{}\n", to_json(&c)), a.stdout);
    assert_eq!(hindman(&["gen-coloring", "--kind", "interval", "--k", "8", "--colors", "0"]).code, 3);
    assert_eq!(hindman(&["gen-coloring", "--kind", "circle", "--k", "8", "--colors", "1"]).code, 3);
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let one = hindman(&["sp", "--m", "2", "--p", "1", "--c", "2", "--max-k", "30", "--threads", "1"]);
    let many = hindman(&["sp", "--m", "2", "--p", "1", "--c", "2", "--max-k", "30", "--threads", "8"]);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, "unknown >= 31\n");
}
