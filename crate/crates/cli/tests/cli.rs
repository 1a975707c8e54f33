use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bilist_core::colorability::{verify_certificate, Verdict};
use bilist_core::constructions::FANO_LINES;
use bilist_core::read_certificate;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn bilist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).expect("structured output is JSON")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().expect("header").iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.expect("record").iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn assert_verified_file(path: &Path) {
    let cert = read_certificate(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(verify_certificate(&cert).unwrap(), Verdict::Verified);
}

#[test]
fn version_and_invocation_on_stderr() {
    let o = bilist(&["verify", &fixture("classic-2-2.cert")]);
    let err = stderr(&o);
    assert!(err.contains(&format!("bilist {}", env!("CARGO_PKG_VERSION"))));
    assert!(err.contains("invocation: ") && err.contains("verify"));
}

#[test]
fn verify_fixtures() {
    for name in ["classic-2-2.cert", "fano-28-7.cert", "fano-35-7.cert", "k20-7.cert"] {
        let o = bilist(&["verify", &fixture(name)]);
        assert_eq!(code(&o), 0, "{name}");
        assert_eq!(stdout(&o), "VERIFIED\n");
    }
    let o = bilist(&["--format", "structured", "verify", &fixture("classic-2-2.cert")]);
    assert_eq!(json(&o)["verdict"], "VERIFIED");
}

#[test]
fn verify_refutes_a_colourable_certificate() {
    let text = std::fs::read_to_string(fixtures().join("classic-2-2.cert")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["lists_a"][3] = serde_json::json!([0, 2]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cert");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = bilist(&["--format", "structured", "verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = json(&o);
    assert_eq!(out["verdict"], "REFUTED");
    assert_eq!(out["colouring"]["a"].as_array().unwrap().len(), 4);
}

#[test]
fn decide_both_ways() {
    let o = bilist(&["decide", &fixture("classic-2-2.cert")]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT COLOURABLE\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(
        &path,
        r#"{"graph":{"complete":false,"a":2,"b":2,"edges":[[0,0],[1,1]]},"k_a":2,"k_b":2,"palette":3,
            "lists_a":[[0,1],[1,2]],"lists_b":[[0,1],[1,2]]}"#,
    )
    .unwrap();
    let o = bilist(&["--format", "structured", "decide", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = json(&o);
    assert_eq!(out["verdict"], "COLOURABLE");
    let a = &out["colouring"]["a"];
    let b = &out["colouring"]["b"];
    assert_ne!(a[0], b[0]);
    assert_ne!(a[1], b[1]);
}

#[test]
fn choosable_small_cases() {
    let o = bilist(&["choosable", "--complete", "3", "2", "--ka", "2", "--kb", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("CHOOSABLE\n"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k42.cert");
    let o = bilist(&[
        "--format",
        "structured",
        "choosable",
        "--complete",
        "4",
        "2",
        "--ka",
        "2",
        "--kb",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["verdict"], "NOT_CHOOSABLE");
    assert_eq!(v["certificate"], out.to_str().unwrap());
    assert_verified_file(&out);
}

#[test]
fn choosable_k20_7() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bilist"))
        .args(["choosable", "--complete", "20", "7", "--ka", "3", "--kb", "4"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT CHOOSABLE\ncertificate: bilist-K20-7-3-4.cert\n");
    assert_verified_file(&dir.path().join("bilist-K20-7-3-4.cert"));
}

#[test]
fn choosable_timeout_is_capped() {
    let o = bilist(&["--timeout", "0", "choosable", "--complete", "20", "7", "--ka", "3", "--kb", "4"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).starts_with("UNDECIDED"));
    assert!(stderr(&o).contains("hint: "));
}

#[test]
fn threshold_values_and_csv() {
    let o = bilist(&["threshold", "--b", "2", "--ka", "2", "--kb", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("4"));

    let o = bilist(&["--format", "csv", "threshold", "--b", "3", "--ka", "2", "--kb", "2"]);
    let (header, rows) = csv_rows(&stdout(&o));
    let col = header.iter().position(|h| h == "a_star").unwrap();
    assert_eq!(rows[0][col], "3");

    let o = bilist(&["threshold", "--b", "2", "--ka", "3", "--kb", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("unbounded"));
}

#[test]
fn threshold_output_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for jobs in ["1", "3"] {
        let path = dir.path().join(format!("t{jobs}.cert"));
        let o = bilist(&["--jobs", jobs, "threshold", "--b", "3", "--ka", "2", "--kb", "2", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        outs.push((stdout(&o).replace(path.to_str().unwrap(), "OUT"), std::fs::read(&path).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn mbar_fano_family() {
    let o = bilist(&["mbar", "--k1", "2", "--k2", "4", "--l", "7"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("7"));
    assert_eq!(lines.next(), Some("7 4 7"));
    let mut complements: Vec<Vec<usize>> = lines
        .map(|l| {
            let block: Vec<usize> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (0..7).filter(|x| !block.contains(x)).collect()
        })
        .collect();
    complements.sort();
    // any labelling of the Fano plane: seven triples meeting pairwise in one point
    assert_eq!(complements.len(), FANO_LINES.len());
    for (i, s) in complements.iter().enumerate() {
        for t in &complements[i + 1..] {
            assert_eq!(s.iter().filter(|x| t.contains(x)).count(), 1);
        }
    }
}

#[test]
fn mbar_csv_and_bracket() {
    let o = bilist(&["--format", "csv", "mbar", "--k1", "2", "--k2", "4", "--l", "7"]);
    let (header, rows) = csv_rows(&stdout(&o));
    let get = |k: &str| rows[0][header.iter().position(|h| h == k).unwrap()].clone();
    assert_eq!(get("value"), "7");
    assert_eq!(get("lower"), "7");
    let family: Vec<Vec<usize>> = serde_json::from_str(&get("family")).unwrap();
    assert_eq!(family.len(), 7);

    let o = bilist(&["--max-nodes", "5", "--format", "structured", "mbar", "--k1", "3", "--k2", "3", "--l", "8"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert!(v["value"].is_null());
    assert_eq!(v["bracket_lower"], 6);
    assert_eq!(v["bracket_upper"], 9);

    let o = bilist(&["mbar", "--k1", "2", "--k2", "4", "--l", "7", "--bounds-only"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("[7, "));
}

#[test]
fn bounds_csv_round_trips() {
    let args = [
        "bounds", "--mode", "complete", "--xa", "4,20,300", "--xb", "2..4", "--ka", "2,3", "--kb", "2..3",
    ];
    let csv_out = bilist(&[&["--format", "csv"][..], &args[..]].concat());
    let js = bilist(&[&["--format", "structured"][..], &args[..]].concat());
    assert_eq!(code(&csv_out), 0);
    let (header, rows) = csv_rows(&stdout(&csv_out));
    assert_eq!(header, bilist_core::bounds::CSV_HEADER);
    let reports = json(&js);
    let mut i = 0;
    for r in reports.as_array().unwrap() {
        for e in r["entries"].as_array().unwrap() {
            let row = &rows[i];
            i += 1;
            assert_eq!(row[0], "complete");
            assert_eq!(row[1], r["point"]["x_a"].to_string());
            assert_eq!(row[5], e["id"].as_str().unwrap());
            assert_eq!(row[7], e["holds"].to_string());
            let margin: f64 = row[8].parse().unwrap();
            match e["margin"].as_f64() {
                Some(m) => assert_eq!(margin.to_bits(), m.to_bits()),
                None => assert!(!margin.is_finite()),
            }
            let inputs: Vec<String> = e["inputs"]
                .as_array()
                .unwrap()
                .iter()
                .map(|kv| format!("{}={}", kv[0].as_str().unwrap(), kv[1].as_str().unwrap()))
                .collect();
            assert_eq!(row[9], inputs.join(";"));
        }
    }
    assert_eq!(i, rows.len());
    assert_eq!(rows.len(), 3 * 3 * 2 * 2 * 9);
}

#[test]
fn bounds_condition_selection_and_row_cap() {
    let o = bilist(&["--format", "csv", "bounds", "--xa", "64", "--xb", "64", "--ka", "24", "--kb", "2", "--conditions", "coupon"]);
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "coupon");

    let o = bilist(&["--max-rows", "5", "--format", "csv", "bounds", "--xa", "1..4", "--xb", "4", "--ka", "2", "--kb", "2", "--conditions", "transversal,coupon"]);
    assert_eq!(code(&o), 3);
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);

    let o = bilist(&["bounds", "--xa", "4", "--xb", "4", "--ka", "2", "--kb", "2", "--conditions", "nope"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("hint: "));
}

#[test]
fn construct_writes_verified_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["classic", "--k", "3", "--delta", "2"],
        &["fano28"],
        &["boundary", "--b", "4", "--delta", "2"],
        &["gadget", "--k", "2", "--delta", "3"],
        &["witness", "--k", "2", "--m", "8", "--segments", "2"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.cert"));
        let args = [&["--format", "structured", "construct"][..], case, &["--out", path.to_str().unwrap()][..]].concat();
        let o = bilist(&args);
        assert_eq!(code(&o), 0, "{case:?}: {}", stderr(&o));
        assert_eq!(json(&o)["verdict"], "VERIFIED");
        assert_verified_file(&path);
    }
    let o = bilist(&["construct", "classic", "--k", "2", "--delta", "2"]);
    let printed = read_certificate(&stdout(&o)).unwrap();
    assert_eq!(printed.graph.a_size(), 4);
}

#[test]
fn construct_fixture_respects_env() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bilist"))
        .args(["construct", "classic", "--k", "2", "--delta", "2", "--fixture", "c.cert"])
        .env("BILIST_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let written = std::fs::read_to_string(dir.path().join("c.cert")).unwrap();
    let shipped = std::fs::read_to_string(fixtures().join("classic-2-2.cert")).unwrap();
    assert_eq!(written, shipped);
}

#[test]
fn construct_steiner_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("a.fam");
    let fb = dir.path().join("b.fam");
    let mut triples = String::from("7 3 35\n");
    for x in 0..7 {
        for y in x + 1..7 {
            for z in y + 1..7 {
                triples.push_str(&format!("{x} {y} {z}\n"));
            }
        }
    }
    let mut complements = String::from("7 4 7\n");
    for line in FANO_LINES {
        let rest: Vec<String> = (0..7).filter(|p| !line.contains(p)).map(|p| p.to_string()).collect();
        complements.push_str(&format!("{}\n", rest.join(" ")));
    }
    std::fs::write(&fa, triples).unwrap();
    std::fs::write(&fb, complements).unwrap();
    let (a, b) = (fa.to_str().unwrap(), fb.to_str().unwrap());
    let out = dir.path().join("s.cert");
    let o = bilist(&["construct", "steiner", "--fam-a", a, "--fam-b", b, "--k1", "4", "--k2", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("K_{35,7} (3, 4) VERIFIED"));
    assert_verified_file(&out);

    std::fs::write(&fa, "3 2 2\n0 1\n0 2\n").unwrap();
    std::fs::write(&fb, "3 1 2\n2\n0\n").unwrap();
    let o = bilist(&["construct", "steiner", "--fam-a", a, "--fam-b", b, "--k1", "1", "--k2", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("Property A; witness set [0]"));
}

#[test]
fn construct_witness_at_scale_is_capped() {
    let o = bilist(&["construct", "witness", "--k", "2", "--degree", "1e6"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("m=464.6"));
}

#[test]
fn sample_requires_seed_in_csv() {
    let o = bilist(&["--format", "csv", "sample", "coupon", "--random", "8", "8", "3", "3", "4", "2", "6"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn sample_is_reproducible() {
    for kind in ["transversal", "coupon", "split"] {
        let args = ["--seed", "11", "--format", "csv", "sample", kind, "--random", "8", "8", "2", "2", "4", "3", "8"];
        let first = bilist(&args);
        let second = bilist(&args);
        assert_eq!(code(&first), 0, "{kind}: {}", stderr(&first));
        assert_eq!(first.stdout, second.stdout);
        let (header, rows) = csv_rows(&stdout(&first));
        let get = |k: &str| rows[0][header.iter().position(|h| h == k).unwrap()].clone();
        assert_eq!(get("seed"), "11");
        assert_eq!(get("rng"), "ChaCha8");
        assert_eq!(get("status"), "SUCCESS");
    }
}

#[test]
fn sample_on_a_fixture_instance() {
    let o = bilist(&["--seed", "5", "--format", "structured", "sample", "coupon", "--instance", &fixture("classic-2-2.cert"), "--budget", "50"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["status"], "EXHAUSTED");
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["verify"][..],
        &["mbar", "--k1", "2", "--k2", "4", "--l", "7", "--bogus"][..],
        &["mbar", "--k1", "0", "--k2", "4", "--l", "7"][..],
        &["verify", "/nonexistent/file.cert"][..],
        &["--timeout", "-1", "mbar", "--k1", "2", "--k2", "4", "--l", "7"][..],
    ] {
        let o = bilist(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!stderr(&o).contains("panicked"), "{args:?}");
    }
}
