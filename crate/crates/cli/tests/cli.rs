use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    root.join(name).display().to_string()
}

fn hhx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn hh_json_is_byte_identical_across_runs() {
    let args = ["hh", "--algebra", &corpus("dual.json"), "--smax", "3", "--json"];
    let a = hhx(&args);
    let b = hhx(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["provenance"], "loday");
    assert_eq!(v["s_valid"], 3);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = hhx(&[
        "oracle-hh",
        "--algebra",
        &corpus("qxq.json"),
        "--smax",
        "2",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn sseq_json_is_deterministic() {
    let args = [
        "sseq",
        "--algebra",
        &corpus("dual.json"),
        "--sphere",
        "2",
        "--smax",
        "2",
        "--json",
    ];
    let a = hhx(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, hhx(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["converges"], true);
}

#[test]
fn validate_accepts_the_corpus() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    files.sort();
    let mut args = vec!["validate"];
    args.extend(files.iter().map(String::as_str));
    let out = hhx(&args);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(
        stdout(&out).lines().filter(|l| l.starts_with("ok")).count(),
        files.len()
    );
}

#[test]
fn validate_rejects_a_broken_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // Not associative: x·x = y, x·y = 0, y·x = x.
    std::fs::write(
        &path,
        r#"{"field":"Q","basis":[{"name":"1","degree":0},{"name":"x","degree":0},{"name":"y","degree":0}],
            "unit":["1","0","0"],
            "table":[[["1","0","0"],["0","1","0"],["0","0","1"]],
                     [["0","1","0"],["0","0","1"],["0","0","0"]],
                     [["0","0","1"],["0","1","0"],["0","0","0"]]]}"#,
    )
    .unwrap();
    let out = hhx(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stdout(&out));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&hhx(&[])), 1);
    assert_eq!(code(&hhx(&["hh", "--smax", "2"])), 1);
    assert_eq!(code(&hhx(&["--help"])), 0);
    assert_eq!(code(&hhx(&["hh", "--algebra", "/nonexistent.json", "--smax", "1"])), 1);
    assert_eq!(code(&hhx(&["hh", "--algebra", &corpus("mat2.json"), "--smax", "1"])), 2);
    assert_eq!(
        code(&hhx(&[
            "hh",
            "--algebra",
            &corpus("dual.json"),
            "--smax",
            "1",
            "--field",
            "Fp:4"
        ])),
        2
    );
    assert_eq!(
        code(&hhx(&[
            "hh",
            "--algebra",
            &corpus("dual.json"),
            "--space",
            "torus:9",
            "--smax",
            "1"
        ])),
        1
    );
}

#[test]
fn compare_exit_codes() {
    let dual = corpus("dual.json");
    let agree = hhx(&[
        "compare",
        "--left",
        "loday",
        "--right",
        "oracle",
        "--algebra",
        &dual,
        "--smax",
        "3",
    ]);
    assert_eq!(code(&agree), 0);
    let bar = hhx(&[
        "compare",
        "--left",
        "loday",
        "--right",
        "bar",
        "--algebra",
        &dual,
        "--smax",
        "3",
    ]);
    assert_eq!(code(&bar), 0);
    let cover = hhx(&[
        "compare",
        "--left",
        "loday",
        "--right",
        "poset",
        "--cover",
        "2",
        "--algebra",
        &dual,
        "--smax",
        "1",
        "--json",
    ]);
    assert_eq!(code(&cover), 3);
    let v: serde_json::Value = serde_json::from_slice(&cover.stdout).unwrap();
    assert_eq!(v["verdict"], "disagree");
    assert_eq!(v["first_mismatch"]["s"], 1);
}

#[test]
fn compare_saved_tables() {
    let dir = tempfile::tempdir().unwrap();
    let l = dir.path().join("l.json");
    let r = dir.path().join("r.json");
    hhx(&[
        "hh",
        "--algebra",
        &corpus("qxq.json"),
        "--smax",
        "2",
        "--out",
        l.to_str().unwrap(),
    ]);
    hhx(&[
        "oracle-hh",
        "--algebra",
        &corpus("qxq.json"),
        "--smax",
        "2",
        "--out",
        r.to_str().unwrap(),
    ]);
    let left = format!("file:{}", l.display());
    let right = format!("file:{}", r.display());
    assert_eq!(
        code(&hhx(&["compare", "--left", &left, "--right", &right, "--smax", "2"])),
        0
    );
    let out = hhx(&["validate", l.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn field_override_changes_the_answer() {
    let q = hhx(&["hh", "--algebra", &corpus("dual.json"), "--smax", "2", "--json"]);
    let f2 = hhx(&[
        "hh",
        "--algebra",
        &corpus("dual.json"),
        "--smax",
        "2",
        "--json",
        "--field",
        "Fp:2",
    ]);
    let dims = |o: &Output| {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["dim"].as_u64().unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(dims(&q), vec![2, 1, 1]);
    assert_eq!(dims(&f2), vec![2, 2, 2]);
}

#[test]
fn etale_check_output() {
    let out = hhx(&["etale-check", "--algebra", &corpus("qxq.json"), "--smax", "3"]);
    assert_eq!(stdout(&out), "étale: true; HH^{S^2} ≅ A: true\n");
    let out = hhx(&["etale-check", "--algebra", &corpus("dual.json"), "--smax", "3"]);
    assert_eq!(stdout(&out), "étale: false; HH^{S^2} ≅ A: false\n");
}

#[test]
fn relative_and_file_spaces() {
    let out = hhx(&[
        "hh",
        "--algebra",
        &corpus("dual_x_dual.json"),
        "--base-map",
        &corpus("dual_x_dual_over_qxq.json"),
        "--smax",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let tri = hhx(&[
        "hh",
        "--algebra",
        &corpus("dual.json"),
        "--space",
        &corpus("triangle.json"),
        "--smax",
        "2",
        "--json",
    ]);
    let min = hhx(&["hh", "--algebra", &corpus("dual.json"), "--smax", "2", "--json"]);
    assert_eq!(tri.stdout, min.stdout);
}

#[test]
fn poset_and_cohomology_commands() {
    let out = hhx(&[
        "poset-hh",
        "--algebra",
        &corpus("qxq.json"),
        "--cover",
        "3",
        "--smax",
        "1",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["edge_iso"], true);
    let out = hhx(&["cohomology", "--algebra", &corpus("dual.json"), "--nmax", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["s_valid"], 3);
    let m = corpus("dual_residue_module.json");
    let out = hhx(&[
        "rhom",
        "--algebra",
        &corpus("dual.json"),
        "--left",
        &m,
        "--right",
        &m,
        "--nmax",
        "2",
    ]);
    assert_eq!(code(&out), 0);
}
