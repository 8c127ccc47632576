use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use permuton_core::models::{build_zigzag, Permuton};
use permuton_core::perm::parse_permutation;
use permuton_core::Permutation;
use serde_json::Value;

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permuton"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

struct Files(tempfile::TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).to_str().unwrap().to_owned()
    }
}

#[test]
fn counts_and_densities() {
    let f = Files::new();
    let p = f.write("p.txt", "1 4 3 2\n");
    let out = run(&["density", "--pattern", "132", "--perm", &p]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "3/4");

    let out = run(&["count", "--pattern", "1,3,2", "--perm", &p, "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["occurrences"], "3");
    assert_eq!(v["total_subsets"], "4");
    assert_eq!(v["density"], "3/4");

    let out = run(&["density", "--pattern", "123", "--perm", &f.write("r.txt", "3 2 1")]);
    assert_eq!(stdout(&out).trim(), "0/1");
}

#[test]
fn avoid_reports_through_the_exit_code() {
    let f = Files::new();
    let p = f.write("p.txt", "1 4 3 2");
    assert_eq!(code(&run(&["avoid", "--pattern", "123", "--perm", &p])), 0);
    assert_eq!(code(&run(&["avoid", "--pattern", "321", "--perm", &p])), 1);
}

#[test]
fn permutations_can_come_from_stdin() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_permuton"))
        .args(["count", "--pattern", "21", "--perm", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"3 1 2\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("2 of 3"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let f = Files::new();
    let p = f.write("p.txt", "1 4 3 2");
    let long = run(&["count", "--pattern", "12345", "--perm", &p]);
    assert_eq!(code(&long), 3);
    assert!(String::from_utf8_lossy(&long.stderr).starts_with("error:"));
    assert_eq!(code(&run(&["count", "--pattern", "1x2", "--perm", &p])), 2);
    assert_eq!(
        code(&run(&["count", "--pattern", "12", "--perm", &f.path("missing.txt")])),
        2
    );
    assert_eq!(
        code(&run(&[
            "count",
            "--pattern",
            "12",
            "--perm",
            &f.write("bad.txt", "1 1 2")
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn certification_gate() {
    let out = run(&[
        "certify",
        "--pattern",
        "123",
        "--model",
        model("stripes2.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("CERTIFIED"));

    let out = run(&[
        "certify",
        "--pattern",
        "21",
        "--model",
        model("identity.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out = run(&[
        "certify",
        "--pattern",
        "123",
        "--model",
        model("nonavoiding.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["certified"], false);
}

#[test]
fn single_shot_removal() {
    let f = Files::new();
    let p = f.write("pi.txt", "2 1 3");
    let m = model("identity.json");
    let out = run(&[
        "removal",
        "--pattern",
        "21",
        "--perm",
        &p,
        "--model",
        m.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("output: 1 2 3\n"), "{text}");
    assert!(text.contains("cost: 2\n"), "{text}");

    let out = run(&[
        "removal",
        "--pattern",
        "21",
        "--perm",
        &p,
        "--model",
        m.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["output"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["cost"], 2);
    assert_eq!(v["normalized_cost"], "2/9");
    assert_eq!(v["avoidance_verified"], true);
}

#[test]
fn removal_experiment_csv() {
    let f = Files::new();
    let m = model("stripes2.json");
    let args = [
        "removal",
        "--pattern",
        "123",
        "--model",
        m.to_str().unwrap(),
        "--n",
        "200",
        "--rho",
        "0.1",
        "--seeds",
        "5",
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,rho,seed,density,cost,normalized_cost,d_interval,avoidance_verified"
    );
    assert_eq!(lines.len(), 6);
    for (i, row) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert_eq!(&cols[..3], &["200", "0.1", &i.to_string()]);
        assert_eq!(cols[7], "true");
    }

    let csv = f.path("rows.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", &csv]);
    let out = run(&with_out);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn removal_refuses_uncertified_models() {
    let f = Files::new();
    let csv = f.path("rows.csv");
    let m = model("nonavoiding.json");
    let out = run(&[
        "removal",
        "--pattern",
        "123",
        "--model",
        m.to_str().unwrap(),
        "--n",
        "50",
        "--out",
        &csv,
    ]);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
    assert!(!Path::new(&csv).exists());
}

#[test]
fn samples_parse_back() {
    let m = model("stripes2.json");
    let out = run(&["sample", "--model", m.to_str().unwrap(), "--n", "40", "--seed", "3"]);
    let p = parse_permutation(&stdout(&out)).unwrap();
    assert_eq!(p.order(), 40);

    let out = run(&[
        "sample",
        "--model",
        m.to_str().unwrap(),
        "--n",
        "40",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    let v: Vec<usize> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(Permutation::new(v).unwrap(), p);
}

#[test]
fn zigzag_output_is_a_model_file() {
    let out = run(&["zigzag", "--pattern", "2413"]);
    let m = Permuton::from_json(&stdout(&out)).unwrap();
    let expected = build_zigzag(&Permutation::new(vec![2, 4, 1, 3]).unwrap()).unwrap();
    assert_eq!(m, Permuton::Tracks(expected.clone()));

    let out = run(&["zigzag", "--pattern", "2413", "--transpose"]);
    let m = Permuton::from_json(&stdout(&out)).unwrap();
    assert_eq!(m, Permuton::Tracks(expected.transpose().unwrap()));
}

#[test]
fn distances_between_model_files() {
    let f = Files::new();
    let a = f.write("a.json", r#"{"type":"step","perm":[1,2]}"#);
    let b = f.write("b.json", r#"{"type":"step","perm":[2,1]}"#);
    for method in ["interval", "cut"] {
        let out = run(&["distance", "--a", &a, "--b", &b, "--method", method, "--format", "json"]);
        assert_eq!(code(&out), 0);
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["value"], "1/2", "{method}");
        let out = run(&["distance", "--a", &a, "--b", &a, "--method", method]);
        assert!(stdout(&out).starts_with("0/1"), "{method}");
    }
    let u = model("uniform.json");
    let out = run(&["distance", "--a", &a, "--b", u.to_str().unwrap(), "--method", "cut"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn model_diagnostics() {
    let out = run(&["marginals", "--model", model("stripes2.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("max deviation: 0/1"));

    let out = run(&[
        "molecules",
        "--model",
        model("zigzag_id3.json").to_str().unwrap(),
        "--direction",
        "horizontal",
    ]);
    assert!(stdout(&out).starts_with("max atoms: 2\n"));

    let out = run(&["lp", "--alpha", "1/4:1/2,3/4:1/2", "--beta", "1/2:1"]);
    assert_eq!(stdout(&out).trim(), "1/4");

    let out = run(&["digitswap-check", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["occurrences"], "0");
    assert_eq!(v["tuples"], "635376");
    assert_eq!(v["quotients_ok"], true);
    assert_eq!(v["involution"], true);
}

#[test]
fn stanley_wilf_counts() {
    let m = model("stripes2.json");
    let out = run(&[
        "swbound",
        "--model",
        m.to_str().unwrap(),
        "--n",
        "6",
        "--pattern",
        "123",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_avoiding"], true);
    assert_eq!(v["per_choice_total"], 64);
}
