use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dirichlet-lab"));
    c.env_remove("DIRICHLET_LAB_THREADS");
    c
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_matches_golden_files() {
    let cases: [(&[&str], &str); 9] = [
        (&["--help"], "help.txt"),
        (&["norm", "--help"], "norm.txt"),
        (&["approximant", "--help"], "approximant.txt"),
        (&["decay", "--help"], "decay.txt"),
        (&["dilate", "--help"], "dilate.txt"),
        (&["cauchy", "--help"], "cauchy.txt"),
        (&["energy", "--help"], "energy.txt"),
        (&["certificate", "--help"], "certificate.txt"),
        (&["verify", "--help"], "verify.txt"),
    ];
    for (args, file) in cases {
        let o = run(args);
        assert!(o.status.success());
        let want = std::fs::read_to_string(data("golden").join(file)).unwrap();
        assert_eq!(stdout(&o), want, "{file} is stale");
    }
}

#[test]
fn norm_of_one_minus_z1() {
    let f = data("data/one_minus_z1.json");
    let o = run(&["norm", "--n", "2", "--alpha", "0", "--poly", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.5");
}

#[test]
fn decay_csv_has_the_documented_columns() {
    let o = run(&["decay", "--n", "2", "--alpha", "1", "--model-m", "1", "--orders", "2:30"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,dist_sq,fitted_running_slope"));
    assert_eq!(lines.count(), 29);
    let fit = String::from_utf8(o.stderr).unwrap();
    let json: serde_json::Value = serde_json::from_str(fit.trim().trim_start_matches("fit: ")).unwrap();
    let slope = json["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.2, "slope {slope}");
}

#[test]
fn dilate_csv_columns() {
    let o = run(&["dilate", "--n", "3", "--alpha", "2", "--model-m", "2", "--r-grid", "0.5,0.9,0.99,0.999"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("r,one_minus_r,norm_sq\n0.5,0.5,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let path = dir.path().join(format!("out{i}.csv"));
        let o = bin()
            .env("DIRICHLET_LAB_THREADS", threads)
            .args(["norm", "--n", "2", "--alpha", "0", "--model-m", "2", "--samples", "50000", "--seed", "7"])
            .args(["--format", "csv", "--output", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let again = run(&["energy", "--n", "2", "--alpha", "1.5", "--model-m", "2", "--samples", "30000", "--seed", "3"]);
    let once = run(&["energy", "--n", "2", "--alpha", "1.5", "--model-m", "2", "--samples", "30000", "--seed", "3"]);
    assert_eq!(again.stdout, once.stdout);
}

#[test]
fn json_outputs_parse() {
    let o = run(&["certificate", "--n", "2", "--alpha", "2.25", "--model-m", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "non_cyclic");
    let o = run(&["cauchy", "--n", "2", "--alpha", "1.75", "--model-m", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"]["verdict"], "diverges");
    let o = run(&["approximant", "--n", "2", "--alpha", "0", "--model-m", "1", "--order", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["dist_sq"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["norm", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["decay", "--n", "2", "--alpha", "0", "--model-m", "1", "--orders", "5:2"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "terms": [{"k": [1], "re": 1, "im": 0}]}"#).unwrap();
    assert_eq!(run(&["norm", "--n", "2", "--alpha", "0", "--poly", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["dilate", "--n", "2", "--alpha", "0", "--model-m", "3"]).status.code(), Some(3));
    assert_eq!(run(&["energy", "--n", "2", "--alpha", "2.5", "--model-m", "2"]).status.code(), Some(3));
    let o = bin().env("DIRICHLET_LAB_THREADS", "zero").args(["verify", "--quick"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let o = run(&["verify", "--quick"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.contains(" passed, 0 failed"));
}
