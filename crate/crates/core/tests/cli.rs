use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gauge-workbench"));
    c.env_remove("GAUGE_WORKBENCH_CONSTANTS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_values_and_domain_errors() {
    let o = run(&["compute", "--x", "0.1875", "--quantity", "q"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("-7.853655422"), "{}", stdout(&o));

    let o = run(&["compute", "--x", "0.35", "--quantity", "two_color_q"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("-62.659473633"), "{}", stdout(&o));

    let o = run(&["compute", "--x", "0.1875", "--quantity", "beta"]);
    assert!(stdout(&o).starts_with("3.681106") && stdout(&o).contains("CODATA-2018"), "{}", stdout(&o));

    let o = run(&["compute", "--x", "0.5", "--quantity", "q"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).contains("domain"));

    assert_eq!(run(&["compute", "--x", "-0.1", "--quantity", "p"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--x", "0.1", "--quantity", "nope"]).status.code(), Some(2));
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let o = run(&["scan", "--x-min", "0.15", "--x-max", "0.22", "--steps", "8", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "x,f1,f2,delta");
    assert_eq!(lines.len(), 9);
    let xs: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
    for l in &lines[1..] {
        for field in l.split(',') {
            let (mantissa, _) = field.split_once('e').expect("scientific notation");
            assert_eq!(mantissa.trim_start_matches('-').len(), 13, "{field}");
        }
    }
}

#[test]
fn scan_delta_column_and_extra_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let o = run(&[
        "scan",
        "--x-min",
        "0.01",
        "--x-max",
        "0.37",
        "--steps",
        "200",
        "--out",
        path_str(&out),
        "--columns",
        "beta,q",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("CODATA-2018"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,f1,f2,delta,q,beta"));
    let slope = 512.0 * std::f64::consts::SQRT_2 / 729.0;
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert!((r[3] + slope * (r[0] - 0.1875)).abs() < 1e-9);
    }
    let flips = rows.windows(2).filter(|w| w[0][3].signum() != w[1][3].signum()).count();
    assert_eq!(flips, 1);
}

#[test]
fn scan_errors_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let o = run(&["scan", "--x-min", "0.2", "--x-max", "0.4", "--steps", "8", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = run(&["scan", "--x-min", "0.1", "--x-max", "0.2", "--steps", "1", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let unwritable = dir.path().join("missing/dir/out.csv");
    let o = run(&["scan", "--x-min", "0.1", "--x-max", "0.2", "--steps", "4", "--out", path_str(&unwritable)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = run(&[
            "scan",
            "--x-min",
            "0.001",
            "--x-max",
            "0.37",
            "--steps",
            "97",
            "--out",
            path_str(p),
            "--columns",
            "q,p,beta",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (ja, jb) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&ja, &jb] {
        assert_eq!(run(&["verify", "--out", path_str(p)]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&ja).unwrap(), std::fs::read(&jb).unwrap());
}

#[test]
fn verify_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--profile", "strict", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("overall: PASS"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc["schema_version"].is_string());
    assert_eq!(doc["constants_provenance"], "CODATA-2018");
    assert_eq!(doc["overall_pass"], true);
    assert_eq!(doc["variant_selection"]["chosen"], "derived");
    let names: Vec<_> = doc["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["master_identity", "resonance_pq", "ac_stark", "two_color", "delta_linear", "one_photon_ratio"]);
    for c in doc["checks"].as_array().unwrap() {
        for key in ["tolerance", "max_residual", "passed"] {
            assert!(!c[key].is_null(), "{key}");
        }
    }
    for c in doc["constants"].as_array().unwrap() {
        for key in ["name", "computed", "reference", "relative_error", "provenance"] {
            assert!(!c[key].is_null(), "{key}");
        }
    }

    let o = run(&["verify", "--profile", "oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_negative_control_and_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--formula", "printed-quadratic", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL master_identity")));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["overall_pass"], false);
    assert_eq!(doc["checks"][0]["passed"], false);

    assert_eq!(run(&["verify", "--grid-points", "10"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--r-max", "5"]).status.code(), Some(2));
}

#[test]
fn constants_file_and_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("constants.toml");
    std::fs::write(&file, "alpha = 7.2973525664e-3\nprovenance_tag = \"CODATA-2014\"\n").unwrap();

    let o = run(&["compute", "--x", "0.1875", "--quantity", "beta", "--constants-file", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("CODATA-2014"));

    let o = bin()
        .args(["compute", "--x", "0.1875", "--quantity", "beta"])
        .env("GAUGE_WORKBENCH_CONSTANTS", &file)
        .output()
        .unwrap();
    assert!(stdout(&o).contains("CODATA-2014"), "{}", stdout(&o));

    let missing = dir.path().join("absent.toml");
    let o = run(&["compute", "--x", "0.1875", "--quantity", "beta", "--constants-file", path_str(&missing)]);
    assert_eq!(o.status.code(), Some(3));

    std::fs::write(&file, "hbar = \"not a number\"\n").unwrap();
    let o = run(&["verify", "--constants-file", path_str(&file)]);
    assert_eq!(o.status.code(), Some(2));
}
