use std::path::Path;
use std::process::{Command, Output};

fn sullivan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sullivan")).args(args).env_remove("SULLIVAN_CACHE_DIR").output().unwrap()
}

fn sullivan_cached(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sullivan")).args(args).env("SULLIVAN_CACHE_DIR", dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn row(args: &[&str]) -> String {
    let mut a = vec!["homology", "--format", "row"];
    a.extend_from_slice(args);
    let o = sullivan(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).trim().to_string()
}

#[test]
fn homology_rows() {
    assert!(row(&["--flavor", "unpar-unen", "-g", "0", "-m", "4"]).starts_with("Z,0,0,Z,0"));
    assert_eq!(row(&["--flavor", "par-unen", "-g", "1", "-m", "1"]).trim_end_matches(",0"), "Z,Z,0,Z,Z");
    assert_eq!(row(&["--flavor", "unpar-unen", "-g", "2", "-m", "1"]).trim_end_matches(",0"), "Z,0,Z,C5,0,Z^2,C3");
}

#[test]
fn csv_columns() {
    let o = sullivan(&["homology", "--flavor", "unpar-unen", "-g", "1", "-m", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "degree,betti,torsion");
    assert_eq!(lines[1], "0,1,");
    assert_eq!(lines[2], "1,0,2");
}

#[test]
fn json_is_versioned_and_keyed() {
    let o = sullivan(&["homology", "--flavor", "unpar-unen", "-g", "0", "-m", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "sullivan.homology/1");
    assert_eq!(v["component"]["flavor"], "unpar-unen");
    assert_eq!(v["component"]["m"], 3);
    assert_eq!(v["homology"][3]["degree"], 3);
    assert_eq!(v["homology"][3]["betti"], 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["homology", "--flavor", "par-enum", "-g", "0", "-m", "3", "--format", "json"];
    let a = sullivan(&args);
    let b = sullivan(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn truncated_output_stops_at_the_exact_range() {
    let o = sullivan(&["homology", "--flavor", "unpar-unen", "-g", "2", "-m", "2", "--max-degree", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 3);
    assert!(text.contains("\n1,0,2\n"));
}

#[test]
fn verify_passes_and_fails_with_exit_codes() {
    let o = sullivan(&["verify", "--flavor", "unpar-unen", "-g", "0", "-m", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "sullivan.verify/1");
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"].as_str().unwrap().starts_with("transfer")));

    let o = sullivan(&["verify", "--flavor", "unpar-enum", "-g", "1", "-m", "3", "--max-degree", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("stabilization essentials"));

    // The splitting along B_2 does not hold at m = 4.
    let o = sullivan(&["verify", "--flavor", "unpar-unen", "-g", "0", "-m", "4", "--format", "row"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("FAIL splitting along B_2"));
}

#[test]
fn budget_and_validation_exit_codes() {
    let o = sullivan(&["homology", "--flavor", "unpar-unen", "-m", "6", "--budget-cells", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let o = sullivan(&["homology", "--flavor", "unpar-unen", "-m", "0"]);
    assert_eq!(o.status.code(), Some(4));
    let o = sullivan(&["classes", "--check", "Omega", "1,3"]);
    assert_eq!(o.status.code(), Some(4));
    let o = sullivan(&["homology", "--flavor", "nonsense", "-m", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["homology", "--flavor", "unpar-unen", "-g", "1", "-m", "2"];
    let first = sullivan_cached(dir.path(), &args);
    assert!(first.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = sullivan_cached(dir.path(), &args);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);

    let file = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("\"flavor\"", "\"flavour\"", 1)).unwrap();
    assert_eq!(sullivan_cached(dir.path(), &args).status.code(), Some(6));
}

#[test]
fn class_certificates() {
    for args in [
        vec!["classes", "--check", "zeta-generates", "4"],
        vec!["classes", "--check", "mu-omega-homologous", "3"],
        vec!["classes", "--check", "Omega", "3,3"],
        vec!["classes", "--check", "Gamma", "2"],
        vec!["classes", "--check", "gamma"],
    ] {
        let o = sullivan(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    }
    let o = sullivan(&["classes", "--check", "Omega", "3,3"]);
    assert!(stdout(&o).contains("1⊗x⊗x⊗x⊗x⊗x⊗x⊗x⊗x⊗x⊗x⊗x"));
    let o = sullivan(&["classes", "--check", "zeta-generates", "3"]);
    assert_eq!(o.status.code(), Some(5));
}
