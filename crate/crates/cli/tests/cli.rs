//! Golden tests for the command-line contract: exit codes, outputs, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projbill"))
        .args(args)
        .env("PROJBILL_OUT", dir)
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn caustics_cubic_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["caustics", "-n", "3", "-a", "2", "-b", "1", "--check-poncelet"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["result"]["polynomial"], "X^2 + 12X - 12");
    // Roots of X² + 12X − 12 are −6 ± 4√3.
    let mut re: Vec<f64> = s["result"]["roots"].as_array().unwrap().iter().map(|r| r["re"].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    let r3 = 3f64.sqrt();
    assert!((re[0] - (-6.0 - 4.0 * r3)).abs() < 1e-12);
    assert!((re[1] - (-6.0 + 4.0 * r3)).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("caustics.csv")).unwrap();
    assert!(csv.starts_with("re,im,multiplicity,class\n"));
}

#[test]
fn caustics_quartic_closed_form_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["caustics", "-n", "4", "-a", "3", "-b", "1", "--closed-form"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    let vals: Vec<&str> = s["result"]["closed_form"]["values"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(vals, ["-3/2", "3/4", "3/2"]);
}

#[test]
fn caustics_circle_degree() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["caustics", "-n", "5", "-a", "1", "-b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["result"]["degree"], 2);
}

#[test]
fn decimal_input_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["caustics", "-n", "3", "-a", "2.5", "-b", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exactness lost"));
    assert_eq!(summary(&out)["result"]["a"], "5/2");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["caustics", "-n", "2", "-a", "1", "-b", "1"][..],
        &["caustics", "-n", "3", "-a", "0", "-b", "1"],
        &["caustics", "-n", "3", "-a", "1/0", "-b", "1"],
        &["circumcenters", "-a", "-1"],
        &["--geom-tol", "0", "circumcenters"],
        &["chasles", "--signature", "2,1"],
        &["orbit", "no/such/scene.json"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_scene_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"boundaries\": [\n    {\"kind\": \"ellipse\",, }\n  ]\n}\n").unwrap();
    let out = run(dir.path(), &["orbit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column"), "{err}");
}

#[test]
fn unknown_boundary_kind_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"boundaries": [{"kind": "hexagon", "params": {}}]}"#).unwrap();
    let out = run(dir.path(), &["orbit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Extreme eccentricity: the triangular orbits no longer close to 1e-9.
    let out = run(dir.path(), &["circumcenters", "-a", "1e9", "-b", "1", "-N", "20"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn violation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // A closure tolerance below rounding makes every orbit count as open.
    let out = run(dir.path(), &["--closure-tol", "1e-300", "polygon", "right-spherical", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&out);
    assert_eq!(s["ok"], false);
    assert!(!s["violations"].as_array().unwrap().is_empty());
}

#[test]
fn ellipse_orbit_has_constant_joachimsthal_column() {
    let dir = tempfile::tempdir().unwrap();
    let scene = scenes().join("ellipse.json");
    let out = run(dir.path(), &["orbit", scene.to_str().unwrap(), "--steps", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("orbit.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "joachimsthal").expect("joachimsthal column");
    let vals: Vec<f64> = rdr.records().filter_map(|r| r.unwrap()[col].parse().ok()).collect();
    assert!(vals.len() >= 49, "{} values", vals.len());
    let spread = vals.iter().map(|v| (v - vals[0]).abs()).fold(0.0, f64::max);
    assert!(spread < 1e-12, "spread {spread}");
    assert!(dir.path().join("orbit.svg").exists());
}

#[test]
fn right_spherical_scene_has_period_3() {
    let dir = tempfile::tempdir().unwrap();
    let scene = scenes().join("right_spherical.json");
    let out = run(dir.path(), &["orbit", scene.to_str().unwrap(), "--steps", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["result"]["period"], 3);
}

#[test]
fn polygon_kinds_report_expected_k() {
    let dir = tempfile::tempdir().unwrap();
    for (args, k) in [
        (&["polygon", "right-spherical", "--samples", "1000"][..], 3),
        (&["polygon", "cp-quadrilateral", "--samples", "200"], 4),
        (&["polygon", "cp-regular-2m", "--m", "3", "--samples", "200"], 6),
        (&["polygon", "cp-odd-n", "--n", "5", "--samples", "200"], 10),
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let s = summary(&out);
        assert_eq!(s["result"]["k"], k);
        assert_eq!(s["result"]["closed"], s["result"]["samples"]);
    }
}

#[test]
fn analysis_commands_pass_their_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["circumcenters", "-a", "2", "-b", "1", "-N", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["result"]["class"], "ellipse");
    assert!(s["result"]["residual"].as_f64().unwrap() < 1e-8);

    let out = run(dir.path(), &["chasles", "--signature", "1,1", "-a", "2", "-b", "1", "--bounces", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(summary(&out)["result"]["max_drift"].as_f64().unwrap() < 1e-8);

    let out = run(dir.path(), &["permitted", "--ellipsoid", "3,2,1", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["result"]["max_count"], 2);
    assert_eq!(s["result"]["deficient"], 0);
}

#[test]
fn circle_locus_is_degenerate_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["circumcenters", "-a", "1", "-b", "1", "-N", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["result"]["class"], "degenerate");
}

#[test]
fn identical_config_gives_identical_files() {
    let cases: [&[&str]; 4] = [
        &["polygon", "cp-odd-n", "--n", "7", "--samples", "100", "--seed", "9"],
        &["permitted", "--samples", "50", "--seed", "4"],
        &["caustics", "-n", "6", "-a", "3/2", "-b", "1"],
        &["circumcenters", "-N", "40"],
    ];
    for args in cases {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (o1, o2) = (run(d1.path(), args), run(d2.path(), args));
        assert_eq!(o1.status.code(), Some(0), "{args:?}");
        assert_eq!(o1.stdout, o2.stdout);
        let mut names: Vec<_> = std::fs::read_dir(d1.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            let a = std::fs::read(d1.path().join(&n)).unwrap();
            let b = std::fs::read(d2.path().join(&n)).unwrap();
            assert_eq!(a, b, "{args:?}: {n:?} differs");
        }
    }
}

#[test]
fn format_selection_limits_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["circumcenters", "-N", "30", "--format", "svg"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names, ["locus.svg"]);
    let svg = std::fs::read_to_string(dir.path().join("locus.svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="800""#));
}
