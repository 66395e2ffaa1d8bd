use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn subspec(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subspec"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SUBSPEC_SEED", "0")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn region_affine_is_left_halfplane() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["region", "--flow", "affine", "--p", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("region.json"));
    assert_eq!(v["kind"], "halfplane");
    assert_eq!(v["params"]["c"], 0.5);
    assert_eq!(v["params"]["side"], "left");
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stdout, v);
    let boundary = csv_rows(&dir.path().join("region_boundary.csv"));
    assert_eq!(boundary.len(), 256);
    assert!(boundary.iter().all(|r| f(&r[0]) == 0.5));
}

#[test]
fn region_hyperbolic_annulus_and_parabolic_circle() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["region", "--flow", "hyp-auto", "--p", "2", "--t", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("region.json"));
    assert_eq!(v["kind"], "annulus");
    let r_in = v["params"]["r_in"].as_f64().unwrap();
    let r_out = v["params"]["r_out"].as_f64().unwrap();
    assert!((r_in - (-0.5f64).exp()).abs() < 1e-15);
    assert!((r_out - 0.5f64.exp()).abs() < 1e-15);

    let o = subspec(&["region", "--flow", "para-auto", "--p", "2", "--t", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("region.json"));
    assert_eq!(v["kind"], "circle");
    assert_eq!(v["params"]["radius"], 1.0);
}

fn cesaro_grid_nearest_one(dir: &Path) -> Vec<String> {
    let o = subspec(
        &["pseudospectrum", "--operator", "cesaro", "--N", "100", "--box=-0.5,2.5,-1.5,1.5", "--res", "200,200"],
        dir,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.join("grid.csv"));
    assert_eq!(rows.len(), 40000);
    rows.into_iter()
        .min_by(|a, b| {
            let d = |r: &Vec<String>| (f(&r[0]) - 1.0).hypot(f(&r[1]));
            d(a).total_cmp(&d(b))
        })
        .unwrap()
}

#[test]
fn pseudospectrum_cesaro_grid() {
    let dir = tempfile::tempdir().unwrap();
    let nearest = cesaro_grid_nearest_one(dir.path());
    // Nearest point is x = -0.5 + 3*99/199, y = -1.5 + 3*99/199; dense SVD of
    // the 101x101 compression there gives 1.0198767966990185e-3.
    assert!((f(&nearest[0]) - (-0.5 + 3.0 * 99.0 / 199.0)).abs() < 1e-15);
    assert!((f(&nearest[2]) - 1.0198767966990185e-3).abs() < 1e-12);
    let svg = fs::read_to_string(dir.path().join("contour.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    assert_eq!(svg.matches("data-eps").count(), 3);
}

#[test]
fn pseudospectrum_calibration_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let nearest = cesaro_grid_nearest_one(dir.path());
    let sigma = f(&nearest[2]);
    assert!(sigma <= 1e-3, "sigma_min at grid point nearest 1 is {sigma:e}, above 1e-3");
}

#[test]
fn pseudospectrum_identity_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(
        &["pseudospectrum", "--operator", "identity", "--N", "10", "--box=-1,1,-1,1", "--res", "3,3"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("grid.csv"));
    let origin = rows.iter().find(|r| f(&r[0]) == 0.0 && f(&r[1]) == 0.0).unwrap();
    assert!((f(&origin[2]) - 1.0).abs() < 1e-14);
}

#[test]
fn subordinate_affine_exponential_density() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["subordinate", "--flow", "affine", "--measure", "exp:1", "--N", "8"], dir.path());
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
    assert!(text.starts_with("m,k,re,im\n"));
    let rows = csv_rows(&dir.path().join("matrix.csv"));
    assert_eq!(rows.len(), 81);
    for (idx, r) in rows.iter().enumerate() {
        assert_eq!((r[0].parse::<usize>().unwrap(), r[1].parse::<usize>().unwrap()), (idx / 9, idx % 9));
    }
    let e05 = rows.iter().find(|r| r[0] == "0" && r[1] == "5").unwrap();
    assert!((f(&e05[2]) - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn subordinate_dirac_at_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["subordinate", "--flow", "hyp-auto", "--measure", "dirac:0", "--N", "6"], dir.path());
    assert_eq!(code(&o), 0);
    for r in csv_rows(&dir.path().join("matrix.csv")) {
        let want = if r[0] == r[1] { 1.0 } else { 0.0 };
        assert!((f(&r[2]) - want).abs() < 1e-14 && f(&r[3]).abs() < 1e-14, "{r:?}");
    }
}

#[test]
fn subordinate_inadmissible_measure_names_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["subordinate", "--flow", "affine", "--measure", "exp:-1", "--N", "4"], dir.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not admissible") && err.contains("margin"), "{err}");
}

#[test]
fn localradius_matches_power_norm_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["localradius", "--operator", "cesaro", "--N", "1024", "--x", "e0", "--n-max", "30"], dir.path());
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("trace.csv"));
    assert_eq!(rows.len(), 30);
    let oracle = subspec_cli::suites::cesaro_power_norms(1024, 30);
    for (n, r) in rows.iter().enumerate() {
        let n = n + 1;
        assert_eq!(r[0], n.to_string());
        let exact = oracle[n].powf(1.0 / n as f64);
        assert!((f(&r[1]) - exact).abs() <= 1e-10 * exact, "n = {n}");
    }
    // Increasing up to the truncation knee, which sits at n = 4 for N = 1024.
    assert!((1..4).all(|i| f(&rows[i][1]) > f(&rows[i - 1][1])));
}

#[test]
fn verify_semiflow_identities_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["verify", "semiflow-identities"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("report-semiflow-identities.json"));
    assert_eq!(report["status"], "pass");
    let runtime = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "runtime").unwrap();
    assert!(runtime["measured"].as_f64().unwrap() <= 5.0);
}

#[test]
fn verify_cesaro_transpose_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["verify", "cesaro-transpose", "--N", "64"], dir.path());
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["suite"], "cesaro-transpose");
    let check = &report["checks"][0];
    assert_eq!(check["name"], "max-entry-error");
    assert!(check["measured"].as_f64().unwrap() <= 1e-10);
    assert_eq!(check["tolerance"], 1e-10);
    let artifacts = report["artifacts"].as_array().unwrap();
    assert!(artifacts[0].as_str().unwrap().ends_with("report-cesaro-transpose.json"));
}

#[test]
fn verify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("strict.json");
    fs::write(&config, r#"{"N": 16, "tolerances": {"max-entry-error": -1}}"#).unwrap();
    let o = subspec(&["verify", "cesaro-transpose", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "fail");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "cesaro-transpose", "--N", "4097"][..],
        &["verify", "everything"],
        &["region", "--flow", "spiral"],
        &["pseudospectrum", "--res", "401,10"],
        &["region", "--p", "0.5"],
        &["subordinate", "--measure", "beta:1"],
    ] {
        let o = subspec(args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"N": 8, "colour": "red"}"#).unwrap();
    let o = subspec(&["region", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    fs::write(
        &config,
        r#"{"flow": {"kind": "affine", "time_scale": 1}, "N": 4,
            "measure": {"density": {"kind": "exponential", "rate": [1, 0]}}}"#,
    )
    .unwrap();
    let o = subspec(&["subordinate", "--config", config.to_str().unwrap(), "--N", "3"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&dir.path().join("matrix.csv")).len(), 16);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for dir in &runs {
        let p = dir.path();
        assert_eq!(code(&subspec(&["region", "--flow", "hyp-auto", "--p", "2"], p)), 0);
        assert_eq!(
            code(&subspec(&["pseudospectrum", "--operator", "composition", "--flow", "affine", "--N", "20", "--res", "40,30"], p)),
            0
        );
        assert_eq!(code(&subspec(&["subordinate", "--flow", "para-auto", "--measure", "gamma:-0.5,2", "--N", "6"], p)), 0);
        assert_eq!(code(&subspec(&["localradius", "--N", "64", "--n-max", "10"], p)), 0);
    }
    for name in ["region.json", "region_boundary.csv", "grid.csv", "contour.svg", "matrix.csv", "trace.csv"] {
        let a = fs::read(runs[0].path().join(name)).unwrap();
        let b = fs::read(runs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn report_schema_is_stable_apart_from_runtimes() {
    let strip = |mut v: Value| {
        for c in v["checks"].as_array_mut().unwrap() {
            c["runtime_s"] = Value::Null;
            if c["name"] == "runtime" {
                c["measured"] = Value::Null;
            }
        }
        v["artifacts"] = Value::Null;
        v
    };
    let reports: Vec<Value> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let o = subspec(&["verify", "measure-regularity"], dir.path());
            assert_eq!(code(&o), 0);
            strip(serde_json::from_slice(&o.stdout).unwrap())
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    let keys: Vec<&String> = reports[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["artifacts", "checks", "status", "suite"]);
}

#[test]
fn verify_radius_formula_affine() {
    let dir = tempfile::tempdir().unwrap();
    let o = subspec(&["verify", "radius-formula", "--flow", "affine", "--p", "2", "--t", "1"], dir.path());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let check = &report["checks"][0];
    assert_eq!(check["name"], "pseudospectral-radius");
    let r = check["measured"].as_f64().unwrap();
    let target = 0.5f64.exp();
    assert!(
        code(&o) == 0 && (target - 0.15..=target + 0.05).contains(&r),
        "pseudospectral radius {r} outside [{}, {}]",
        target - 0.15,
        target + 0.05
    );
}
