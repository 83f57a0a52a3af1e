use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qsb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsb"))
        .args(args)
        .env_remove("QSB_THREADS")
        .output()
        .expect("qsb runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn coeffs(v: &Value) -> Vec<Vec<f64>> {
    v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            c.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn decompose_fourfold_splits_q_times_one_plus_e1() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.json");
    fs::write(&input, r#"{"coeffs": [[0,0,0,0],[1,1,0,0]]}"#).unwrap();
    let out = qsb(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["classification"], "neither");
    let want = [[0.0, 1.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]];
    for (l, w) in want.iter().enumerate() {
        let c = coeffs(&read_json(&dir.path().join(format!("s.f{l}.json"))));
        assert_eq!(c[0], vec![w[0], 0.0, 0.0, 0.0]);
        assert_eq!(c[1], vec![w[1], 0.0, 0.0, 0.0]);
    }
}

#[test]
fn decompose_intrinsic_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    fs::write(&input, "[[1,0,0,0],[0.5,0,0,0],[-2,0,0,0]]").unwrap();
    let out = qsb(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["classification"], "intrinsic");
    assert_eq!(
        coeffs(&read_json(&dir.path().join("f.f0.json")))[2],
        vec![-2.0, 0.0, 0.0, 0.0]
    );
    for l in 1..4 {
        let c = coeffs(&read_json(&dir.path().join(format!("f.f{l}.json"))));
        assert!(c.iter().flatten().all(|&x| x == 0.0));
    }
}

#[test]
fn decompose_c_pair_of_z_squared_plus_iz() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h.json");
    fs::write(&input, "[[0,0,0,0],[0,1,0,0],[1,0,0,0]]").unwrap();
    let out = qsb(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--mode",
        "c-pair",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let f1 = coeffs(&read_json(&dir.path().join("h.f1.json")));
    let f2 = coeffs(&read_json(&dir.path().join("h.f2.json")));
    assert_eq!(f1[2], vec![1.0, 0.0, 0.0, 0.0]);
    assert_eq!(f1[1], vec![0.0; 4]);
    assert_eq!(f2[1], vec![1.0, 0.0, 0.0, 0.0]);
    assert_eq!(f2[2], vec![0.0; 4]);
}

#[test]
fn decompose_rejects_quaternion_valued_input_in_complex_mode() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "[[0,1,1,0]]").unwrap();
    let out = qsb(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--mode",
        "c-anti",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slice plane"));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{not json").unwrap();
    assert_eq!(
        qsb(&["restrict", "--input", input.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qsb(&["verify", "--suite", "nothing"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qsb(&["kernel", "--kind", "second", "--frame", "j=e1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qsb(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn extend_then_restrict_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h.json");
    fs::write(&input, "[[1,2,0,0],[0,-1,0,0],[0.5,0.25,0,0]]").unwrap();
    let ext = dir.path().join("e.json");
    let out = qsb(&[
        "extend",
        "--input",
        input.to_str().unwrap(),
        "--out",
        ext.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let back = qsb(&["restrict", "--input", ext.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&back)).unwrap();
    assert_eq!(
        coeffs(&v),
        vec![
            vec![1.0, 2.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.5, 0.25, 0.0, 0.0]
        ]
    );
}

#[test]
fn extend_evaluates_at_points() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("z.json");
    fs::write(&input, "[[0,0,0,0],[1,0,0,0]]").unwrap();
    let out = qsb(&[
        "extend",
        "--input",
        input.to_str().unwrap(),
        "--at",
        "0.1,0.2,0.3,0.4",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let value: Vec<f64> = v[0]["value"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (a, b) in value.iter().zip([0.1, 0.2, 0.3, 0.4]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn second_kind_against_zero_is_one_over_pi() {
    let out = qsb(&["kernel", "--kind", "second", "--frame", "i=0,1,1"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert!(rows.len() > 5);
    for row in rows {
        assert!((row[8] - 1.0 / PI).abs() < 1e-15);
        assert!(row[9..12].iter().all(|&x| x == 0.0));
    }
}

#[test]
fn second_kind_components_sum_to_kernel() {
    let out = qsb(&[
        "kernel",
        "--kind",
        "second",
        "--components",
        "--r",
        "0.1,0.2,-0.3,0.1",
        "--grid",
        "3",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("q_w,q_x,q_y,q_z,r_w,r_x,r_y,r_z,k_w,k_x,k_y,k_z,k0_w"));
    for row in csv_rows(&text) {
        let k0: [f64; 4] = row[12..16].try_into().unwrap();
        let k1: [f64; 4] = row[16..20].try_into().unwrap();
        let k2: [f64; 4] = row[20..24].try_into().unwrap();
        let k3: [f64; 4] = row[24..28].try_into().unwrap();
        // K = K0 + K1 e1 + K2 e2 + K3 e3 for the standard frame
        let mul = |a: [f64; 4], b: [f64; 4]| {
            [
                a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
            ]
        };
        let (t1, t2, t3) = (
            mul(k1, [0.0, 1.0, 0.0, 0.0]),
            mul(k2, [0.0, 0.0, 1.0, 0.0]),
            mul(k3, [0.0, 0.0, 0.0, 1.0]),
        );
        for c in 0..4 {
            assert!((k0[c] + t1[c] + t2[c] + t3[c] - row[8 + c]).abs() < 1e-14);
        }
    }
}

#[test]
fn complex_kernel_row_at_zero() {
    let out = qsb(&[
        "kernel",
        "--kind",
        "complex",
        "--q",
        "0,0,0,0",
        "--components",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("z_re,z_im,zeta_re,zeta_im,k_re,k_im,r_re,r_im,i_re,i_im"));
    for row in csv_rows(&text) {
        assert!((row[4] - 1.0 / PI).abs() < 1e-15 && row[5].abs() < 1e-15);
        assert!((row[6] - 1.0 / PI).abs() < 1e-15 && row[8].abs() < 1e-15);
    }
}

#[test]
fn complex_numeric_kernel_matches_truncated_series() {
    let out = qsb(&[
        "kernel",
        "--kind",
        "complex",
        "--truncation",
        "4",
        "--q",
        "0.2,0.1,0,0",
        "--r",
        "-0.3,0.4,0,0",
    ]);
    let row = &csv_rows(&stdout(&out))[0];
    let (z, w) = ((0.2f64, 0.1f64), (-0.3f64, -0.4f64));
    let zw = (z.0 * w.0 - z.1 * w.1, z.0 * w.1 + z.1 * w.0);
    let (mut p, mut s) = ((1.0, 0.0), (0.0, 0.0));
    for n in 0..=4 {
        let c = (n + 1) as f64 / PI;
        s = (s.0 + c * p.0, s.1 + c * p.1);
        p = (p.0 * zw.0 - p.1 * zw.1, p.0 * zw.1 + p.1 * zw.0);
    }
    assert!((row[4] - s.0).abs() < 1e-13 && (row[5] - s.1).abs() < 1e-13);
}

#[test]
fn first_kind_hand_value_and_saved_gram() {
    let dir = tempfile::tempdir().unwrap();
    let gram = dir.path().join("g.json");
    let out = qsb(&[
        "kernel",
        "--kind",
        "first",
        "--truncation",
        "2",
        "--q",
        "0,0,0,0",
        "--r",
        "0,0,0,0",
        "--save-gram",
        gram.to_str().unwrap(),
    ]);
    let row = &csv_rows(&stdout(&out))[0];
    assert!((row[8] - 18.0 / (7.0 * PI * PI)).abs() < 1e-13);
    let saved = read_json(&gram);
    assert_eq!(saved["N"], 2);
    let again = qsb(&[
        "kernel",
        "--kind",
        "first",
        "--gram",
        gram.to_str().unwrap(),
        "--q",
        "0,0,0,0",
        "--r",
        "0,0,0,0",
    ]);
    assert_eq!(stdout(&again), stdout(&out));
}

#[test]
fn kernel_json_format_and_pairs_file() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("p.json");
    fs::write(
        &pairs,
        "[[[0,0,0,0],[0.5,0,0,0]], [[0.2,0,0.1,0],[0,0,0,0]]]",
    )
    .unwrap();
    let out = qsb(&[
        "kernel",
        "--kind",
        "second",
        "--input",
        pairs.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 12);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn kernel_near_boundary_is_refused() {
    let out = qsb(&[
        "kernel",
        "--kind",
        "second",
        "--q",
        "0.99,0,0,0",
        "--r",
        "0.98,0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"));
}

#[test]
fn rule_export_weights_sum_to_area() {
    let out = qsb(&["rule", "--domain", "disk", "--orders", "4,8"]);
    let text = stdout(&out);
    assert!(text.starts_with("x,y,i1,i2,i3,weight"));
    let total: f64 = csv_rows(&text).iter().map(|r| r[5]).sum();
    assert!((total - PI).abs() < 1e-13);
    let out = qsb(&["rule", "--domain", "ball", "--degree", "4"]);
    let total: f64 = csv_rows(&stdout(&out))
        .iter()
        .map(|r| *r.last().unwrap())
        .sum();
    assert!((total - PI * PI / 2.0).abs() < 1e-12);
    assert_eq!(
        qsb(&["rule", "--domain", "disk", "--orders", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_all_at_degree_five_passes() {
    let out = qsb(&["verify", "--suite", "all", "--degree", "5", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v.get("wall_time_seconds").is_none());
    for r in v["records"].as_array().unwrap() {
        let tol = r["tolerance"].as_f64().unwrap();
        assert!(tol == 1e-8 || tol == 0.0, "{tol}");
        assert!(r["statement"].as_str().is_some_and(|s| !s.is_empty()));
    }
}

#[test]
fn verify_complex_at_degree_zero() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = qsb(&[
        "verify",
        "--suite",
        "complex",
        "--degree",
        "0",
        "--timing",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v = read_json(&report);
    assert_eq!(v["suite"], "complex");
    assert!(v["wall_time_seconds"].as_f64().is_some());
}

#[test]
fn verify_mismatched_truncation_fails_consistency() {
    let out = qsb(&[
        "verify",
        "--suite",
        "bergman",
        "--truncation",
        "2",
        "--mismatch-truncation",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], false);
    let failing: Vec<&str> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["kernel-consistency"]);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsb"))
        .args(["verify", "--suite", "complex", "--degree", "0"])
        .env("QSB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
