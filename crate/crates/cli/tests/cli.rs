use std::fs;
use std::process::{Command, Output};

fn robinwall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robinwall")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn spectrum_sweep_is_monotone_in_field() {
    let out = robinwall(&["spectrum", "--bc", "robin-", "--n", "0-2", "--field-range", "0.01:100:7:log"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "bc,n,field,energy,error");
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 21);
    for level in rows.chunks(7) {
        assert!(level.windows(2).all(|w| w[0].1 < w[1].1));
    }
    // Levels are ordered at every field.
    for i in 0..7 {
        assert!(rows[i].1 < rows[7 + i].1 && rows[7 + i].1 < rows[14 + i].1);
    }
}

#[test]
fn table1_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table1.json");
    let out = robinwall(&["table1", "--out", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "robinwall/1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["bc"], "dirichlet");
    assert!((rows[0]["CGL_xCGL_k"].as_f64().unwrap() - 1.4255).abs() < 5e-4);
    assert_eq!(rows[6]["bc"], "neumann");
    assert!((rows[6]["CGL_xCGL_k"].as_f64().unwrap() - 2.0299).abs() < 5e-4);
}

#[test]
fn entropies_meet_at_the_crossing_field() {
    let out = robinwall(&["measures", "--n", "0,1", "--field", "1.45", "--quantities", "entropy"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let st: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert!((st[0] - st[1]).abs() < 0.02, "{st:?}");
}

#[test]
fn output_is_deterministic() {
    let args = ["measures", "--bc", "robin+", "--n", "0-1", "--field-range", "0.5:5:4", "--quantities", "fisher,cgl"];
    assert_eq!(robinwall(&args).stdout, robinwall(&args).stdout);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tol.cfg");
    fs::write(&cfg, "abs_tol = 1e-9\nrel_tol = 1e-9\n").unwrap();
    let out = robinwall(&["measures", "--field", "2", "--config", cfg.to_str().unwrap(), "--tol-abs", "1e-11"]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(&cfg, "nonsense = 3\n").unwrap();
    let out = robinwall(&["measures", "--field", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(robinwall(&["--help"]).status.code(), Some(0));
    assert_eq!(robinwall(&["bogus"]).status.code(), Some(1));
    assert_eq!(robinwall(&["spectrum", "--bc", "sticky", "--field", "1"]).status.code(), Some(1));
    assert_eq!(robinwall(&["spectrum", "--field", "1", "--tol-abs", "-1"]).status.code(), Some(1));
    assert_eq!(robinwall(&["spectrum", "--field-range", "0:1:3"]).status.code(), Some(1));
    let failed = robinwall(&["spectrum", "--bc", "dirichlet", "--field", "-1"]);
    assert_eq!(failed.status.code(), Some(2));
    assert!(stdout(&failed).contains("domain error"));
}

#[test]
fn oracle_check_and_units() {
    let out = robinwall(&["oracle-check", "--bc", "robin+", "--field", "2", "--levels", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 5);
    let out = robinwall(&["units", "--lambda", "1e-9", "--kind", "field", "--value", "1", "--to-physical"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v / 3.81e7 - 1.0).abs() < 1e-3);
    assert_eq!(robinwall(&["units", "--kind", "energy", "--value", "1"]).status.code(), Some(1));
}

#[test]
fn state_samples_cover_the_wall() {
    let out = robinwall(&["state", "--bc", "neumann", "--n", "1", "--field", "3", "--points", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[3].parse::<f64>().unwrap(), 0.0);
    let out = robinwall(&["state", "--field", "1", "--momentum", "--points", "5", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn dipole_matrix_is_symmetric() {
    let out = robinwall(&["polarization", "--bc", "neumann", "--field", "1", "--matrix", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let m: Vec<Vec<f64>> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(3).take(3).map(|v| v.parse().unwrap()).collect())
        .collect();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}
