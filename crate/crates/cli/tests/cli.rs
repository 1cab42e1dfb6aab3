use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn wentropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wentropy")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wentropy-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn data(file: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(file).to_str().unwrap().to_string()
}

/// Header and rows of a scan CSV, after the version comment.
fn parse_scan(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# wentropy scan v1"));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

#[test]
fn scan_origin_point() {
    let o = wentropy(&["scan", "--example", "1", "--rho", "0", "--x3", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = parse_scan(&stdout(&o));
    assert_eq!(header, ["rho", "x3", "D_paper", "D_corrected", "Dw_wick", "Dw_printed", "gibbs_gap"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], Some(1.0));
    assert_eq!(rows[0][3], Some(0.0));
    assert_eq!(rows[0][4], Some(0.0));
}

#[test]
fn scan_figure_grid() {
    let dir = scratch("grid");
    let out = dir.join("fig.csv");
    let o = wentropy(&["scan", "--example", "1", "--rho", "-0.7:0.7:29", "--x3", "-3:3:31", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = parse_scan(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 899);
    assert!(rows.iter().all(|r| r[3].unwrap() >= 0.0));
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].unwrap(), r[1].unwrap())).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "rows not in (rho, x3) order");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn scan_mode_selection_leaves_columns_empty() {
    let o = wentropy(&["scan", "--example", "2", "--rho", "0.25", "--x3", "1", "--modes", "wick"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = parse_scan(&stdout(&o));
    let r = &rows[0];
    assert!(r[2].is_none() && r[3].is_none() && r[5].is_none());
    assert!(r[4].is_some() && r[6].is_some());
}

#[test]
fn scan_domain_errors_exit_2() {
    let o = wentropy(&["scan", "--example", "2", "--rho", "0.6", "--x3", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho outside (0, 0.5)"), "{}", stderr(&o));
    let o = wentropy(&["scan", "--example", "1", "--rho", "0:0.9:5", "--x3", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1 - rho^2 - rho^4 > 0"), "{}", stderr(&o));
    let o = wentropy(&["scan", "--example", "3", "--rho", "0", "--x3", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(wentropy(&["bogus"]).status.code(), Some(2));
    assert_eq!(wentropy(&["scan", "--rho"]).status.code(), Some(2));
    assert_eq!(wentropy(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_default_report() {
    let dir = scratch("verify");
    let out = dir.join("report.json");
    let o = wentropy(&["verify", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap();
    let find = |formula: &str, mode: &str| {
        entries.iter().find(|e| e["formula"] == formula && e["mode"] == mode).unwrap_or_else(|| panic!("{formula}"))
    };
    let l11 = find("Lambda_11", "paper");
    assert_eq!(l11["verdict"], "DISCREPANT");
    assert_eq!(l11["paper_value"].as_f64(), Some(1.0));
    assert_eq!(l11["wick_value"].as_f64(), Some(3.0));
    let xi = find("Xi", "paper");
    assert_eq!(xi["verdict"], "CONFIRMED");
    assert!(xi["abs_dev"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["passed"], true);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_below_quadrature_accuracy_exits_1() {
    let dir = scratch("verify-tight");
    let out = dir.join("report.json");
    let o = wentropy(&["verify", "--tol-quad", "1e-13", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("raise the points per axis"), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn moment_examples() {
    let dir = scratch("moment");
    let id = dir.join("id.txt");
    fs::write(&id, "1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let o = wentropy(&["moment", "--cov", id.to_str().unwrap(), "--r", "2,2,2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"].as_f64(), Some(1.0));
    assert_eq!(v["matchings"], 15);
    let o = wentropy(&["moment", "--cov", id.to_str().unwrap(), "--r", "1,1,1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"].as_f64(), Some(0.0));

    // conditional covariance of the first worked example at rho = 0.5, shift (rho^2 x3, 0) with x3 = 2
    let bar = dir.join("bar.json");
    fs::write(&bar, "[[0.9375, 0.5], [0.5, 1.0]]").unwrap();
    let o = wentropy(&["moment", "--cov", bar.to_str().unwrap(), "--r", "2,2", "--shift", "0.5,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.6875).abs() < 1e-14);

    let o = wentropy(&["moment", "--cov", id.to_str().unwrap(), "--r", "2,2"]);
    assert_eq!(o.status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn wdic_matches_golden_dic() {
    let golden: Value = serde_json::from_str(&fs::read_to_string(data("toy_dic_golden.json")).unwrap()).unwrap();
    let o = wentropy(&["wdic", "--data", &data("toy.csv"), "--draws", &data("toy_draws.csv"), "--weights", "column"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rel = |a: &Value, b: &Value| (a.as_f64().unwrap() - b.as_f64().unwrap()).abs() / b.as_f64().unwrap().abs();
    assert!(rel(&v["wdic"], &golden["dic"]) < 1e-12);
    assert!(rel(&v["pwd"], &golden["p_d"]) < 1e-10);
    assert!(rel(&v["dev_at_hat"], &golden["deviance_at_mean"]) < 1e-12);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys[..4], ["wdic", "pwd", "dev_at_hat", "theta_hat"]);
}

#[test]
fn wdic_zero_weights_give_zero() {
    let dir = scratch("zero");
    let f = dir.join("zero.csv");
    fs::write(&f, "y_1,weight\n0.1,0\n-0.4,0\n1.3,0\n").unwrap();
    let o = wentropy(&["wdic", "--data", f.to_str().unwrap(), "--draws", &data("toy_draws.csv")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["wdic"].as_f64(), Some(0.0));
    assert_eq!(v["pwd"].as_f64(), Some(0.0));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn wdic_sampler_is_deterministic() {
    let args = ["wdic", "--data", &data("toy.csv"), "--sample", "5000,500,0.3,7", "--weights", "ones"];
    let a = wentropy(&args);
    let b = wentropy(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let rate = v["acceptance_rate"].as_f64().unwrap();
    assert!(rate > 0.0 && rate < 1.0);
}

#[test]
fn wdic_malformed_input_exit_2_with_location() {
    let dir = scratch("bad");
    let f = dir.join("bad.csv");
    fs::write(&f, "y_1,weight\n0.1,1\nabc,1\n").unwrap();
    let o = wentropy(&["wdic", "--data", f.to_str().unwrap(), "--draws", &data("toy_draws.csv")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 2, column y_1"), "{}", stderr(&o));
    fs::write(&f, "y_1,weight\n0.1,1\n0.2,-1\n").unwrap();
    let o = wentropy(&["wdic", "--data", f.to_str().unwrap(), "--draws", &data("toy_draws.csv")]);
    assert_eq!(o.status.code(), Some(2));
    let o = wentropy(&["wdic", "--data", "/nonexistent.csv", "--draws", &data("toy_draws.csv")]);
    assert_eq!(o.status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn gen_data_round_trips_through_wdic() {
    let dir = scratch("gen");
    let f = dir.join("sim.csv");
    let o = wentropy(&[
        "gen-data", "--model", "laplace", "--theta", "0.5,1", "--n", "200", "--seed", "3", "--weights", "central:0.5",
        "-o", f.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("# wentropy data v1"));
    assert_eq!(text.lines().count(), 202);
    let o = wentropy(&["wdic", "--data", f.to_str().unwrap(), "--model", "laplace", "--sample", "4000,500,0.1,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = scratch("config");
    let conf = dir.join("run.conf");
    fs::write(&conf, "# shared\nseed = 7\nscan.example = 2\nscan.rho = 0.25\nscan.x3 = 1\nscan.modes = wick\n").unwrap();
    let c = conf.to_str().unwrap();
    let from_config = wentropy(&["--config", c, "scan"]);
    assert!(from_config.status.success(), "{}", stderr(&from_config));
    let direct = wentropy(&["scan", "--example", "2", "--rho", "0.25", "--x3", "1", "--modes", "wick"]);
    assert_eq!(from_config.stdout, direct.stdout);
    let overridden = wentropy(&["--config", c, "scan", "--rho", "0.4"]);
    let (_, rows) = parse_scan(&stdout(&overridden));
    assert_eq!(rows[0][0], Some(0.4));
    fs::write(&conf, "scan.rho = 0.6\nscan.example = 2\nscan.x3 = 0\n").unwrap();
    let o = wentropy(&["--config", c, "scan"]);
    assert_eq!(o.status.code(), Some(2));
    fs::write(&conf, "not a key value line\n").unwrap();
    assert_eq!(wentropy(&["--config", c, "scan"]).status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}
