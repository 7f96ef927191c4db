use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use auglag_cli::format::{read_json, MpcFile, ProblemFile};
use auglag_cli::generate::generate_random_qp;
use proptest::prelude::*;

fn auglag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_auglag"))
        .args(args)
        .env("AUGLAG_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn spec_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs/double_integrator.json")
        .display()
        .to_string()
}

#[test]
fn generate_then_solve_certified_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("qp.json");
    let f = file.to_str().unwrap();
    assert_eq!(auglag(&["generate", "--n", "6", "--seed", "4", "--out", f]).status.code(), Some(0));
    let loaded: ProblemFile = read_json(&file).unwrap();
    assert_eq!(loaded.to_problem().unwrap(), generate_random_qp(6, 4).problem);

    let out = auglag(&["solve", "--problem", f, "--scheme", "both", "--eps-out", "1e-2", "--certified"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let runs = report.as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for run in runs {
        let k_out = run["certificate"]["k_out"].as_u64().unwrap();
        assert_eq!(run["report"]["outer_iters"].as_u64().unwrap(), k_out + 1);
        assert!(run["report"]["certified"].as_bool().unwrap());
    }
}

#[test]
fn measured_solve_on_mpc_spec() {
    let out = auglag(&["solve", "--spec", &spec_path(), "--scheme", "idfgm", "--measured"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &report[0]["report"];
    assert!(r["converged"].as_bool().unwrap());
    assert!(r["infeasibility"].as_f64().unwrap() <= 1e-3);
    assert!(report[0]["certificate"]["flops_inner"].as_u64().is_some());
}

#[test]
fn understated_dual_radius_is_reported_as_violation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("qp.json");
    let f = file.to_str().unwrap();
    auglag(&["generate", "--n", "6", "--seed", "0", "--out", f]);
    let out = auglag(&["solve", "--problem", f, "--scheme", "idfgm", "--rd", "1e-4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn operational_errors_exit_one() {
    let out = auglag(&["solve", "--problem", "/nonexistent/qp.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/qp.json"));
    let out = auglag(&["certify", "--spec", &spec_path(), "--rho=-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = auglag(&["solve"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_prints_both_schedules_without_solving() {
    let out = auglag(&["certify", "--spec", &spec_path(), "--scheme", "both", "--rd", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let certs: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(certs[0]["k_out"].as_u64(), Some(4000));
    assert_eq!(certs[1]["k_out"].as_u64(), Some(126));
}

#[test]
fn bench_csv_is_byte_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = auglag(&["bench", "--sizes", "6,10", "--seeds", "3", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let x = fs::read(a.path().join("bench.csv")).unwrap();
    let y = fs::read(b.path().join("bench.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with(
        "seed,n,m,scheme,rho,eps_out,eps_in,k_out_cert,k_out_real,inner_iters_total,infeas_final,infeas_bound,primal_gap"
    ));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);
}

#[test]
fn bench_over_ten_seeds_keeps_bounds_row_wise() {
    let dir = tempfile::tempdir().unwrap();
    let out = auglag(&["bench", "--sizes", "20", "--seeds", "10", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(dir.path().join("bench.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 20);
    let get = |r: &csv::StringRecord, name: &str| r[col(name)].parse::<f64>().unwrap();
    for r in &rows {
        assert!(get(r, "infeas_final") <= get(r, "infeas_bound"));
        assert!(get(r, "dual_gap") <= get(r, "dual_gap_bound") + 1e-8);
        assert!(get(r, "primal_gap") >= get(r, "primal_gap_lower"));
        assert!(get(r, "primal_gap") <= get(r, "primal_gap_upper"));
        assert!(get(r, "k_out_theory") >= get(r, "k_out_cert"));
    }
}

#[test]
fn mpc_bench_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = auglag(&[
        "mpc-bench", "--spec", &spec_path(), "--horizons", "3,5", "--samples", "3", "--scheme", "idfgm", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("mpc_bench.csv")).unwrap();
    assert!(text.starts_with("sample,N,n,m,scheme"));
    assert!(text.lines().count() > 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mpc_file_round_trips(horizon in 1usize..8, x0 in proptest::collection::vec(-3.0f64..3.0, 2)) {
        let spec = auglag_core::MpcSpec::double_integrator(horizon).unwrap();
        let file = MpcFile::from_spec(&spec, Some(x0.clone()));
        let text = serde_json::to_string(&file).unwrap();
        let back: MpcFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_spec().unwrap(), spec);
        prop_assert_eq!(back.x0, Some(x0));
    }
}
