use std::process::{Command, Output};

use finsler_spd::experiments::{read_csv, read_csv_from};
use finsler_spd::inequalities::Inequality;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler-spd")).args(args).output().expect("spawn binary")
}

#[test]
fn selftest_exits_zero() {
    let out = bin(&["selftest", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("11 checks, 0 failed"));
}

#[test]
fn verify_commuting_pairs_has_tight_lower_bound() {
    let out = bin(&[
        "verify", "--dim", "2", "--p", "2", "--samples", "10", "--seed", "1", "--ensemble", "commuting_pair",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv_from(out.stdout.as_slice()).unwrap();
    let lower: Vec<_> = rows.iter().filter(|r| r.inequality == Inequality::DistanceLowerBound).collect();
    assert_eq!(lower.len(), 10);
    for r in lower {
        assert!(r.gap.abs() <= 1e-9, "gap {}", r.gap);
    }
}

#[test]
fn out_of_range_exponent_is_usage_error() {
    let out = bin(&["verify", "--p", "1.0", "--ineq", "conde_2uc", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn hanner_outside_proven_range_is_usage_error() {
    let out = bin(&["verify", "--p", "3", "--ineq", "hanner", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unproven-range"));
}

#[test]
fn unknown_flag_and_bad_values_are_usage_errors() {
    assert_eq!(bin(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--ensemble", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--ineq", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--dim", "1"]).status.code(), Some(2));
    assert_eq!(bin(&[]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_writes_preamble_and_rows_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = bin(&[
        "scan", "--dim", "3", "--p", "1.5,3", "--samples", "4", "--seed", "5", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# finsler-spd scan\n"));
    assert!(text.contains("# seed=5\n"));
    assert!(text.ends_with('\n'));
    let rows = read_csv(&path).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.dim == 3 && r.seed == 5 && r.index < 4));
}

#[test]
fn gap_study_starts_at_zero_and_grows() {
    let out = bin(&["gap-study", "--dim", "3", "--p", "2", "--eps-grid", "0,0.25,0.5,1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv_from(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].gap.abs() <= 1e-9);
    assert!(rows[0].commutator_defect <= 1e-9);
    assert!(rows[3].gap > rows[0].gap);
    assert!(rows.iter().all(|r| r.gap >= -1e-9));
}

#[test]
fn gap_study_rejects_unit_exponent_and_descending_grid() {
    assert_eq!(bin(&["gap-study", "--p", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["gap-study", "--eps-grid", "0.5,0.1"]).status.code(), Some(2));
}
