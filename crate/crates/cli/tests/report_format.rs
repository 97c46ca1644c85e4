//! The report columns are a stable interface; these compare against
//! checked-in golden files.

use hss_cli::report::{to_csv, to_json, ReportRow};
use hss_core::bench::{BenchOp, BenchReport, Mode, Reference, Timings};
use hss_core::meter::MeterSnapshot;

fn sample(op: BenchOp, bits: [u64; 4], reference: Option<Reference>) -> BenchReport {
    BenchReport {
        op,
        n_bits: 3072,
        data_bits: 32,
        kappa: 128,
        sigma: 128,
        iterations: 4,
        mode: Mode::Sequential,
        timings: Timings::from_samples(&[10.0, 12.0, 14.0, 28.0]),
        wall_s: 1.5,
        link_bits: MeterSnapshot { bits },
        passes: 4,
        reference,
    }
}

fn rows() -> Vec<ReportRow> {
    [
        sample(BenchOp::Scmp, [9216, 6144, 0, 0], BenchOp::Scmp.reference()),
        sample(BenchOp::C2s, [6144, 0, 0, 0], None),
    ]
    .iter()
    .map(ReportRow::from)
    .collect()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn csv_matches_golden() {
    assert_eq!(to_csv(&rows()).unwrap(), golden("report.csv"));
}

#[test]
fn json_matches_golden() {
    assert_eq!(to_json(&rows()).unwrap(), golden("report.json"));
}

#[test]
fn derived_columns() {
    let r = &rows()[0];
    assert_eq!(r.inter_server_bits, 5 * 3072);
    assert_eq!(r.inter_server_bytes, 1920.0);
    assert_eq!(r.comm_formula_ok, Some(true));
    assert_eq!(r.mean_ms, 16.0);
    assert_eq!(r.p95_ms, 28.0);
    let ratio = r.runtime_ratio.unwrap();
    assert!((ratio - 16.0 / r.reference_ms.unwrap()).abs() < 1e-12);
    assert!(r.ok());
}

#[test]
fn wrong_bit_count_is_not_ok() {
    let row = ReportRow::from(&sample(BenchOp::Scmp, [9216, 6143, 0, 0], None));
    assert_eq!(row.comm_formula_ok, Some(false));
    assert!(!row.ok());
}

#[test]
fn failed_iteration_is_not_ok() {
    let mut r = sample(BenchOp::Poly, [0; 4], None);
    r.passes = 3;
    let row = ReportRow::from(&r);
    assert_eq!(row.comm_formula_ok, None);
    assert!(!row.ok());
}
