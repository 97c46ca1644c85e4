//! Machine-readable bench and run reports.
//!
//! Column order and names are part of the output contract; see the golden
//! files under `tests/golden`.

use hss_core::bench::{BenchReport, Execution};
use hss_core::meter::{Link, MeterSnapshot};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub op: String,
    pub mode: String,
    pub n_bits: u64,
    pub data_bits: u32,
    pub kappa: u32,
    pub sigma: u32,
    pub iterations: usize,
    pub passes: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub wall_s: f64,
    pub s0_to_s1_bits: u64,
    pub s1_to_s0_bits: u64,
    pub servers_to_owner_bits: u64,
    pub owner_to_servers_bits: u64,
    pub inter_server_bits: u64,
    pub inter_server_bytes: f64,
    /// Empty when the operation has no closed form.
    pub comm_formula_ok: Option<bool>,
    pub reference_ms: Option<f64>,
    pub reference_comm_kb: Option<f64>,
    /// `mean_ms / reference_ms`.
    pub runtime_ratio: Option<f64>,
}

impl From<&BenchReport> for ReportRow {
    fn from(r: &BenchReport) -> Self {
        let t = &r.timings;
        ReportRow {
            op: r.op.name().into(),
            mode: r.mode.name().into(),
            n_bits: r.n_bits,
            data_bits: r.data_bits,
            kappa: r.kappa,
            sigma: r.sigma,
            iterations: r.iterations,
            passes: r.passes,
            mean_ms: t.mean_ms,
            median_ms: t.median_ms,
            p95_ms: t.p95_ms,
            min_ms: t.min_ms,
            max_ms: t.max_ms,
            wall_s: r.wall_s,
            s0_to_s1_bits: r.link_bits.get(Link::S0ToS1),
            s1_to_s0_bits: r.link_bits.get(Link::S1ToS0),
            servers_to_owner_bits: r.link_bits.get(Link::ServerToOwner),
            owner_to_servers_bits: r.link_bits.get(Link::OwnerToServer),
            inter_server_bits: r.link_bits.inter_server_bits(),
            inter_server_bytes: r.inter_server_bytes(),
            comm_formula_ok: r.comm_matches_formula(),
            reference_ms: r.reference.map(|x| x.runtime_ms),
            reference_comm_kb: r.reference.and_then(|x| x.comm_kb),
            runtime_ratio: r.reference.map(|x| t.mean_ms / x.runtime_ms),
        }
    }
}

impl ReportRow {
    /// Whether every iteration was correct and the metered bits match the
    /// closed form where one exists.
    pub fn ok(&self) -> bool {
        self.passes == self.iterations && self.comm_formula_ok != Some(false)
    }
}

/// Header line plus one row per report.
pub fn to_csv(rows: &[ReportRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json(rows: &[ReportRow]) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkBits {
    pub s0_to_s1: u64,
    pub s1_to_s0: u64,
    pub servers_to_owner: u64,
    pub owner_to_servers: u64,
}

impl From<MeterSnapshot> for LinkBits {
    fn from(m: MeterSnapshot) -> Self {
        LinkBits {
            s0_to_s1: m.get(Link::S0ToS1),
            s1_to_s0: m.get(Link::S1ToS0),
            servers_to_owner: m.get(Link::ServerToOwner),
            owner_to_servers: m.get(Link::OwnerToServer),
        }
    }
}

/// Outcome of `hss run`. Plaintexts are decimal strings.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub op: String,
    pub x: String,
    pub y: String,
    pub value: String,
    pub expected: String,
    pub pass: bool,
    pub ms: f64,
    pub bits: LinkBits,
}

impl RunRecord {
    pub fn new(op: &str, x: i64, y: i64, e: &Execution) -> Self {
        RunRecord {
            op: op.into(),
            x: x.to_string(),
            y: y.to_string(),
            value: e.value.to_string(),
            expected: e.expected.to_string(),
            pass: e.passed(),
            ms: e.ms,
            bits: e.bits.into(),
        }
    }

    pub fn to_text(&self) -> String {
        let b = &self.bits;
        format!(
            "{} x={} y={}\nresult: {} (expected {}) {}\ntime: {:.3} ms\nbits: s0_to_s1={} s1_to_s0={} servers_to_owner={} owner_to_servers={}\n",
            self.op,
            self.x,
            self.y,
            self.value,
            self.expected,
            if self.pass { "ok" } else { "MISMATCH" },
            self.ms,
            b.s0_to_s1,
            b.s1_to_s0,
            b.servers_to_owner,
            b.owner_to_servers
        )
    }
}
