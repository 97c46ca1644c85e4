//! Timed, metered and verified protocol runs.
//!
//! Each iteration uploads fresh inputs, runs one operation through the
//! message-passing endpoints, and checks the plaintext result. Only the
//! operation itself is timed and metered; uploads and result fetches are not.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::batch::{par_map, trial_rng};
use crate::error::{Error, Result};
use crate::fastpai::{PrivateKey, PublicKey};
use crate::meter::MeterSnapshot;
use crate::protocols::{do_recover_scaled, plain_poly, Coin, PolyPath, Rerandomize, POLY_SMULS};
use crate::transport::{run_session, DataOwner, SessionConfig, Topology};
use crate::wire::LinearOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchOp {
    Smul,
    Scmp,
    S2c,
    C2s,
    Poly,
}

impl BenchOp {
    pub const ALL: [BenchOp; 5] = [
        BenchOp::Smul,
        BenchOp::Scmp,
        BenchOp::S2c,
        BenchOp::C2s,
        BenchOp::Poly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Smul => "smul",
            BenchOp::Scmp => "scmp",
            BenchOp::S2c => "s2c",
            BenchOp::C2s => "c2s",
            BenchOp::Poly => "poly",
        }
    }

    /// Published single-thread figures at `|N| = 3072`, where they exist.
    pub fn reference(self) -> Option<Reference> {
        match self {
            BenchOp::Smul => Some(Reference {
                runtime_ms: 6.3,
                comm_kb: Some(0.0),
            }),
            BenchOp::Scmp => Some(Reference {
                runtime_ms: 13.9,
                comm_kb: Some(1.874),
            }),
            BenchOp::Poly => Some(Reference {
                runtime_ms: 24.2,
                comm_kb: None,
            }),
            BenchOp::S2c | BenchOp::C2s => None,
        }
    }

    /// Inter-server payload of one run in units of `|N|` bits.
    pub fn inter_server_n_multiple(self) -> Option<u64> {
        match self {
            BenchOp::Smul => Some(0),
            BenchOp::Scmp => Some(5),
            BenchOp::S2c => Some(4),
            BenchOp::C2s => Some(2),
            BenchOp::Poly => None,
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown operation {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub runtime_ms: f64,
    /// Communication in kilobytes as published.
    pub comm_kb: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Sequential,
    /// Iterations spread over independent sessions on the rayon pool.
    Parallel,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sequential => "sequential",
            Mode::Parallel => "parallel",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub op: BenchOp,
    pub iterations: usize,
    pub seed: u64,
    /// Fixed inputs; drawn per iteration when absent.
    pub x: Option<i64>,
    pub y: Option<i64>,
    pub topology: Topology,
    pub mode: Mode,
    pub rerandomize: Rerandomize,
    pub poly_path: PolyPath,
}

impl BenchConfig {
    pub fn new(op: BenchOp, iterations: usize) -> Self {
        BenchConfig {
            op,
            iterations,
            seed: 0,
            x: None,
            y: None,
            topology: Topology::InProcess,
            mode: Mode::Sequential,
            rerandomize: Rerandomize::Stored,
            poly_path: PolyPath::ThetaReduced,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timings {
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl Timings {
    pub fn from_samples(samples: &[f64]) -> Timings {
        if samples.is_empty() {
            return Timings {
                mean_ms: 0.0,
                median_ms: 0.0,
                p95_ms: 0.0,
                min_ms: 0.0,
                max_ms: 0.0,
            };
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let median = if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        };
        // Nearest-rank percentile.
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Timings {
            mean_ms: s.iter().sum::<f64>() / n as f64,
            median_ms: median,
            p95_ms: s[rank - 1],
            min_ms: s[0],
            max_ms: s[n - 1],
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub op: BenchOp,
    pub n_bits: u64,
    pub data_bits: u32,
    pub kappa: u32,
    pub sigma: u32,
    pub iterations: usize,
    pub mode: Mode,
    pub timings: Timings,
    /// Wall time of the whole run, uploads and checks included.
    pub wall_s: f64,
    /// Payload bits of one run of the operation, per link.
    pub link_bits: MeterSnapshot,
    pub passes: usize,
    /// Present only for sequential runs at `|N| = 3072`.
    pub reference: Option<Reference>,
}

impl BenchReport {
    pub fn all_passed(&self) -> bool {
        self.passes == self.iterations
    }

    pub fn inter_server_bytes(&self) -> f64 {
        self.link_bits.inter_server_bits() as f64 / 8.0
    }

    /// Whether the metered inter-server bits equal the closed form.
    pub fn comm_matches_formula(&self) -> Option<bool> {
        self.op
            .inter_server_n_multiple()
            .map(|k| self.link_bits.inter_server_bits() == k * self.n_bits)
    }
}

struct Sample {
    ms: f64,
    bits: MeterSnapshot,
    pass: bool,
}

/// Runs `cfg.iterations` verified iterations and summarizes them.
pub fn run_bench(pk: &PublicKey, sk: &PrivateKey, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidParams(
            "at least one iteration is required".into(),
        ));
    }
    let start = Instant::now();
    let samples = match cfg.mode {
        Mode::Sequential => run_chunk(pk, sk, cfg, 0, cfg.iterations)?,
        Mode::Parallel => {
            let chunks = rayon_width().min(cfg.iterations);
            let per = cfg.iterations.div_ceil(chunks);
            let ranges: Vec<(usize, usize)> = (0..chunks)
                .map(|c| (c * per, ((c + 1) * per).min(cfg.iterations)))
                .filter(|(a, b)| a < b)
                .collect();
            let parts = par_map(&ranges, |&(a, b)| run_chunk(pk, sk, cfg, a, b));
            let mut all = Vec::with_capacity(cfg.iterations);
            for p in parts {
                all.extend(p?);
            }
            all
        }
    };
    let wall_s = start.elapsed().as_secs_f64();
    let link_bits = samples[0].bits;
    if let Some(other) = samples.iter().find(|s| s.bits != link_bits) {
        return Err(Error::ProtocolOrder(format!(
            "metered bits vary between iterations: {link_bits} vs {}",
            other.bits
        )));
    }
    let params = pk.params();
    let n_bits = pk.n().bits();
    let ms: Vec<f64> = samples.iter().map(|s| s.ms).collect();
    Ok(BenchReport {
        op: cfg.op,
        n_bits,
        data_bits: params.data_bits,
        kappa: params.kappa,
        sigma: params.sigma,
        iterations: samples.len(),
        mode: cfg.mode,
        timings: Timings::from_samples(&ms),
        wall_s,
        link_bits,
        passes: samples.iter().filter(|s| s.pass).count(),
        reference: (cfg.mode == Mode::Sequential && n_bits == 3072)
            .then(|| cfg.op.reference())
            .flatten(),
    })
}

fn rayon_width() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

fn run_chunk(
    pk: &PublicKey,
    sk: &PrivateKey,
    cfg: &BenchConfig,
    from: usize,
    to: usize,
) -> Result<Vec<Sample>> {
    let session = SessionConfig {
        seed: cfg.seed.wrapping_add(from as u64),
        rerandomize: cfg.rerandomize,
        ..SessionConfig::default()
    };
    let (samples, _) = run_session(&cfg.topology, pk, sk, session, |owner| {
        (from..to)
            .map(|i| iteration(owner, cfg, i as u64))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(samples)
}

fn inputs(owner: &DataOwner, cfg: &BenchConfig, index: u64) -> (BigInt, BigInt) {
    let mut rng = trial_rng(cfg.seed, index);
    let l = owner.public_key().params().data_bits;
    let mut draw = |fixed: Option<i64>, lo: i64, hi: i64| match fixed {
        Some(v) => BigInt::from(v),
        None => BigInt::from(rng.gen_range(lo..=hi)),
    };
    let bound = if l >= 63 { i64::MAX } else { 1i64 << l };
    match cfg.op {
        BenchOp::Poly => (draw(cfg.x, 0, poly_input_limit(l)), BigInt::zero()),
        BenchOp::C2s => (draw(cfg.x, 0, 1), BigInt::zero()),
        _ => (draw(cfg.x, -bound, bound), draw(cfg.y, -bound, bound)),
    }
}

/// Largest `x ≤ 63` whose power sum `x + … + x⁵` stays within `2^l`, the
/// range the θ-path recovery accepts.
fn poly_input_limit(l: u32) -> i64 {
    let bound = BigInt::from(1u8) << l;
    (0..=63i64)
        .take_while(|&x| plain_poly(&BigInt::from(x)) - 1 <= bound)
        .last()
        .unwrap_or(0)
}

/// What one operation produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    /// The plaintext the data owner recovered.
    pub value: BigInt,
    /// The plaintext the operation should produce.
    pub expected: BigInt,
    /// Wall time of the operation alone.
    pub ms: f64,
    /// Payload bits of the operation alone, per link.
    pub bits: MeterSnapshot,
}

impl Execution {
    pub fn passed(&self) -> bool {
        self.value == self.expected
    }
}

/// Uploads the inputs, runs `op` once and recovers its plaintext result.
///
/// For `scmp` the value is `μ`; for `c2s` it is the input recovered from
/// the shares of `2α·x`; for `poly` it is `f(x)`. `y` is ignored by the
/// unary operations.
pub fn execute(
    owner: &mut DataOwner,
    op: BenchOp,
    x: &BigInt,
    y: &BigInt,
    path: PolyPath,
) -> Result<Execution> {
    let params = *owner.public_key().params();
    let sx = owner.upload(x)?;
    let sy = match op {
        BenchOp::Poly | BenchOp::C2s => sx,
        _ => owner.upload(y)?,
    };
    let before = owner.meter()?;
    let t = Instant::now();
    let out = match op {
        BenchOp::Smul => owner.smul(sx, sy)?,
        BenchOp::Scmp => owner.scmp(sx, sy, Coin::Random)?,
        BenchOp::S2c => {
            let z = owner.smul(sx, sy)?;
            owner.s2c(z)?
        }
        BenchOp::C2s => owner.c2s(sx)?,
        BenchOp::Poly => poly(owner, sx, path)?,
    };
    let ms = t.elapsed().as_secs_f64() * 1e3;
    let bits = owner.meter()? - before;
    let (value, expected) = match op {
        BenchOp::Smul => (owner.recover_product(out)?, x * y),
        BenchOp::Scmp => (
            BigInt::from(owner.decrypt(out)?),
            BigInt::from(u8::from(x < y)),
        ),
        BenchOp::S2c => (owner.decrypt_signed(out, 2 * params.data_bits)?, x * y),
        BenchOp::C2s => {
            let pair = owner.fetch_shares(out)?;
            (
                do_recover_scaled(owner.private_key(), &pair, params.data_bits)?,
                x.clone(),
            )
        }
        BenchOp::Poly => {
            let sum = match path {
                PolyPath::ReEncrypt => owner.decrypt_signed(out, 5 * params.data_bits + 3)?,
                PolyPath::ThetaReduced => owner.recover_product_theta(out)?,
            };
            (sum + 1, plain_poly(x))
        }
    };
    Ok(Execution {
        value,
        expected,
        ms,
        bits,
    })
}

fn iteration(owner: &mut DataOwner, cfg: &BenchConfig, index: u64) -> Result<Sample> {
    let (x, y) = inputs(owner, cfg, index);
    let run = execute(owner, cfg.op, &x, &y, cfg.poly_path)?;
    let pass = run.passed();
    if !pass {
        log::warn!(
            "{} iteration {index}: x = {x}, y = {y} gave {} instead of {}",
            cfg.op,
            run.value,
            run.expected
        );
    }
    Ok(Sample {
        ms: run.ms,
        bits: run.bits,
        pass,
    })
}

/// `x + x² + … + x⁵` in a slot: a ciphertext on the re-encryption path,
/// θ-reduced shares of `2α·(…)` otherwise. The constant term is left to
/// the caller.
fn poly(owner: &mut DataOwner, sx: u32, path: PolyPath) -> Result<u32> {
    match path {
        PolyPath::ReEncrypt => {
            let mut sum = sx;
            let mut cur = sx;
            for _ in 0..POLY_SMULS {
                let z = owner.smul(cur, sx)?;
                cur = owner.s2c(z)?;
                sum = owner.linear(LinearOp::AddCts, sum, cur)?;
            }
            Ok(sum)
        }
        PolyPath::ThetaReduced => {
            let mut cur = owner.reduce_theta(sx)?;
            let mut sum = cur;
            for _ in 0..POLY_SMULS {
                let z = owner.smul(sx, cur)?;
                cur = owner.reduce_theta(z)?;
                sum = owner.linear(LinearOp::AddShares, sum, cur)?;
            }
            Ok(sum)
        }
    }
}
