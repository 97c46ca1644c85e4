//! The `hss` command-line tool: key generation, uploads, single runs,
//! benchmarks and standalone servers.

pub mod keystore;
pub mod report;

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hss_core::batch::trial_rng;
use hss_core::bench::{execute, run_bench, BenchConfig, BenchOp, Mode};
use hss_core::fastpai::keygen_with_y;
use hss_core::protocols::{do_init, do_upload, PolyPath, Rerandomize};
use hss_core::transport::{run_session, serve, server_seed, ServerConfig, SessionConfig, Topology};
use hss_core::{keygen, ParamSet, PrivateKey, PublicKey, Role, SecurityParams};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use report::{ReportRow, RunRecord};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hss_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("writing report: {0}")]
    Report(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Process exit status for a finished command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    /// The command ran but a correctness or communication check failed.
    Failed,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hss",
    version,
    about = "Two-server homomorphic secret sharing toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair and the servers' assisted tuples.
    Keygen(KeygenArgs),
    /// Encrypt and share a value into the servers' keystores.
    Upload(UploadArgs),
    /// Run one operation end to end and check the result.
    Run(RunArgs),
    /// Time many verified iterations of an operation.
    Bench(BenchArgs),
    /// Run one server for a single session over TCP.
    Serve(ServeArgs),
}

#[derive(Clone, Debug, Args)]
pub struct ParamArgs {
    /// Security level; fixes |N| unless --n-bits is given.
    #[arg(long, default_value_t = 128)]
    pub kappa: u32,
    /// Override the modulus size in bits.
    #[arg(long)]
    pub n_bits: Option<u32>,
    /// Data bound: inputs lie in [-2^l, 2^l].
    #[arg(long, default_value_t = 32)]
    pub l: u32,
    /// Statistical parameter.
    #[arg(long, default_value_t = 128)]
    pub sigma: u32,
    /// Use the fixed 10-bit demonstration key; ignores the other sizes.
    #[arg(long)]
    pub toy: bool,
}

impl ParamArgs {
    pub fn security(&self) -> Result<SecurityParams, CliError> {
        if self.toy {
            return Ok(SecurityParams::toy());
        }
        let sp = match self.n_bits {
            Some(n) => SecurityParams::new(self.kappa, n, self.sigma, self.l)?,
            None => SecurityParams::for_kappa(self.kappa)?
                .with_sigma(self.sigma)?
                .with_data_bits(self.l)?,
        };
        Ok(sp)
    }
}

#[derive(Clone, Debug, Args)]
pub struct KeySource {
    /// Keystore directory from `hss keygen`; keys are generated in memory
    /// when absent.
    #[arg(long)]
    pub keys: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Clone, Debug, Args)]
pub struct KeygenArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Clone, Debug, Args)]
pub struct UploadArgs {
    #[arg(long)]
    pub keys: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub x: i64,
    /// Slot number; the lowest free one by default.
    #[arg(long)]
    pub slot: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Smul,
    Scmp,
    S2c,
    C2s,
    Poly,
}

impl From<OpArg> for BenchOp {
    fn from(op: OpArg) -> Self {
        match op {
            OpArg::Smul => BenchOp::Smul,
            OpArg::Scmp => BenchOp::Scmp,
            OpArg::S2c => BenchOp::S2c,
            OpArg::C2s => BenchOp::C2s,
            OpArg::Poly => BenchOp::Poly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Theta,
    Reencrypt,
}

impl From<PathArg> for PolyPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Theta => PolyPath::ThetaReduced,
            PathArg::Reencrypt => PolyPath::ReEncrypt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransportArg {
    /// Channels between threads of this process.
    Inproc,
    /// Servers on local threads reached over TCP.
    Loopback,
    /// Servers started with `hss serve`; needs --s0 and --s1.
    Tcp,
}

#[derive(Clone, Debug, Args)]
pub struct SessionArgs {
    #[arg(long, value_enum, default_value_t = TransportArg::Inproc)]
    pub transport: TransportArg,
    #[arg(long)]
    pub s0: Option<SocketAddr>,
    #[arg(long)]
    pub s1: Option<SocketAddr>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Encrypt fresh zeros and ones instead of reusing the stored ones.
    #[arg(long)]
    pub fresh_rerandomize: bool,
    #[arg(long, value_enum, default_value_t = PathArg::Theta)]
    pub poly_path: PathArg,
}

impl SessionArgs {
    fn topology(&self) -> Result<Topology, CliError> {
        match (self.transport, self.s0, self.s1) {
            (TransportArg::Inproc, None, None) => Ok(Topology::InProcess),
            (TransportArg::Loopback, None, None) => Ok(Topology::Loopback),
            (TransportArg::Tcp, Some(s0), Some(s1)) => Ok(Topology::Tcp { s0, s1 }),
            (TransportArg::Tcp, _, _) => Err(CliError::Usage(
                "--transport tcp needs both --s0 and --s1".into(),
            )),
            _ => Err(CliError::Usage(
                "--s0 and --s1 only apply to --transport tcp".into(),
            )),
        }
    }

    fn rerandomize(&self) -> Rerandomize {
        if self.fresh_rerandomize {
            Rerandomize::Fresh
        } else {
            Rerandomize::Stored
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RunFormat {
    Text,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub op: OpArg,
    #[arg(long, allow_hyphen_values = true)]
    pub x: i64,
    /// Second operand; ignored by c2s and poly.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub y: i64,
    #[arg(long, value_enum, default_value_t = RunFormat::Text)]
    pub format: RunFormat,
    #[command(flatten)]
    pub keys: KeySource,
    #[command(flatten)]
    pub session: SessionArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    /// Operations to time; repeat for several.
    #[arg(long, value_enum, required = true)]
    pub op: Vec<OpArg>,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Fixed first operand; drawn per iteration when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<i64>,
    /// Spread iterations over the rayon pool.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long, value_enum, default_value_t = BenchFormat::Csv)]
    pub format: BenchFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub keys: KeySource,
    #[command(flatten)]
    pub session: SessionArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    S0,
    S1,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::S0 => Role::S0,
            RoleArg::S1 => Role::S1,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub keys: PathBuf,
    #[arg(long, value_enum)]
    pub role: RoleArg,
    #[arg(long)]
    pub listen: SocketAddr,
    /// Address of S1; required for S0, which dials it.
    #[arg(long)]
    pub peer: Option<SocketAddr>,
    /// Must match the data owner's --seed for reproducible runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub fresh_rerandomize: bool,
    /// Seconds to wait for the peer and the data owner to connect.
    #[arg(long, default_value_t = 60)]
    pub wait: u64,
}

/// Key generation is deterministic in `seed`.
pub fn generate_keys(params: &ParamArgs, seed: u64) -> Result<(PublicKey, PrivateKey), CliError> {
    if params.toy {
        return Ok(keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &2u32.into(),
        )?);
    }
    let sp = params.security()?;
    Ok(keygen(&sp, &mut ChaCha20Rng::seed_from_u64(seed))?)
}

fn resolve_keys(src: &KeySource, seed: u64) -> Result<(PublicKey, PrivateKey), CliError> {
    match &src.keys {
        Some(dir) => keystore::load_keys(dir),
        None => {
            log::info!("generating keys in memory");
            generate_keys(&src.params, seed)
        }
    }
}

pub fn cmd_keygen(args: &KeygenArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (pk, sk) = generate_keys(&args.params, args.seed)?;
    let (a0, a1) = do_init(&pk, &sk, &mut trial_rng(args.seed, 1))?;
    keystore::write_keys(&args.out, &pk, &sk, (&a0, &a1))?;
    writeln!(
        out,
        "wrote {}-bit key to {}",
        pk.n().bits(),
        args.out.display()
    )
    .map_err(|e| CliError::io(&args.out, e))?;
    Ok(Outcome::Passed)
}

pub fn cmd_upload(args: &UploadArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (pk, sk) = keystore::load_keys(&args.keys)?;
    let slot = args.slot.unwrap_or_else(|| keystore::next_slot(&args.keys));
    let (r0, r1) = do_upload(
        &pk,
        &sk,
        &BigInt::from(args.x),
        &mut trial_rng(args.seed, 2),
    )?;
    keystore::write_upload(&args.keys, &pk, slot, (&r0, &r1))?;
    writeln!(out, "{slot}").map_err(|e| CliError::io(&args.keys, e))?;
    Ok(Outcome::Passed)
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (pk, sk) = resolve_keys(&args.keys, args.session.seed)?;
    let s = &args.session;
    let cfg = SessionConfig {
        seed: s.seed,
        rerandomize: s.rerandomize(),
        ..SessionConfig::default()
    };
    let op = BenchOp::from(args.op);
    let (x, y) = (BigInt::from(args.x), BigInt::from(args.y));
    let (exec, _) = run_session(&s.topology()?, &pk, &sk, cfg, |owner| {
        execute(owner, op, &x, &y, s.poly_path.into())
    })?;
    let record = RunRecord::new(op.name(), args.x, args.y, &exec);
    let text = match args.format {
        RunFormat::Text => record.to_text(),
        RunFormat::Json => {
            serde_json::to_string_pretty(&record).map_err(|e| CliError::Report(e.to_string()))?
                + "\n"
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Report(e.to_string()))?;
    Ok(Outcome::from_bool(record.pass))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let s = &args.session;
    let topology = s.topology()?;
    if args.parallel && matches!(topology, Topology::Tcp { .. }) {
        return Err(CliError::Usage(
            "--parallel needs a fresh pair of servers per worker; use inproc or loopback".into(),
        ));
    }
    let (pk, sk) = resolve_keys(&args.keys, s.seed)?;
    let mut rows = Vec::new();
    for &op in &args.op {
        let cfg = BenchConfig {
            seed: s.seed,
            x: args.x,
            y: args.y,
            topology: topology.clone(),
            mode: if args.parallel {
                Mode::Parallel
            } else {
                Mode::Sequential
            },
            rerandomize: s.rerandomize(),
            poly_path: s.poly_path.into(),
            ..BenchConfig::new(op.into(), args.iters)
        };
        let report = run_bench(&pk, &sk, &cfg)?;
        let row = ReportRow::from(&report);
        eprintln!(
            "{:<5} {} iters, {}/{} passed, mean {:.3} ms, p95 {:.3} ms, {} inter-server bits{}",
            row.op,
            row.iterations,
            row.passes,
            row.iterations,
            row.mean_ms,
            row.p95_ms,
            row.inter_server_bits,
            match row.comm_formula_ok {
                Some(true) => " (matches closed form)",
                Some(false) => " (DOES NOT match closed form)",
                None => "",
            }
        );
        rows.push(row);
    }
    let text = match args.format {
        BenchFormat::Csv => report::to_csv(&rows).map_err(|e| CliError::Report(e.to_string()))?,
        BenchFormat::Json => report::to_json(&rows).map_err(|e| CliError::Report(e.to_string()))?,
    };
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e))?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Report(e.to_string()))?,
    }
    Ok(Outcome::from_bool(rows.iter().all(ReportRow::ok)))
}

pub fn cmd_serve(args: &ServeArgs) -> Result<Outcome, CliError> {
    let pk = keystore::load_public(&args.keys)?;
    let role = Role::from(args.role);
    if role == Role::S0 && args.peer.is_none() {
        return Err(CliError::Usage("S0 needs --peer with S1's address".into()));
    }
    let cfg = ServerConfig {
        role,
        seed: server_seed(args.seed, role),
        rerandomize: if args.fresh_rerandomize {
            Rerandomize::Fresh
        } else {
            Rerandomize::Stored
        },
    };
    serve(
        cfg,
        &pk,
        args.listen,
        args.peer,
        Duration::from_secs(args.wait),
    )?;
    Ok(Outcome::Passed)
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Keygen(a) => cmd_keygen(a, out),
        Command::Upload(a) => cmd_upload(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Serve(a) => cmd_serve(a),
    }
}
