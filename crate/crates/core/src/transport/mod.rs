//! Running the data owner and both servers as message-passing endpoints.
//!
//! Endpoints exchange encoded frames through an [`Outbox`] and receive
//! [`Event`]s on a channel. The same endpoints run over in-process
//! channels or TCP; metering happens above the transport, so both report
//! identical counts.

mod inproc;
mod owner;
mod server;
mod tcp;

pub use owner::DataOwner;
pub use server::{Outgoing, ServerConfig, ServerEndpoint};
pub use tcp::{connect_owner, serve, spawn_loopback_servers, LoopbackServers};

use std::net::SocketAddr;
use std::sync::mpsc::Receiver;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand::RngCore;

use crate::batch::trial_rng;
use crate::error::{Error, Result};
use crate::fastpai::{PrivateKey, PublicKey};
use crate::meter::{CommMeter, Link, MeterSnapshot};
use crate::protocols::Rerandomize;
use crate::sharing::Role;
use crate::wire::{Control, Message, MessageCodec, Party, ProtocolMessage};

/// Something that arrived at an endpoint.
#[derive(Debug)]
pub enum Event {
    Frame { from: Party, bytes: Vec<u8> },
    Closed(Party),
}

/// Delivers encoded frames to other parties.
pub trait Outbox: Send {
    fn send(&self, to: Party, frame: Vec<u8>) -> Result<()>;
}

/// An endpoint's view of the network: codec, outbox and meter.
pub(crate) struct Wire {
    me: Party,
    codec: MessageCodec,
    outbox: Box<dyn Outbox>,
    meter: Arc<CommMeter>,
}

impl Wire {
    pub(crate) fn new(me: Party, codec: MessageCodec, outbox: Box<dyn Outbox>) -> Self {
        Wire {
            me,
            codec,
            outbox,
            meter: Arc::new(CommMeter::new()),
        }
    }

    pub(crate) fn send(&self, to: Party, msg: &ProtocolMessage) -> Result<()> {
        let frame = self.codec.to_frame(msg)?;
        if frame.msg_type.is_metered() {
            if let Some(link) = Link::between(self.me, to) {
                self.meter.record(link, frame.payload.len());
            }
        }
        self.outbox.send(to, frame.encode())
    }

    pub(crate) fn decode(&self, bytes: &[u8]) -> Result<ProtocolMessage> {
        self.codec.decode(bytes)
    }

    pub(crate) fn meter(&self) -> MeterSnapshot {
        self.meter.snapshot()
    }
}

/// Runs a server endpoint until it receives a shutdown or its inbox closes.
///
/// Handler errors are reported to the data owner as control errors under
/// the offending session id; the server keeps running.
pub(crate) fn run_server(
    mut endpoint: ServerEndpoint,
    wire: Wire,
    inbox: Receiver<Event>,
) -> Result<()> {
    while let Ok(event) = inbox.recv() {
        let (from, bytes) = match event {
            Event::Frame { from, bytes } => (from, bytes),
            Event::Closed(Party::Owner) => break,
            Event::Closed(p) => {
                log::debug!("{}: link to {p} closed", endpoint.party());
                continue;
            }
        };
        let msg = match wire.decode(&bytes) {
            Ok(m) => m,
            Err(e) => {
                report(&wire, 0, &e)?;
                continue;
            }
        };
        let sid = msg.session_id;
        if matches!(msg.body, Message::Control(Control::MeterQuery)) && from == Party::Owner {
            let reply = Message::Control(Control::MeterReport(wire.meter()));
            wire.send(Party::Owner, &ProtocolMessage::new(sid, reply))?;
            continue;
        }
        match endpoint.handle(from, msg) {
            Ok(out) => {
                for o in out {
                    wire.send(o.to, &o.msg)?;
                }
            }
            Err(e) => report(&wire, sid, &e)?,
        }
        if endpoint.is_shut_down() {
            break;
        }
    }
    Ok(())
}

fn report(wire: &Wire, sid: u64, e: &Error) -> Result<()> {
    log::debug!("{}: session {sid}: {e}", wire.me);
    wire.send(
        Party::Owner,
        &ProtocolMessage::new(sid, Message::Control(Control::Error(e.to_string()))),
    )
}

/// Per-party seeds derived from one master seed: `(owner, s0, s1)`.
pub fn derive_seeds(seed: u64) -> (u64, u64, u64) {
    (
        trial_rng(seed, 0).next_u64(),
        trial_rng(seed, 1).next_u64(),
        trial_rng(seed, 2).next_u64(),
    )
}

pub fn server_seed(seed: u64, role: Role) -> u64 {
    let (_, s0, s1) = derive_seeds(seed);
    match role {
        Role::S0 => s0,
        Role::S1 => s1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Three endpoints in one process, linked by channels.
    InProcess,
    /// Servers on threads listening on 127.0.0.1, reached over TCP.
    Loopback,
    /// Servers already running elsewhere.
    Tcp { s0: SocketAddr, s1: SocketAddr },
}

#[derive(Clone, Copy, Debug)]
pub struct SessionConfig {
    pub seed: u64,
    pub rerandomize: Rerandomize,
    pub timeout: Duration,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            seed: 0,
            rerandomize: Rerandomize::Stored,
            timeout: Duration::from_secs(120),
        }
    }
}

impl SessionConfig {
    pub fn with_seed(seed: u64) -> Self {
        SessionConfig {
            seed,
            ..Self::default()
        }
    }

    fn server(&self, role: Role) -> ServerConfig {
        ServerConfig {
            role,
            seed: server_seed(self.seed, role),
            rerandomize: self.rerandomize,
        }
    }
}

/// Sets up all three parties, sends the assisted tuples, runs `script` as
/// the data owner and shuts the servers down.
///
/// The returned snapshot covers every metered message of the session,
/// including initialization and uploads.
pub fn run_session<T>(
    topology: &Topology,
    pk: &PublicKey,
    sk: &PrivateKey,
    cfg: SessionConfig,
    script: impl FnOnce(&mut DataOwner) -> Result<T>,
) -> Result<(T, MeterSnapshot)> {
    let (mut owner, servers) = match topology {
        Topology::InProcess => {
            let (owner_wire, owner_inbox, server_parts) = inproc::channel_mesh(pk);
            let handles = server_parts
                .into_iter()
                .map(|(role, wire, inbox)| {
                    let endpoint = ServerEndpoint::new(cfg.server(role), pk.clone());
                    thread::Builder::new()
                        .name(format!("server-{role}"))
                        .spawn(move || run_server(endpoint, wire, inbox))
                        .map_err(|e| Error::transport("spawning server thread", e))
                })
                .collect::<Result<Vec<_>>>()?;
            let owner = DataOwner::new(pk, sk, cfg.seed, owner_wire, owner_inbox, cfg.timeout);
            (owner, handles)
        }
        Topology::Loopback => {
            let servers = spawn_loopback_servers(pk, cfg.server(Role::S0), cfg.server(Role::S1))?;
            let owner = connect_owner(
                pk,
                sk,
                cfg.seed,
                servers.s0_addr,
                servers.s1_addr,
                cfg.timeout,
            )?;
            (owner, servers.into_threads())
        }
        Topology::Tcp { s0, s1 } => {
            let owner = connect_owner(pk, sk, cfg.seed, *s0, *s1, cfg.timeout)?;
            (owner, Vec::new())
        }
    };
    let result = owner.init().and_then(|_| script(&mut owner));
    let meter = owner.meter();
    owner.shutdown()?;
    for h in servers {
        h.join()
            .map_err(|_| Error::Disconnected("server thread panicked".into()))??;
    }
    Ok((result?, meter?))
}
