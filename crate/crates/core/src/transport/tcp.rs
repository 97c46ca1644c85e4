use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{channel, Sender};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::{run_server, DataOwner, Event, Outbox, ServerConfig, ServerEndpoint, Wire};
use crate::error::{Error, Result};
use crate::fastpai::{PrivateKey, PublicKey};
use crate::sharing::Role;
use crate::wire::{Control, Frame, Message, MessageCodec, Party, ProtocolMessage, HEADER_LEN};

const DIAL_RETRY: Duration = Duration::from_millis(50);
const HELLO_TIMEOUT: Duration = Duration::from_secs(10);

type Links = Arc<(Mutex<HashMap<Party, TcpStream>>, Condvar)>;

struct TcpOutbox {
    me: Party,
    links: Links,
    wait: Duration,
}

impl Outbox for TcpOutbox {
    fn send(&self, to: Party, frame: Vec<u8>) -> Result<()> {
        let (lock, ready) = &*self.links;
        let guard = lock.lock().expect("link table poisoned");
        // A peer may still be dialing in; give it until the deadline.
        let (mut guard, _) = ready
            .wait_timeout_while(guard, self.wait, |m| !m.contains_key(&to))
            .expect("link table poisoned");
        let stream = guard
            .get_mut(&to)
            .ok_or_else(|| Error::Disconnected(format!("{} has no link to {to}", self.me)))?;
        stream
            .write_all(&frame)
            .map_err(|e| Error::transport(format!("{} sending to {to}", self.me), e))
    }
}

fn read_frame(stream: &mut TcpStream) -> io::Result<Option<Vec<u8>>> {
    let mut header = [0u8; HEADER_LEN];
    match stream.read_exact(&mut header) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let (_, _, len) = Frame::parse_header(&header)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut bytes = Vec::with_capacity(HEADER_LEN + len);
    bytes.extend_from_slice(&header);
    bytes.resize(HEADER_LEN + len, 0);
    stream.read_exact(&mut bytes[HEADER_LEN..])?;
    Ok(Some(bytes))
}

/// Registers `stream` as the link to `peer` and forwards its frames.
fn attach(stream: TcpStream, peer: Party, links: &Links, inbox: Sender<Event>) -> Result<()> {
    let writer = stream
        .try_clone()
        .map_err(|e| Error::transport(format!("cloning link to {peer}"), e))?;
    {
        let (lock, ready) = &**links;
        lock.lock()
            .expect("link table poisoned")
            .insert(peer, writer);
        ready.notify_all();
    }
    let mut reader = stream;
    thread::Builder::new()
        .name(format!("read-{peer}"))
        .spawn(move || loop {
            match read_frame(&mut reader) {
                Ok(Some(bytes)) => {
                    if inbox.send(Event::Frame { from: peer, bytes }).is_err() {
                        break;
                    }
                }
                Ok(None) | Err(_) => {
                    let _ = inbox.send(Event::Closed(peer));
                    break;
                }
            }
        })
        .map_err(|e| Error::transport("spawning reader thread", e))?;
    Ok(())
}

fn hello(codec: &MessageCodec, me: Party) -> Result<Vec<u8>> {
    codec.encode(&ProtocolMessage::new(
        0,
        Message::Control(Control::Hello(me)),
    ))
}

fn dial(addr: SocketAddr, me: Party, codec: &MessageCodec, window: Duration) -> Result<TcpStream> {
    let deadline = Instant::now() + window;
    let mut stream = loop {
        match TcpStream::connect(addr) {
            Ok(s) => break s,
            Err(e) if Instant::now() >= deadline => {
                return Err(Error::transport(format!("{me} connecting to {addr}"), e))
            }
            Err(_) => thread::sleep(DIAL_RETRY),
        }
    };
    stream
        .set_nodelay(true)
        .map_err(|e| Error::transport("setting TCP_NODELAY", e))?;
    stream
        .write_all(&hello(codec, me)?)
        .map_err(|e| Error::transport(format!("{me} greeting {addr}"), e))?;
    Ok(stream)
}

/// Accepts `expected` connections, each introduced by a hello frame.
fn accept_peers(
    listener: TcpListener,
    me: Party,
    expected: usize,
    codec: MessageCodec,
    links: Links,
    inbox: Sender<Event>,
) -> Result<()> {
    let mut seen = 0;
    while seen < expected {
        let (mut stream, addr) = listener
            .accept()
            .map_err(|e| Error::transport(format!("{me} accepting"), e))?;
        let greeting = stream
            .set_read_timeout(Some(HELLO_TIMEOUT))
            .and_then(|_| read_frame(&mut stream));
        let peer = match greeting.map(|b| b.map(|b| codec.decode(&b))) {
            Ok(Some(Ok(ProtocolMessage {
                body: Message::Control(Control::Hello(p)),
                ..
            }))) if p != me => p,
            _ => {
                log::debug!("{me}: dropping connection from {addr} without a valid hello");
                continue;
            }
        };
        stream
            .set_read_timeout(None)
            .and_then(|_| stream.set_nodelay(true))
            .map_err(|e| Error::transport("configuring accepted link", e))?;
        attach(stream, peer, &links, inbox.clone())?;
        seen += 1;
    }
    Ok(())
}

fn new_links() -> Links {
    Arc::new((Mutex::new(HashMap::new()), Condvar::new()))
}

fn close_links(links: &Links) {
    let (lock, _) = &**links;
    for s in lock.lock().expect("link table poisoned").values() {
        let _ = s.shutdown(Shutdown::Both);
    }
}

/// Runs one server on `listener`. S0 dials S1 at `peer`; S1 waits for S0.
fn run_tcp_server(
    cfg: ServerConfig,
    pk: PublicKey,
    listener: TcpListener,
    peer: Option<SocketAddr>,
    window: Duration,
) -> Result<()> {
    let me = Party::server(cfg.role);
    let codec = MessageCodec::new(&pk);
    let links = new_links();
    let (tx, rx) = channel();
    let expected = match cfg.role {
        Role::S0 => 1,
        Role::S1 => 2,
    };
    {
        let (codec, links, tx) = (codec.clone(), links.clone(), tx.clone());
        thread::Builder::new()
            .name(format!("accept-{me}"))
            .spawn(move || {
                if let Err(e) = accept_peers(listener, me, expected, codec, links, tx) {
                    log::warn!("{me}: {e}");
                }
            })
            .map_err(|e| Error::transport("spawning accept thread", e))?;
    }
    if cfg.role == Role::S0 {
        let addr = peer.ok_or_else(|| Error::InvalidParams("S0 needs the address of S1".into()))?;
        let stream = dial(addr, me, &codec, window)?;
        attach(stream, Party::S1, &links, tx.clone())?;
    }
    drop(tx);
    let outbox = TcpOutbox {
        me,
        links: links.clone(),
        wait: window,
    };
    let wire = Wire::new(me, codec, Box::new(outbox));
    let result = run_server(ServerEndpoint::new(cfg, pk), wire, rx);
    close_links(&links);
    result
}

/// Binds `listen` and serves one session until shutdown.
pub fn serve(
    cfg: ServerConfig,
    pk: &PublicKey,
    listen: SocketAddr,
    peer: Option<SocketAddr>,
    window: Duration,
) -> Result<()> {
    let listener = TcpListener::bind(listen)
        .map_err(|e| Error::transport(format!("{} binding {listen}", cfg.role), e))?;
    log::info!("{} listening on {listen}", cfg.role);
    run_tcp_server(cfg, pk.clone(), listener, peer, window)
}

/// Two servers on 127.0.0.1 with OS-assigned ports, each on its own thread.
pub struct LoopbackServers {
    pub s0_addr: SocketAddr,
    pub s1_addr: SocketAddr,
    threads: Vec<JoinHandle<Result<()>>>,
}

impl LoopbackServers {
    pub fn into_threads(self) -> Vec<JoinHandle<Result<()>>> {
        self.threads
    }
}

pub fn spawn_loopback_servers(
    pk: &PublicKey,
    s0: ServerConfig,
    s1: ServerConfig,
) -> Result<LoopbackServers> {
    let bind =
        || TcpListener::bind("127.0.0.1:0").map_err(|e| Error::transport("binding loopback", e));
    let (l0, l1) = (bind()?, bind()?);
    let addr = |l: &TcpListener| {
        l.local_addr()
            .map_err(|e| Error::transport("reading bound address", e))
    };
    let (s0_addr, s1_addr) = (addr(&l0)?, addr(&l1)?);
    let window = Duration::from_secs(30);
    let mut threads = Vec::new();
    for (cfg, listener, peer) in [(s1, l1, None), (s0, l0, Some(s1_addr))] {
        let pk = pk.clone();
        threads.push(
            thread::Builder::new()
                .name(format!("tcp-{}", cfg.role))
                .spawn(move || run_tcp_server(cfg, pk, listener, peer, window))
                .map_err(|e| Error::transport("spawning server thread", e))?,
        );
    }
    Ok(LoopbackServers {
        s0_addr,
        s1_addr,
        threads,
    })
}

/// Connects a data owner to running servers. Dialing is retried within
/// `timeout` so servers may still be starting.
pub fn connect_owner(
    pk: &PublicKey,
    sk: &PrivateKey,
    seed: u64,
    s0: SocketAddr,
    s1: SocketAddr,
    timeout: Duration,
) -> Result<DataOwner> {
    let codec = MessageCodec::new(pk);
    let links = new_links();
    let (tx, rx) = channel();
    for (party, addr) in [(Party::S0, s0), (Party::S1, s1)] {
        let stream = dial(addr, Party::Owner, &codec, timeout)?;
        attach(stream, party, &links, tx.clone())?;
    }
    let outbox = TcpOutbox {
        me: Party::Owner,
        links,
        wait: timeout,
    };
    let wire = Wire::new(Party::Owner, codec, Box::new(outbox));
    Ok(DataOwner::new(pk, sk, seed, wire, rx, timeout))
}
