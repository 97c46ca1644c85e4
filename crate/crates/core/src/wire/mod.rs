//! Binary framing and message encoding.
//!
//! ```text
//! "MRSE" | version u8 | msg_type u8 | session_id u64 | payload_len u32 | payload
//! ```
//!
//! All integers are big-endian. Inside payloads, `Z_N` values take
//! `w = ⌈|N|/8⌉` bytes and `Z_{N²}` values take `2w` bytes, so the size of
//! every protocol message is a function of `|N|` alone.

mod keystore;

pub use keystore::{KeystoreRecord, RecordKind};

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};

use crate::arith::{byte_width, to_fixed_be};
use crate::error::{Error, Result};
use crate::fastpai::{Ciphertext, PublicKey};
use crate::meter::MeterSnapshot;
use crate::protocols::{AssistedTuple, Coin, ScmpRound1};
use crate::sharing::{Role, Share, ShareContext};

pub const MAGIC: [u8; 4] = *b"MRSE";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 18;
/// Upper bound on a single payload; larger length fields are rejected
/// before allocating.
pub const MAX_PAYLOAD: usize = 1 << 26;

/// The three parties of the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Owner,
    S0,
    S1,
}

impl Party {
    pub fn code(self) -> u8 {
        match self {
            Party::Owner => 0,
            Party::S0 => 1,
            Party::S1 => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Party::Owner),
            1 => Ok(Party::S0),
            2 => Ok(Party::S1),
            c => Err(Error::wire(format!("unknown party {c}"))),
        }
    }

    pub fn server(role: Role) -> Self {
        match role {
            Role::S0 => Party::S0,
            Role::S1 => Party::S1,
        }
    }

    pub fn role(self) -> Option<Role> {
        match self {
            Party::Owner => None,
            Party::S0 => Some(Role::S0),
            Party::S1 => Some(Role::S1),
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Owner => "DO",
            Party::S0 => "S0",
            Party::S1 => "S1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    UploadCt = 1,
    UploadShare = 2,
    AssistedInit = 3,
    ScmpRound1 = 4,
    ScmpRound2 = 5,
    S2cShareCt = 6,
    C2sCt = 7,
    ResultShare = 8,
    ResultCt = 9,
    Control = 10,
}

impl MsgType {
    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            1 => MsgType::UploadCt,
            2 => MsgType::UploadShare,
            3 => MsgType::AssistedInit,
            4 => MsgType::ScmpRound1,
            5 => MsgType::ScmpRound2,
            6 => MsgType::S2cShareCt,
            7 => MsgType::C2sCt,
            8 => MsgType::ResultShare,
            9 => MsgType::ResultCt,
            10 => MsgType::Control,
            c => return Err(Error::wire(format!("unknown message type {c}"))),
        })
    }

    /// Control frames carry orchestration only and are not metered.
    pub fn is_metered(self) -> bool {
        self != MsgType::Control
    }
}

/// A raw frame: header fields plus an opaque payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub session_id: u64,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.msg_type as u8);
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Validates a header and returns `(msg_type, session_id, payload_len)`.
    pub fn parse_header(header: &[u8]) -> Result<(MsgType, u64, usize)> {
        if header.len() < HEADER_LEN {
            return Err(Error::wire("truncated header"));
        }
        if header[..4] != MAGIC {
            return Err(Error::wire("bad magic"));
        }
        if header[4] != VERSION {
            return Err(Error::wire(format!("unsupported version {}", header[4])));
        }
        let msg_type = MsgType::from_code(header[5])?;
        let session_id = u64::from_be_bytes(header[6..14].try_into().expect("8 bytes"));
        let len = u32::from_be_bytes(header[14..18].try_into().expect("4 bytes")) as usize;
        if len > MAX_PAYLOAD {
            return Err(Error::wire(format!("payload length {len} exceeds limit")));
        }
        Ok((msg_type, session_id, len))
    }

    pub fn decode(bytes: &[u8]) -> Result<Frame> {
        let (msg_type, session_id, len) = Frame::parse_header(bytes)?;
        let body = &bytes[HEADER_LEN..];
        if body.len() < len {
            return Err(Error::wire("payload shorter than declared length"));
        }
        if body.len() > len {
            return Err(Error::wire("trailing bytes after payload"));
        }
        Ok(Frame {
            msg_type,
            session_id,
            payload: body.to_vec(),
        })
    }
}

/// Which half of a slot a fetch or scaling targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotPart {
    Share,
    Ciphertext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearOp {
    AddShares,
    SubShares,
    AddCts,
    SubCts,
}

/// Orchestration messages, sent by the data owner or as replies to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Control {
    Hello(Party),
    Shutdown,
    /// `out ← SMUL(ct[x], share[y])`.
    Smul {
        x: u32,
        y: u32,
        out: u32,
    },
    ReduceTheta {
        slot: u32,
        out: u32,
    },
    /// S0 only: `ct[out] ← SCMP(ct[x], ct[y])`.
    ScmpStart {
        x: u32,
        y: u32,
        out: u32,
        coin: Coin,
    },
    /// `ct[out] ← S2C(share[slot])`.
    S2c {
        slot: u32,
        out: u32,
    },
    /// `share[out] ← C2S(ct[slot])`, where `ct[slot]` lives on S0.
    C2s {
        slot: u32,
        out: u32,
    },
    Fetch {
        slot: u32,
        part: SlotPart,
    },
    Linear {
        op: LinearOp,
        a: u32,
        b: u32,
        out: u32,
    },
    Scale {
        part: SlotPart,
        a: u32,
        k: i64,
        out: u32,
    },
    MeterQuery,
    MeterReport(MeterSnapshot),
    Done,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    UploadCt { slot: u32, ct: Ciphertext },
    UploadShare { slot: u32, share: Share },
    AssistedInit(AssistedTuple),
    ScmpRound1(ScmpRound1),
    ScmpRound2(Ciphertext),
    S2cShareCt(Ciphertext),
    C2sCt(Ciphertext),
    ResultShare { slot: u32, share: Share },
    ResultCt { slot: u32, ct: Ciphertext },
    Control(Control),
}

impl Message {
    pub fn msg_type(&self) -> MsgType {
        match self {
            Message::UploadCt { .. } => MsgType::UploadCt,
            Message::UploadShare { .. } => MsgType::UploadShare,
            Message::AssistedInit(_) => MsgType::AssistedInit,
            Message::ScmpRound1(_) => MsgType::ScmpRound1,
            Message::ScmpRound2(_) => MsgType::ScmpRound2,
            Message::S2cShareCt(_) => MsgType::S2cShareCt,
            Message::C2sCt(_) => MsgType::C2sCt,
            Message::ResultShare { .. } => MsgType::ResultShare,
            Message::ResultCt { .. } => MsgType::ResultCt,
            Message::Control(_) => MsgType::Control,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolMessage {
    pub session_id: u64,
    pub body: Message,
}

impl ProtocolMessage {
    pub fn new(session_id: u64, body: Message) -> Self {
        ProtocolMessage { session_id, body }
    }
}

/// Big-endian writer for payload fields.
#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub(crate) fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub(crate) fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub(crate) fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub(crate) fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    pub(crate) fn fixed(&mut self, v: &BigUint, width: usize) -> Result<()> {
        self.buf.extend_from_slice(&to_fixed_be(v, width)?);
        Ok(())
    }

    pub(crate) fn finish(self) -> Vec<u8> {
        self.buf
    }
}

/// Big-endian reader that fails on truncation.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::wire("truncated payload"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    pub(crate) fn fixed(&mut self, width: usize) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.take(width)?))
    }

    pub(crate) fn rest(&mut self) -> &'a [u8] {
        std::mem::take(&mut self.buf)
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::wire("trailing bytes in payload"))
        }
    }
}

/// Encodes and decodes messages for one public key.
#[derive(Clone, Debug)]
pub struct MessageCodec {
    pk: PublicKey,
    width: usize,
}

impl MessageCodec {
    pub fn new(pk: &PublicKey) -> Self {
        MessageCodec {
            pk: pk.clone(),
            width: pk.byte_width(),
        }
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.pk
    }

    /// `w = ⌈|N|/8⌉`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn to_frame(&self, msg: &ProtocolMessage) -> Result<Frame> {
        let mut w = Writer::default();
        match &msg.body {
            Message::UploadCt { slot, ct } | Message::ResultCt { slot, ct } => {
                w.u32(*slot);
                self.put_ct(&mut w, ct)?;
            }
            Message::UploadShare { slot, share } | Message::ResultShare { slot, share } => {
                w.u32(*slot);
                put_share(&mut w, share)?;
            }
            Message::AssistedInit(a) => {
                put_share(&mut w, &a.two_alpha_share)?;
                self.put_ct(&mut w, &a.ct_two_alpha_inv)?;
                self.put_ct(&mut w, &a.ct_zero)?;
                self.put_ct(&mut w, &a.ct_one)?;
            }
            Message::ScmpRound1(r) => {
                self.put_ct(&mut w, &r.d)?;
                w.fixed(&r.z0_masked, self.width)?;
            }
            Message::ScmpRound2(ct) | Message::S2cShareCt(ct) | Message::C2sCt(ct) => {
                self.put_ct(&mut w, ct)?;
            }
            Message::Control(c) => put_control(&mut w, c),
        }
        Ok(Frame {
            msg_type: msg.body.msg_type(),
            session_id: msg.session_id,
            payload: w.finish(),
        })
    }

    pub fn from_frame(&self, frame: &Frame) -> Result<ProtocolMessage> {
        let mut r = Reader::new(&frame.payload);
        let body = match frame.msg_type {
            MsgType::UploadCt => Message::UploadCt {
                slot: r.u32()?,
                ct: self.get_ct(&mut r)?,
            },
            MsgType::ResultCt => Message::ResultCt {
                slot: r.u32()?,
                ct: self.get_ct(&mut r)?,
            },
            MsgType::UploadShare => Message::UploadShare {
                slot: r.u32()?,
                share: self.get_share(&mut r)?,
            },
            MsgType::ResultShare => Message::ResultShare {
                slot: r.u32()?,
                share: self.get_share(&mut r)?,
            },
            MsgType::AssistedInit => {
                let share = self.get_share(&mut r)?;
                Message::AssistedInit(AssistedTuple {
                    role: share.role(),
                    two_alpha_share: share,
                    ct_two_alpha_inv: self.get_ct(&mut r)?,
                    ct_zero: self.get_ct(&mut r)?,
                    ct_one: self.get_ct(&mut r)?,
                })
            }
            MsgType::ScmpRound1 => {
                let d = self.get_ct(&mut r)?;
                let z0_masked = r.fixed(self.width)?;
                if z0_masked >= *self.pk.n() {
                    return Err(Error::wire("masked share not reduced mod N"));
                }
                Message::ScmpRound1(ScmpRound1 { d, z0_masked })
            }
            MsgType::ScmpRound2 => Message::ScmpRound2(self.get_ct(&mut r)?),
            MsgType::S2cShareCt => Message::S2cShareCt(self.get_ct(&mut r)?),
            MsgType::C2sCt => Message::C2sCt(self.get_ct(&mut r)?),
            MsgType::Control => Message::Control(get_control(&mut r)?),
        };
        r.finish()?;
        Ok(ProtocolMessage {
            session_id: frame.session_id,
            body,
        })
    }

    pub fn encode(&self, msg: &ProtocolMessage) -> Result<Vec<u8>> {
        Ok(self.to_frame(msg)?.encode())
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<ProtocolMessage> {
        self.from_frame(&Frame::decode(bytes)?)
    }

    fn put_ct(&self, w: &mut Writer, ct: &Ciphertext) -> Result<()> {
        if ct.modulus() != self.pk.n_sq() {
            return Err(Error::ModulusMismatch);
        }
        w.bytes(&ct.to_fixed_bytes(self.width)?);
        Ok(())
    }

    fn get_ct(&self, r: &mut Reader<'_>) -> Result<Ciphertext> {
        self.pk.ciphertext(r.fixed(2 * self.width)?)
    }

    fn get_share(&self, r: &mut Reader<'_>) -> Result<Share> {
        decode_share(r, Some(self.pk.n_arc()))
    }
}

const CTX_INTEGERS: u8 = 0;
const CTX_MOD_N: u8 = 1;
const CTX_MOD_THETA: u8 = 2;

/// `role | tag | width u32 | param | [sign] | magnitude`, where `param` is
/// the integer bound or the modulus.
pub(crate) fn put_share(w: &mut Writer, share: &Share) -> Result<()> {
    w.u8(share.role().bit());
    let magnitude = share.value().magnitude();
    match share.context() {
        ShareContext::Integers { bound } => {
            let width = byte_width(bound).max(byte_width(magnitude)).max(1);
            w.u8(CTX_INTEGERS);
            w.u32(width as u32);
            w.fixed(bound, width)?;
            w.u8(u8::from(share.value().sign() == Sign::Minus));
            w.fixed(magnitude, width)?;
        }
        ShareContext::ModN(m) | ShareContext::ModTheta(m) => {
            let tag = if matches!(share.context(), ShareContext::ModN(_)) {
                CTX_MOD_N
            } else {
                CTX_MOD_THETA
            };
            let width = byte_width(m);
            w.u8(tag);
            w.u32(width as u32);
            w.fixed(m, width)?;
            w.fixed(magnitude, width)?;
        }
    }
    Ok(())
}

/// Decodes a share. A `Z_N` share must match `n` when one is given.
pub(crate) fn decode_share(r: &mut Reader<'_>, n: Option<&Arc<BigUint>>) -> Result<Share> {
    let role = Role::from_bit(r.u8()?)?;
    let tag = r.u8()?;
    let width = r.u32()? as usize;
    if width == 0 || width > MAX_PAYLOAD {
        return Err(Error::wire("bad share width"));
    }
    let param = r.fixed(width)?;
    match tag {
        CTX_INTEGERS => {
            let negative = match r.u8()? {
                0 => false,
                1 => true,
                s => return Err(Error::wire(format!("bad sign byte {s}"))),
            };
            let magnitude = r.fixed(width)?;
            let sign = if negative { Sign::Minus } else { Sign::Plus };
            Ok(Share::new(
                BigInt::from_biguint(sign, magnitude),
                role,
                ShareContext::Integers { bound: param },
            ))
        }
        CTX_MOD_N | CTX_MOD_THETA => {
            let value = r.fixed(width)?;
            if value >= param {
                return Err(Error::wire("share value not reduced"));
            }
            let ctx = if tag == CTX_MOD_N {
                let m = match n {
                    Some(n) if **n == param => n.clone(),
                    Some(_) => return Err(Error::ModulusMismatch),
                    None => Arc::new(param),
                };
                ShareContext::ModN(m)
            } else {
                ShareContext::ModTheta(Arc::new(param))
            };
            Ok(Share::new(BigInt::from(value), role, ctx))
        }
        t => Err(Error::wire(format!("unknown share context {t}"))),
    }
}

fn coin_code(coin: Coin) -> u8 {
    match coin {
        Coin::Random => 0,
        Coin::Forced(false) => 1,
        Coin::Forced(true) => 2,
    }
}

fn part_code(part: SlotPart) -> u8 {
    match part {
        SlotPart::Share => 0,
        SlotPart::Ciphertext => 1,
    }
}

fn part_from(code: u8) -> Result<SlotPart> {
    match code {
        0 => Ok(SlotPart::Share),
        1 => Ok(SlotPart::Ciphertext),
        c => Err(Error::wire(format!("unknown slot part {c}"))),
    }
}

fn put_control(w: &mut Writer, c: &Control) {
    match c {
        Control::Hello(p) => {
            w.u8(0);
            w.u8(p.code());
        }
        Control::Shutdown => w.u8(1),
        Control::Smul { x, y, out } => {
            w.u8(2);
            w.u32(*x);
            w.u32(*y);
            w.u32(*out);
        }
        Control::ReduceTheta { slot, out } => {
            w.u8(3);
            w.u32(*slot);
            w.u32(*out);
        }
        Control::ScmpStart { x, y, out, coin } => {
            w.u8(4);
            w.u32(*x);
            w.u32(*y);
            w.u32(*out);
            w.u8(coin_code(*coin));
        }
        Control::S2c { slot, out } => {
            w.u8(5);
            w.u32(*slot);
            w.u32(*out);
        }
        Control::C2s { slot, out } => {
            w.u8(6);
            w.u32(*slot);
            w.u32(*out);
        }
        Control::Fetch { slot, part } => {
            w.u8(7);
            w.u32(*slot);
            w.u8(part_code(*part));
        }
        Control::Linear { op, a, b, out } => {
            w.u8(8);
            w.u8(*op as u8);
            w.u32(*a);
            w.u32(*b);
            w.u32(*out);
        }
        Control::Scale { part, a, k, out } => {
            w.u8(9);
            w.u8(part_code(*part));
            w.u32(*a);
            w.u64(*k as u64);
            w.u32(*out);
        }
        Control::MeterQuery => w.u8(10),
        Control::MeterReport(s) => {
            w.u8(11);
            for b in s.bits {
                w.u64(b);
            }
        }
        Control::Done => w.u8(12),
        Control::Error(msg) => {
            w.u8(13);
            w.bytes(msg.as_bytes());
        }
    }
}

fn get_control(r: &mut Reader<'_>) -> Result<Control> {
    Ok(match r.u8()? {
        0 => Control::Hello(Party::from_code(r.u8()?)?),
        1 => Control::Shutdown,
        2 => Control::Smul {
            x: r.u32()?,
            y: r.u32()?,
            out: r.u32()?,
        },
        3 => Control::ReduceTheta {
            slot: r.u32()?,
            out: r.u32()?,
        },
        4 => Control::ScmpStart {
            x: r.u32()?,
            y: r.u32()?,
            out: r.u32()?,
            coin: match r.u8()? {
                0 => Coin::Random,
                1 => Coin::Forced(false),
                2 => Coin::Forced(true),
                c => return Err(Error::wire(format!("unknown coin {c}"))),
            },
        },
        5 => Control::S2c {
            slot: r.u32()?,
            out: r.u32()?,
        },
        6 => Control::C2s {
            slot: r.u32()?,
            out: r.u32()?,
        },
        7 => Control::Fetch {
            slot: r.u32()?,
            part: part_from(r.u8()?)?,
        },
        8 => {
            let op = match r.u8()? {
                0 => LinearOp::AddShares,
                1 => LinearOp::SubShares,
                2 => LinearOp::AddCts,
                3 => LinearOp::SubCts,
                c => return Err(Error::wire(format!("unknown linear op {c}"))),
            };
            Control::Linear {
                op,
                a: r.u32()?,
                b: r.u32()?,
                out: r.u32()?,
            }
        }
        9 => Control::Scale {
            part: part_from(r.u8()?)?,
            a: r.u32()?,
            k: r.u64()? as i64,
            out: r.u32()?,
        },
        10 => Control::MeterQuery,
        11 => {
            let mut bits = [0u64; 4];
            for b in &mut bits {
                *b = r.u64()?;
            }
            Control::MeterReport(MeterSnapshot { bits })
        }
        12 => Control::Done,
        13 => Control::Error(
            String::from_utf8(r.rest().to_vec())
                .map_err(|_| Error::wire("error text is not UTF-8"))?,
        ),
        c => return Err(Error::wire(format!("unknown control op {c}"))),
    })
}
