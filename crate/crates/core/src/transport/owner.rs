use std::collections::HashSet;
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{derive_seeds, Event, Wire};
use crate::error::{Error, Result};
use crate::fastpai::{Ciphertext, PrivateKey, PublicKey};
use crate::meter::MeterSnapshot;
use crate::protocols::{
    do_init, do_recover_product, do_recover_product_theta, do_upload, Coin, UploadRecord,
};
use crate::sharing::{Role, SharePair};
use crate::wire::{Control, LinearOp, Message, Party, ProtocolMessage, SlotPart};

const SERVERS: [Party; 2] = [Party::S0, Party::S1];

/// The data owner's driver. Holds `sk`, allocates slots and sessions, and
/// runs one operation at a time.
pub struct DataOwner {
    pk: PublicKey,
    sk: PrivateKey,
    rng: ChaCha20Rng,
    wire: Wire,
    inbox: Receiver<Event>,
    timeout: Duration,
    next_slot: u32,
    next_session: u64,
    shut_down: bool,
}

impl DataOwner {
    pub(crate) fn new(
        pk: &PublicKey,
        sk: &PrivateKey,
        seed: u64,
        wire: Wire,
        inbox: Receiver<Event>,
        timeout: Duration,
    ) -> Self {
        DataOwner {
            pk: pk.clone(),
            sk: sk.clone(),
            rng: ChaCha20Rng::seed_from_u64(derive_seeds(seed).0),
            wire,
            inbox,
            timeout,
            next_slot: 0,
            next_session: 1,
            shut_down: false,
        }
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.pk
    }

    pub fn private_key(&self) -> &PrivateKey {
        &self.sk
    }

    fn slot(&mut self) -> u32 {
        let s = self.next_slot;
        self.next_slot += 1;
        s
    }

    fn session(&mut self) -> u64 {
        let s = self.next_session;
        self.next_session += 1;
        s
    }

    /// Sends `body` to `to` under a fresh session id and returns the id.
    pub fn send_raw(&mut self, to: Party, body: Message) -> Result<u64> {
        let sid = self.session();
        self.wire.send(to, &ProtocolMessage::new(sid, body))?;
        Ok(sid)
    }

    fn send(&self, sid: u64, to: Party, body: Message) -> Result<()> {
        self.wire.send(to, &ProtocolMessage::new(sid, body))
    }

    fn control(&mut self, to: &[Party], c: Control) -> Result<u64> {
        let sid = self.session();
        for p in to {
            self.send(sid, *p, Message::Control(c.clone()))?;
        }
        Ok(sid)
    }

    /// Waits for one reply to `sid` from each of `from`.
    pub fn await_replies(&mut self, sid: u64, from: &[Party]) -> Result<Vec<(Party, Message)>> {
        let deadline = Instant::now() + self.timeout;
        let mut pending: HashSet<Party> = from.iter().copied().collect();
        let mut replies = Vec::with_capacity(from.len());
        while !pending.is_empty() {
            let left = deadline.saturating_duration_since(Instant::now());
            let (party, bytes) = match self.inbox.recv_timeout(left) {
                Ok(Event::Frame { from, bytes }) => (from, bytes),
                Ok(Event::Closed(p)) => {
                    return Err(Error::Disconnected(format!("{p} closed the link")))
                }
                Err(RecvTimeoutError::Timeout) => {
                    return Err(Error::Timeout(format!("replies to session {sid}")))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(Error::Disconnected("owner inbox".into()))
                }
            };
            let msg = self.wire.decode(&bytes)?;
            if let Message::Control(Control::Error(text)) = &msg.body {
                return Err(Error::Remote(format!(
                    "{party} (session {}): {text}",
                    msg.session_id
                )));
            }
            if let Message::ResultCt { .. } = msg.body {
                if party != Party::S0 {
                    return Err(Error::RoleViolation {
                        role: Role::S1,
                        action: "deliver a ciphertext result to the data owner",
                    });
                }
            }
            if msg.session_id != sid || !pending.remove(&party) {
                return Err(Error::ProtocolOrder(format!(
                    "unexpected {:?} from {party} in session {}",
                    msg.body.msg_type(),
                    msg.session_id
                )));
            }
            replies.push((party, msg.body));
        }
        Ok(replies)
    }

    fn await_done(&mut self, sid: u64, from: &[Party]) -> Result<()> {
        for (p, body) in self.await_replies(sid, from)? {
            if body != Message::Control(Control::Done) {
                return Err(Error::ProtocolOrder(format!(
                    "expected completion from {p}, got {:?}",
                    body.msg_type()
                )));
            }
        }
        Ok(())
    }

    /// Sends each server its assisted tuple.
    pub fn init(&mut self) -> Result<()> {
        let (a0, a1) = do_init(&self.pk, &self.sk, &mut self.rng)?;
        let sid = self.session();
        self.send(sid, Party::S0, Message::AssistedInit(a0))?;
        self.send(sid, Party::S1, Message::AssistedInit(a1))
    }

    /// Encrypts and shares `x`; returns the slot holding `⟦x⟧` and `⟨2αx⟩`.
    pub fn upload(&mut self, x: &BigInt) -> Result<u32> {
        let (r0, r1) = do_upload(&self.pk, &self.sk, x, &mut self.rng)?;
        self.upload_records(&r0, &r1)
    }

    /// Sends previously generated upload records to a fresh slot.
    pub fn upload_records(&mut self, r0: &UploadRecord, r1: &UploadRecord) -> Result<u32> {
        let slot = self.slot();
        let sid = self.session();
        for (p, r) in [(Party::S0, r0), (Party::S1, r1)] {
            self.send(
                sid,
                p,
                Message::UploadCt {
                    slot,
                    ct: r.ct.clone(),
                },
            )?;
            self.send(
                sid,
                p,
                Message::UploadShare {
                    slot,
                    share: r.share_2ax.clone(),
                },
            )?;
        }
        Ok(slot)
    }

    /// Shares of `2α·x·y` from `⟦x⟧` in slot `x` and `⟨2αy⟩` in slot `y`.
    pub fn smul(&mut self, x: u32, y: u32) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::Smul { x, y, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    pub fn reduce_theta(&mut self, slot: u32) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::ReduceTheta { slot, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    /// `⟦[x < y]⟧`, held by S0.
    pub fn scmp(&mut self, x: u32, y: u32, coin: Coin) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&[Party::S0], Control::ScmpStart { x, y, out, coin })?;
        self.await_done(sid, &[Party::S0])?;
        Ok(out)
    }

    pub fn s2c(&mut self, slot: u32) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::S2c { slot, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    pub fn c2s(&mut self, slot: u32) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::C2s { slot, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    pub fn linear(&mut self, op: LinearOp, a: u32, b: u32) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::Linear { op, a, b, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    pub fn scale(&mut self, part: SlotPart, a: u32, k: i64) -> Result<u32> {
        let out = self.slot();
        let sid = self.control(&SERVERS, Control::Scale { part, a, k, out })?;
        self.await_done(sid, &SERVERS)?;
        Ok(out)
    }

    pub fn fetch_shares(&mut self, slot: u32) -> Result<SharePair> {
        let sid = self.control(
            &SERVERS,
            Control::Fetch {
                slot,
                part: SlotPart::Share,
            },
        )?;
        let mut s0 = None;
        let mut s1 = None;
        for (p, body) in self.await_replies(sid, &SERVERS)? {
            match (p, body) {
                (Party::S0, Message::ResultShare { share, .. }) => s0 = Some(share),
                (Party::S1, Message::ResultShare { share, .. }) => s1 = Some(share),
                (p, b) => {
                    return Err(Error::ProtocolOrder(format!(
                        "expected a share from {p}, got {:?}",
                        b.msg_type()
                    )))
                }
            }
        }
        match (s0, s1) {
            (Some(a), Some(b)) => SharePair::new(a, b),
            _ => Err(Error::ProtocolOrder("missing share".into())),
        }
    }

    /// Ciphertext result from S0.
    pub fn fetch_ct(&mut self, slot: u32) -> Result<Ciphertext> {
        self.fetch_ct_from(Party::S0, slot)
    }

    /// Ciphertext result from a specific server. Only S0 may answer.
    pub fn fetch_ct_from(&mut self, server: Party, slot: u32) -> Result<Ciphertext> {
        let sid = self.control(
            &[server],
            Control::Fetch {
                slot,
                part: SlotPart::Ciphertext,
            },
        )?;
        match self.await_replies(sid, &[server])?.pop() {
            Some((_, Message::ResultCt { ct, .. })) => Ok(ct),
            other => Err(Error::ProtocolOrder(format!(
                "expected a ciphertext result, got {:?}",
                other.map(|(_, b)| b.msg_type())
            ))),
        }
    }

    pub fn recover_product(&mut self, slot: u32) -> Result<BigInt> {
        let pair = self.fetch_shares(slot)?;
        do_recover_product(&self.sk, &pair, self.pk.params())
    }

    pub fn recover_product_theta(&mut self, slot: u32) -> Result<BigInt> {
        let pair = self.fetch_shares(slot)?;
        let theta = std::sync::Arc::new(self.pk.params().theta());
        do_recover_product_theta(&self.sk, &pair, &theta, self.pk.params().data_bits)
    }

    pub fn decrypt(&mut self, slot: u32) -> Result<BigUint> {
        let ct = self.fetch_ct(slot)?;
        self.sk.decrypt(&ct)
    }

    pub fn decrypt_signed(&mut self, slot: u32, bound_bits: u32) -> Result<BigInt> {
        let ct = self.fetch_ct(slot)?;
        self.sk.decrypt_signed(&ct, bound_bits)
    }

    /// Combined counters of all three parties.
    pub fn meter(&mut self) -> Result<MeterSnapshot> {
        let sid = self.control(&SERVERS, Control::MeterQuery)?;
        let mut total = self.wire.meter();
        for (p, body) in self.await_replies(sid, &SERVERS)? {
            match body {
                Message::Control(Control::MeterReport(s)) => total = total + s,
                b => {
                    return Err(Error::ProtocolOrder(format!(
                        "expected a meter report from {p}, got {:?}",
                        b.msg_type()
                    )))
                }
            }
        }
        Ok(total)
    }

    pub fn shutdown(&mut self) -> Result<()> {
        if self.shut_down {
            return Ok(());
        }
        self.shut_down = true;
        self.control(&SERVERS, Control::Shutdown).map(|_| ())
    }
}

impl Drop for DataOwner {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}
