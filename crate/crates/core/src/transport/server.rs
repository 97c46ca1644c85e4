use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::fastpai::{Ciphertext, PublicKey};
use crate::protocols::{
    c2s_local, s2c_combine, s2c_local, scmp_s0_finalize, scmp_s0_round1, scmp_s1_round, smul_local,
    AssistedTuple, Rerandomize, ScmpSession,
};
use crate::sharing::{Role, Share};
use crate::wire::{Control, LinearOp, Message, Party, ProtocolMessage, SlotPart};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ServerConfig {
    pub role: Role,
    pub seed: u64,
    pub rerandomize: Rerandomize,
}

/// A message the endpoint wants delivered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub to: Party,
    pub msg: ProtocolMessage,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    ct: Option<Ciphertext>,
    share: Option<Share>,
}

enum S2cState {
    Sent { own: Ciphertext, out: u32 },
    PeerFirst(Ciphertext),
}

enum C2sState {
    Expecting { out: u32 },
    CtFirst(Ciphertext),
}

/// One server's protocol state. Feed it messages with [`handle`]; it
/// returns what to send. Transport-agnostic and single-owner.
///
/// [`handle`]: ServerEndpoint::handle
pub struct ServerEndpoint {
    cfg: ServerConfig,
    pk: PublicKey,
    theta: Arc<num_bigint::BigUint>,
    assisted: Option<AssistedTuple>,
    slots: HashMap<u32, Slot>,
    scmp: HashMap<u64, (ScmpSession, u32)>,
    s2c: HashMap<u64, S2cState>,
    c2s: HashMap<u64, C2sState>,
    shut_down: bool,
}

impl ServerEndpoint {
    pub fn new(cfg: ServerConfig, pk: PublicKey) -> Self {
        ServerEndpoint {
            theta: Arc::new(pk.params().theta()),
            cfg,
            pk,
            assisted: None,
            slots: HashMap::new(),
            scmp: HashMap::new(),
            s2c: HashMap::new(),
            c2s: HashMap::new(),
            shut_down: false,
        }
    }

    pub fn role(&self) -> Role {
        self.cfg.role
    }

    pub fn party(&self) -> Party {
        Party::server(self.cfg.role)
    }

    pub fn is_shut_down(&self) -> bool {
        self.shut_down
    }

    /// Number of comparisons waiting for S1's reply.
    pub fn open_comparisons(&self) -> usize {
        self.scmp.len()
    }

    /// Each (session, step) pair gets its own ChaCha stream, so outputs do
    /// not depend on how the transport interleaves sessions.
    fn rng(&self, session: u64, step: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(session);
        rng.set_word_pos(u128::from(step) << 64);
        rng
    }

    fn violation(&self, action: &'static str) -> Error {
        Error::RoleViolation {
            role: self.cfg.role,
            action,
        }
    }

    fn assisted(&self) -> Result<&AssistedTuple> {
        self.assisted
            .as_ref()
            .ok_or_else(|| Error::ProtocolOrder("no assisted tuple received yet".into()))
    }

    fn ct(&self, slot: u32) -> Result<&Ciphertext> {
        self.slots
            .get(&slot)
            .and_then(|s| s.ct.as_ref())
            .ok_or_else(|| Error::ProtocolOrder(format!("no ciphertext in slot {slot}")))
    }

    fn share(&self, slot: u32) -> Result<&Share> {
        self.slots
            .get(&slot)
            .and_then(|s| s.share.as_ref())
            .ok_or_else(|| Error::ProtocolOrder(format!("no share in slot {slot}")))
    }

    fn put_ct(&mut self, slot: u32, ct: Ciphertext) {
        self.slots.entry(slot).or_default().ct = Some(ct);
    }

    fn put_share(&mut self, slot: u32, share: Share) {
        self.slots.entry(slot).or_default().share = Some(share);
    }

    fn peer(&self) -> Party {
        Party::server(self.cfg.role.peer())
    }

    pub fn handle(&mut self, from: Party, msg: ProtocolMessage) -> Result<Vec<Outgoing>> {
        let sid = msg.session_id;
        let out = |to: Party, body: Message| Outgoing {
            to,
            msg: ProtocolMessage::new(sid, body),
        };
        let done = || out(Party::Owner, Message::Control(Control::Done));
        let role = self.cfg.role;
        match msg.body {
            Message::UploadCt { slot, ct } => {
                self.expect_owner(from)?;
                self.put_ct(slot, ct);
                Ok(vec![])
            }
            Message::UploadShare { slot, share } => {
                self.expect_owner(from)?;
                if share.role() != role {
                    return Err(self.violation("store another role's share"));
                }
                self.put_share(slot, share);
                Ok(vec![])
            }
            Message::AssistedInit(tuple) => {
                self.expect_owner(from)?;
                tuple.expect_role(role, "store another role's assisted tuple")?;
                self.assisted = Some(tuple);
                Ok(vec![])
            }
            Message::ScmpRound1(r1) => {
                if role != Role::S1 || from != Party::S0 {
                    return Err(self.violation("accept a first comparison round"));
                }
                let mut rng = self.rng(sid, 0);
                let (mu0, _) = scmp_s1_round(
                    &self.pk,
                    &r1,
                    self.assisted()?,
                    self.cfg.rerandomize,
                    &mut rng,
                )?;
                Ok(vec![out(Party::S0, Message::ScmpRound2(mu0))])
            }
            Message::ScmpRound2(mu0) => {
                if role != Role::S0 || from != Party::S1 {
                    return Err(self.violation("accept a second comparison round"));
                }
                let (session, slot) = self.scmp.remove(&sid).ok_or_else(|| {
                    Error::ProtocolOrder(format!(
                        "second comparison round for unknown session {sid}"
                    ))
                })?;
                let mut rng = self.rng(sid, 1);
                let res = scmp_s0_finalize(
                    &self.pk,
                    session,
                    sid,
                    &mu0,
                    self.assisted()?,
                    self.cfg.rerandomize,
                    &mut rng,
                )?;
                self.put_ct(slot, res.ct_mu);
                Ok(vec![done()])
            }
            Message::S2cShareCt(peer_ct) => {
                if from != self.peer() {
                    return Err(self.violation("accept a conversion ciphertext"));
                }
                match self.s2c.remove(&sid) {
                    Some(S2cState::Sent { own, out: slot }) => {
                        let ct = s2c_combine(role, &own, &peer_ct)?;
                        self.put_ct(slot, ct);
                        Ok(vec![done()])
                    }
                    Some(S2cState::PeerFirst(_)) => Err(Error::ProtocolOrder(format!(
                        "duplicate conversion ciphertext in session {sid}"
                    ))),
                    None => {
                        self.s2c.insert(sid, S2cState::PeerFirst(peer_ct));
                        Ok(vec![])
                    }
                }
            }
            Message::C2sCt(ct) => {
                if role != Role::S1 || from != Party::S0 {
                    return Err(self.violation("accept a ciphertext to split"));
                }
                match self.c2s.remove(&sid) {
                    Some(C2sState::Expecting { out: slot }) => {
                        let share = c2s_local(&self.pk, &ct, self.assisted()?)?;
                        self.put_share(slot, share);
                        Ok(vec![done()])
                    }
                    Some(C2sState::CtFirst(_)) => Err(Error::ProtocolOrder(format!(
                        "duplicate ciphertext to split in session {sid}"
                    ))),
                    None => {
                        self.c2s.insert(sid, C2sState::CtFirst(ct));
                        Ok(vec![])
                    }
                }
            }
            Message::ResultShare { .. } | Message::ResultCt { .. } => {
                Err(self.violation("receive a result message"))
            }
            Message::Control(c) => {
                self.expect_owner(from)?;
                self.control(sid, c, out, done)
            }
        }
    }

    fn expect_owner(&self, from: Party) -> Result<()> {
        if from != Party::Owner {
            return Err(Error::ProtocolOrder(format!(
                "{} accepts this message only from the data owner, got {from}",
                self.party()
            )));
        }
        Ok(())
    }

    fn control(
        &mut self,
        sid: u64,
        c: Control,
        out: impl Fn(Party, Message) -> Outgoing,
        done: impl Fn() -> Outgoing,
    ) -> Result<Vec<Outgoing>> {
        let role = self.cfg.role;
        match c {
            Control::Shutdown => {
                self.shut_down = true;
                Ok(vec![])
            }
            Control::Smul { x, y, out: slot } => {
                let z = smul_local(&self.pk, self.ct(x)?, self.share(y)?)?;
                self.put_share(slot, z);
                Ok(vec![done()])
            }
            Control::ReduceTheta { slot, out: dst } => {
                let reduced = self.share(slot)?.reduce_mod_theta(&self.theta)?;
                self.put_share(dst, reduced);
                Ok(vec![done()])
            }
            Control::ScmpStart {
                x,
                y,
                out: slot,
                coin,
            } => {
                if role != Role::S0 {
                    return Err(self.violation("start a comparison"));
                }
                if self.scmp.contains_key(&sid) {
                    return Err(Error::ProtocolOrder(format!(
                        "comparison {sid} already open"
                    )));
                }
                let mut rng = self.rng(sid, 0);
                let (msg, session) = scmp_s0_round1(
                    &self.pk,
                    sid,
                    self.ct(x)?,
                    self.ct(y)?,
                    self.assisted()?,
                    coin,
                    &mut rng,
                )?;
                self.scmp.insert(sid, (session, slot));
                Ok(vec![out(Party::S1, Message::ScmpRound1(msg))])
            }
            Control::S2c { slot, out: dst } => {
                if matches!(self.s2c.get(&sid), Some(S2cState::Sent { .. })) {
                    return Err(Error::ProtocolOrder(format!(
                        "conversion {sid} already started"
                    )));
                }
                let mut rng = self.rng(sid, 0);
                let local = s2c_local(&self.pk, self.share(slot)?, self.assisted()?, &mut rng)?;
                let mut msgs = vec![out(
                    self.peer(),
                    Message::S2cShareCt(local.outbound.clone()),
                )];
                match self.s2c.remove(&sid) {
                    Some(S2cState::PeerFirst(peer_ct)) => {
                        let ct = s2c_combine(role, &local.outbound, &peer_ct)?;
                        self.put_ct(dst, ct);
                        msgs.push(done());
                    }
                    _ => {
                        self.s2c.insert(
                            sid,
                            S2cState::Sent {
                                own: local.outbound,
                                out: dst,
                            },
                        );
                    }
                }
                Ok(msgs)
            }
            Control::C2s { slot, out: dst } => match role {
                Role::S0 => {
                    let ct = self.ct(slot)?.clone();
                    let share = c2s_local(&self.pk, &ct, self.assisted()?)?;
                    self.put_share(dst, share);
                    Ok(vec![out(Party::S1, Message::C2sCt(ct)), done()])
                }
                Role::S1 => match self.c2s.remove(&sid) {
                    Some(C2sState::CtFirst(ct)) => {
                        let share = c2s_local(&self.pk, &ct, self.assisted()?)?;
                        self.put_share(dst, share);
                        Ok(vec![done()])
                    }
                    Some(C2sState::Expecting { .. }) => Err(Error::ProtocolOrder(format!(
                        "conversion {sid} already started"
                    ))),
                    None => {
                        self.c2s.insert(sid, C2sState::Expecting { out: dst });
                        Ok(vec![])
                    }
                },
            },
            Control::Fetch { slot, part } => match part {
                SlotPart::Share => {
                    let share = self.share(slot)?.clone();
                    Ok(vec![out(
                        Party::Owner,
                        Message::ResultShare { slot, share },
                    )])
                }
                SlotPart::Ciphertext => {
                    if role != Role::S0 {
                        return Err(self.violation("send a ciphertext result to the data owner"));
                    }
                    let ct = self.ct(slot)?.clone();
                    Ok(vec![out(Party::Owner, Message::ResultCt { slot, ct })])
                }
            },
            Control::Linear { op, a, b, out: dst } => {
                match op {
                    LinearOp::AddShares | LinearOp::SubShares => {
                        let (x, y) = (self.share(a)?, self.share(b)?);
                        let r = if op == LinearOp::AddShares {
                            x.add(y)?
                        } else {
                            x.sub(y)?
                        };
                        self.put_share(dst, r);
                    }
                    LinearOp::AddCts | LinearOp::SubCts => {
                        let (x, y) = (self.ct(a)?, self.ct(b)?);
                        let r = if op == LinearOp::AddCts {
                            x.add(y)?
                        } else {
                            x.sub(y)?
                        };
                        self.put_ct(dst, r);
                    }
                }
                Ok(vec![done()])
            }
            Control::Scale {
                part,
                a,
                k,
                out: dst,
            } => {
                let k = BigInt::from(k);
                match part {
                    SlotPart::Share => {
                        let r = self.share(a)?.scalar_mul(&k);
                        self.put_share(dst, r);
                    }
                    SlotPart::Ciphertext => {
                        let r = self.ct(a)?.scalar_mul(&k)?;
                        self.put_ct(dst, r);
                    }
                }
                Ok(vec![done()])
            }
            Control::Hello(_)
            | Control::MeterQuery
            | Control::MeterReport(_)
            | Control::Done
            | Control::Error(_) => Err(Error::ProtocolOrder(format!(
                "unexpected control message at {}",
                self.party()
            ))),
        }
    }
}
