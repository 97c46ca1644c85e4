use std::collections::HashMap;
use std::sync::mpsc::{channel, Receiver, Sender};

use super::{Event, Outbox, Wire};
use crate::error::{Error, Result};
use crate::fastpai::PublicKey;
use crate::sharing::Role;
use crate::wire::{MessageCodec, Party};

struct ChannelOutbox {
    me: Party,
    peers: HashMap<Party, Sender<Event>>,
}

impl Outbox for ChannelOutbox {
    fn send(&self, to: Party, frame: Vec<u8>) -> Result<()> {
        let tx = self
            .peers
            .get(&to)
            .ok_or_else(|| Error::Disconnected(format!("{} has no link to {to}", self.me)))?;
        tx.send(Event::Frame {
            from: self.me,
            bytes: frame,
        })
        .map_err(|_| Error::Disconnected(format!("{to} is gone")))
    }
}

type ServerParts = Vec<(Role, Wire, Receiver<Event>)>;

/// Fully connected channels between the owner and both servers.
pub(crate) fn channel_mesh(pk: &PublicKey) -> (Wire, Receiver<Event>, ServerParts) {
    let parties = [Party::Owner, Party::S0, Party::S1];
    let (txs, rxs): (Vec<_>, Vec<_>) = parties.iter().map(|_| channel::<Event>()).unzip();
    let codec = MessageCodec::new(pk);
    let mut wires: Vec<(Party, Wire, Receiver<Event>)> = parties
        .iter()
        .zip(rxs)
        .map(|(&me, rx)| {
            let peers = parties
                .iter()
                .zip(&txs)
                .filter(|(p, _)| **p != me)
                .map(|(p, tx)| (*p, tx.clone()))
                .collect();
            let outbox = ChannelOutbox { me, peers };
            (me, Wire::new(me, codec.clone(), Box::new(outbox)), rx)
        })
        .collect();
    let servers = wires
        .split_off(1)
        .into_iter()
        .map(|(p, w, rx)| (p.role().expect("server party"), w, rx))
        .collect();
    let (_, owner_wire, owner_rx) = wires.pop().expect("owner wire");
    (owner_wire, owner_rx, servers)
}
