//! Per-link payload accounting.
//!
//! Only message payloads are counted. Frame headers and control traffic are
//! excluded, so the numbers line up with closed-form bit counts.

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::wire::Party;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    S0ToS1,
    S1ToS0,
    ServerToOwner,
    OwnerToServer,
}

impl Link {
    pub const ALL: [Link; 4] = [
        Link::S0ToS1,
        Link::S1ToS0,
        Link::ServerToOwner,
        Link::OwnerToServer,
    ];

    pub fn between(from: Party, to: Party) -> Option<Link> {
        match (from, to) {
            (Party::S0, Party::S1) => Some(Link::S0ToS1),
            (Party::S1, Party::S0) => Some(Link::S1ToS0),
            (Party::S0 | Party::S1, Party::Owner) => Some(Link::ServerToOwner),
            (Party::Owner, Party::S0 | Party::S1) => Some(Link::OwnerToServer),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::S0ToS1 => "s0_to_s1",
            Link::S1ToS0 => "s1_to_s0",
            Link::ServerToOwner => "servers_to_owner",
            Link::OwnerToServer => "owner_to_servers",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// A point-in-time copy of the counters, in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeterSnapshot {
    pub bits: [u64; 4],
}

impl MeterSnapshot {
    pub fn get(&self, link: Link) -> u64 {
        self.bits[link.index()]
    }

    /// Traffic between the two servers in either direction.
    pub fn inter_server_bits(&self) -> u64 {
        self.get(Link::S0ToS1) + self.get(Link::S1ToS0)
    }

    pub fn total_bits(&self) -> u64 {
        self.bits.iter().sum()
    }
}

impl Add for MeterSnapshot {
    type Output = MeterSnapshot;

    fn add(self, rhs: MeterSnapshot) -> MeterSnapshot {
        let mut bits = self.bits;
        for (a, b) in bits.iter_mut().zip(rhs.bits) {
            *a += b;
        }
        MeterSnapshot { bits }
    }
}

impl Sub for MeterSnapshot {
    type Output = MeterSnapshot;

    fn sub(self, rhs: MeterSnapshot) -> MeterSnapshot {
        let mut bits = self.bits;
        for (a, b) in bits.iter_mut().zip(rhs.bits) {
            *a = a.saturating_sub(b);
        }
        MeterSnapshot { bits }
    }
}

impl fmt::Display for MeterSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, link) in Link::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={}", link.name(), self.get(*link))?;
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct CommMeter {
    bits: [AtomicU64; 4],
}

impl CommMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, link: Link, payload_bytes: usize) {
        self.bits[link.index()].fetch_add(payload_bytes as u64 * 8, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        let mut bits = [0u64; 4];
        for (out, c) in bits.iter_mut().zip(&self.bits) {
            *out = c.load(Ordering::Relaxed);
        }
        MeterSnapshot { bits }
    }
}
