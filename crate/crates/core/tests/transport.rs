mod common;

use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use common::toy_keys;
use hss_core::error::Error;
use hss_core::fastpai::Ciphertext;
use hss_core::meter::{Link, MeterSnapshot};
use hss_core::protocols::{Coin, Rerandomize};
use hss_core::sharing::Role;
use hss_core::transport::{
    connect_owner, run_session, DataOwner, ServerConfig, ServerEndpoint, SessionConfig, Topology,
};
use hss_core::wire::{Control, Message, MessageCodec, Party, ProtocolMessage, HEADER_LEN};
use num_bigint::{BigInt, BigUint};

#[derive(Debug, PartialEq)]
struct Outputs {
    product: BigInt,
    mu: Ciphertext,
    s2c: Ciphertext,
    c2s: BigInt,
    per_op: Vec<MeterSnapshot>,
}

fn script(owner: &mut DataOwner) -> hss_core::Result<Outputs> {
    let mut per_op = Vec::new();
    let x = owner.upload(&BigInt::from(3))?;
    let y = owner.upload(&BigInt::from(4))?;
    let mut before = owner.meter()?;
    let mut mark = |owner: &mut DataOwner, per_op: &mut Vec<MeterSnapshot>| {
        let now = owner.meter().unwrap();
        per_op.push(now - before);
        before = now;
    };
    let z = owner.smul(x, y)?;
    mark(owner, &mut per_op);
    let mu = owner.scmp(x, y, Coin::Forced(true))?;
    mark(owner, &mut per_op);
    // The upload share is an integer share of 2α·x, so S2C yields ⟦x⟧.
    let ct = owner.s2c(y)?;
    mark(owner, &mut per_op);
    let sh = owner.c2s(x)?;
    mark(owner, &mut per_op);
    let product = owner.recover_product(z)?;
    let mu = owner.fetch_ct(mu)?;
    let s2c = owner.fetch_ct(ct)?;
    let c2s = hss_core::sharing::reconstruct(&owner.fetch_shares(sh)?)?;
    Ok(Outputs {
        product,
        mu,
        s2c,
        c2s,
        per_op,
    })
}

#[test]
fn in_process_and_loopback_agree_bit_for_bit() {
    let (pk, sk) = toy_keys();
    let cfg = SessionConfig::with_seed(42);
    let (a, meter_a) = run_session(&Topology::InProcess, &pk, &sk, cfg, script).unwrap();
    let (b, meter_b) = run_session(&Topology::Loopback, &pk, &sk, cfg, script).unwrap();
    assert_eq!(a, b);
    assert_eq!(meter_a, meter_b);
    assert_eq!(a.product, BigInt::from(12));
    assert_eq!(sk.decrypt(&a.s2c).unwrap(), BigUint::from(4u32));
    // c2s(⟦3⟧) reconstructs to 2α·3 mod N.
    assert_eq!(a.c2s, BigInt::from(290 * 3 % 649));
}

#[test]
fn per_operation_inter_server_traffic() {
    let (pk, sk) = toy_keys();
    let (out, _) = run_session(
        &Topology::InProcess,
        &pk,
        &sk,
        SessionConfig::with_seed(1),
        script,
    )
    .unwrap();
    let w_bits = 8 * pk.byte_width() as u64;
    let inter: Vec<u64> = out.per_op.iter().map(|m| m.inter_server_bits()).collect();
    assert_eq!(inter, vec![0, 5 * w_bits, 4 * w_bits, 2 * w_bits]);
    let scmp = out.per_op[1];
    assert_eq!(scmp.get(Link::S0ToS1), 3 * w_bits);
    assert_eq!(scmp.get(Link::S1ToS0), 2 * w_bits);
    for m in &out.per_op {
        assert_eq!(m.get(Link::ServerToOwner), 0);
        assert_eq!(m.get(Link::OwnerToServer), 0);
    }
}

#[test]
fn same_seed_same_results() {
    let (pk, sk) = toy_keys();
    let run = |seed| {
        run_session(
            &Topology::InProcess,
            &pk,
            &sk,
            SessionConfig::with_seed(seed),
            script,
        )
        .unwrap()
        .0
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).mu, run(6).mu);
}

#[test]
fn s1_ciphertext_fetch_is_refused() {
    let (pk, sk) = toy_keys();
    let (res, _) = run_session(
        &Topology::InProcess,
        &pk,
        &sk,
        SessionConfig::with_seed(3),
        |owner| {
            let x = owner.upload(&BigInt::from(1))?;
            Ok(owner.fetch_ct_from(Party::S1, x))
        },
    )
    .unwrap();
    assert!(matches!(res, Err(Error::Remote(msg)) if msg.contains("S1")));
}

#[test]
fn owner_rejects_ciphertext_results_from_s1() {
    let (pk, sk) = toy_keys();
    let codec = MessageCodec::new(&pk);
    let l0 = TcpListener::bind("127.0.0.1:0").unwrap();
    let l1 = TcpListener::bind("127.0.0.1:0").unwrap();
    let (a0, a1) = (l0.local_addr().unwrap(), l1.local_addr().unwrap());
    let ct = pk.trivial(&BigUint::from(1u32)).unwrap();
    let rogue = thread::spawn(move || {
        let _s0 = l0.accept().unwrap().0;
        let mut s1 = l1.accept().unwrap().0;
        let mut read_frame = || {
            let mut h = [0u8; HEADER_LEN];
            s1.read_exact(&mut h).unwrap();
            let len = u32::from_be_bytes(h[14..18].try_into().unwrap()) as usize;
            let mut body = vec![0u8; len];
            s1.read_exact(&mut body).unwrap();
            (h, body)
        };
        let _hello = read_frame();
        let (h, _) = read_frame();
        let sid = u64::from_be_bytes(h[6..14].try_into().unwrap());
        let reply = codec
            .encode(&ProtocolMessage::new(
                sid,
                Message::ResultCt { slot: 0, ct },
            ))
            .unwrap();
        s1.write_all(&reply).unwrap();
        thread::sleep(Duration::from_millis(200));
    });
    let mut owner = connect_owner(&pk, &sk, 0, a0, a1, Duration::from_secs(5)).unwrap();
    let err = owner.fetch_ct_from(Party::S1, 0).unwrap_err();
    assert!(matches!(err, Error::RoleViolation { role: Role::S1, .. }));
    drop(owner);
    rogue.join().unwrap();
}

#[test]
fn second_round_before_first_is_rejected() {
    let (pk, _) = toy_keys();
    let mut s0 = ServerEndpoint::new(
        ServerConfig {
            role: Role::S0,
            seed: 0,
            rerandomize: Rerandomize::Stored,
        },
        pk.clone(),
    );
    let ct = pk.trivial(&BigUint::from(0u32)).unwrap();
    let err = s0
        .handle(Party::S1, ProtocolMessage::new(9, Message::ScmpRound2(ct)))
        .unwrap_err();
    assert!(matches!(err, Error::ProtocolOrder(_)));
    assert_eq!(s0.open_comparisons(), 0);
}

#[test]
fn owner_cannot_inject_peer_messages() {
    let (pk, sk) = toy_keys();
    let (res, _) = run_session(
        &Topology::InProcess,
        &pk,
        &sk,
        SessionConfig::with_seed(4),
        |owner| {
            let ct = owner.public_key().trivial(&BigUint::from(1u32))?;
            let sid = owner.send_raw(Party::S0, Message::ScmpRound2(ct))?;
            Ok(owner.await_replies(sid, &[Party::S0]))
        },
    )
    .unwrap();
    assert!(matches!(res, Err(Error::Remote(_))));
}

#[test]
fn unknown_control_from_owner_reported() {
    let (pk, sk) = toy_keys();
    let (res, _) = run_session(
        &Topology::InProcess,
        &pk,
        &sk,
        SessionConfig::with_seed(4),
        |owner| {
            let sid = owner.send_raw(Party::S1, Message::Control(Control::Done))?;
            Ok(owner.await_replies(sid, &[Party::S1]))
        },
    )
    .unwrap();
    assert!(matches!(res, Err(Error::Remote(_))));
}
