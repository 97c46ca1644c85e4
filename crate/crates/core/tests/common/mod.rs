#![allow(dead_code)]

pub mod oracle;

use std::sync::OnceLock;

use hss_core::fastpai::{keygen, keygen_with_y};
use hss_core::params::{ParamSet, SecurityParams};
use hss_core::{PrivateKey, PublicKey};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// N = 649 with y = 2, so h = 645.
pub fn toy_keys() -> (PublicKey, PrivateKey) {
    keygen_with_y(
        &ParamSet::toy(),
        &SecurityParams::toy(),
        &BigUint::from(2u32),
    )
    .unwrap()
}

/// A 1024-bit key with κ = 64 and l = 16, generated once per test binary.
pub fn medium_keys() -> &'static (PublicKey, PrivateKey) {
    static KEYS: OnceLock<(PublicKey, PrivateKey)> = OnceLock::new();
    KEYS.get_or_init(|| {
        let sp = SecurityParams::new(64, 1024, 64, 16).unwrap();
        keygen(&sp, &mut ChaCha20Rng::seed_from_u64(1024)).unwrap()
    })
}
