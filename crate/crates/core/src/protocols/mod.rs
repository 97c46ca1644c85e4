//! The two-server protocol suite.
//!
//! Every function here is the local computation of one role. Messages that
//! would cross a link are returned as values; the transport layer moves
//! them. Functions that take both roles' inputs (`*_pair`, `*_local_run`)
//! are conveniences for tests and in-process drivers.

mod convert;
mod init;
mod poly;
mod scmp;
mod smul;

pub use convert::{c2s_local, c2s_pair, s2c_combine, s2c_local, s2c_pair, S2cLocal};
pub use init::{do_init, do_upload, AssistedTuple, UploadRecord};
pub use poly::{eval_poly_demo, plain_poly, PolyPath, POLY_SMULS};
pub use scmp::{
    r1_bound, scmp_run, scmp_s0_finalize, scmp_s0_round1, scmp_s1_round, Coin, ComparisonResult,
    S1View, ScmpRound1, ScmpSession,
};
pub use smul::{
    do_recover_product, do_recover_product_theta, do_recover_scaled, smul_local, smul_pair,
};

use rand::{CryptoRng, RngCore};

use crate::error::Result;
use crate::fastpai::{Ciphertext, PublicKey};

/// How stored `⟦0⟧`/`⟦1⟧` masks are applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rerandomize {
    /// Multiply by the ciphertexts from the assisted tuple.
    #[default]
    Stored,
    /// Encrypt a fresh zero or one under the public key instead.
    Fresh,
}

impl Rerandomize {
    pub(crate) fn mask<R: RngCore + CryptoRng>(
        self,
        pk: &PublicKey,
        stored: &Ciphertext,
        bit: u32,
        rng: &mut R,
    ) -> Result<Ciphertext> {
        match self {
            Rerandomize::Stored => Ok(stored.clone()),
            Rerandomize::Fresh => pk.encrypt(&bit.into(), rng),
        }
    }
}
