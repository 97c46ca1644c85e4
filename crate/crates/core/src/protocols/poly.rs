//! `f(x) = x⁵ + x⁴ + x³ + x² + x + 1` from one upload and four consecutive
//! secure multiplications.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::{CryptoRng, RngCore};

use super::{do_recover_product_theta, do_upload, s2c_pair, smul_local, smul_pair, AssistedTuple};
use crate::error::{Error, Result};
use crate::fastpai::{PrivateKey, PublicKey};
use crate::sharing::SharePair;

/// Number of secure multiplications per evaluation.
pub const POLY_SMULS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyPath {
    /// Each power is turned back into a ciphertext with S2C and the next
    /// SMUL uses it as the base; the data owner decrypts the sum.
    ReEncrypt,
    /// `Z_N` shares are reduced mod θ and used directly as the next exponent;
    /// the data owner recovers the sum with the wrap repair.
    ThetaReduced,
}

pub fn plain_poly(x: &BigInt) -> BigInt {
    let mut acc = BigInt::one();
    let mut pow = BigInt::one();
    for _ in 0..5 {
        pow *= x;
        acc += &pow;
    }
    acc
}

/// Runs the whole pipeline (upload, four SMULs, recovery) in-process.
pub fn eval_poly_demo<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    sk: &PrivateKey,
    assisted: (&AssistedTuple, &AssistedTuple),
    x: &BigInt,
    path: PolyPath,
    rng: &mut R,
) -> Result<BigInt> {
    let (u0, u1) = do_upload(pk, sk, x, rng)?;
    let shares_2ax = SharePair::new(u0.share_2ax, u1.share_2ax)?;
    let params = pk.params();
    match path {
        PolyPath::ReEncrypt => {
            let mut sum = u0.ct.add(&assisted.0.ct_one)?;
            let mut ct_pow = u0.ct;
            for _ in 0..POLY_SMULS {
                let z = smul_pair(pk, &ct_pow, &shares_2ax)?;
                let (c0, c1) = s2c_pair(pk, &z, assisted, rng)?;
                if c0 != c1 {
                    return Err(Error::ProtocolOrder("S2C outputs diverged".into()));
                }
                sum = sum.add(&c0)?;
                ct_pow = c0;
            }
            sk.decrypt_signed(&sum, 5 * params.data_bits + 3)
        }
        PolyPath::ThetaReduced => {
            let theta = Arc::new(params.theta());
            let ct_x = &u0.ct;
            let two_alpha = SharePair::new(
                assisted.0.two_alpha_share.clone(),
                assisted.1.two_alpha_share.clone(),
            )?;
            let mut acc = shares_2ax
                .reduce_mod_theta(&theta)?
                .add(&two_alpha.reduce_mod_theta(&theta)?)?;
            let mut cur = shares_2ax;
            for _ in 0..POLY_SMULS {
                let next = SharePair::new(
                    smul_local(pk, ct_x, &cur.s0)?,
                    smul_local(pk, ct_x, &cur.s1)?,
                )?
                .reduce_mod_theta(&theta)?;
                acc = acc.add(&next)?;
                cur = next;
            }
            do_recover_product_theta(sk, &acc, &theta, params.data_bits)
        }
    }
}
