use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{mod_signed, pow2};
use crate::ddlog::ddlog;
use crate::error::{Error, Result};
use crate::fastpai::{decode_signed, Ciphertext, PrivateKey, PublicKey};
use crate::params::SecurityParams;
use crate::sharing::{reconstruct, Share, ShareContext, SharePair};

/// One server's half of the secure multiplication. Purely local.
///
/// `g = ⟦x⟧^⟨2α·y⟩ᵢ mod N^2` followed by `z = DDLog_N(g)`; the two roles'
/// outputs satisfy `z₁ - z₀ ≡ 2α·x·y (mod N)`.
pub fn smul_local(pk: &PublicKey, ct_x: &Ciphertext, share_2ay: &Share) -> Result<Share> {
    if ct_x.modulus() != pk.n_sq() {
        return Err(Error::ModulusMismatch);
    }
    let g = ct_x.scalar_mul(share_2ay.value())?;
    let z = ddlog(g.value(), pk.n())?;
    Ok(Share::new(
        BigInt::from(z),
        share_2ay.role(),
        ShareContext::ModN(pk.n_arc().clone()),
    ))
}

pub fn smul_pair(pk: &PublicKey, ct_x: &Ciphertext, shares_2ay: &SharePair) -> Result<SharePair> {
    SharePair::new(
        smul_local(pk, ct_x, &shares_2ay.s0)?,
        smul_local(pk, ct_x, &shares_2ay.s1)?,
    )
}

/// `decode((z₁ - z₀)·(2α)^-1 mod N)` with magnitude bound `2^bound_bits`.
pub fn do_recover_scaled(sk: &PrivateKey, pair: &SharePair, bound_bits: u32) -> Result<BigInt> {
    let diff = mod_signed(&reconstruct(pair)?, sk.n());
    let m = (diff * sk.two_alpha_inv()) % sk.n();
    decode_signed(&m, sk.n(), bound_bits).map_err(|_| Error::RecoveredOutOfRange { bound_bits })
}

/// Data-owner recovery of `x·y` from the shares of `2α·x·y`, bounded by `2^(2l)`.
pub fn do_recover_product(
    sk: &PrivateKey,
    pair: &SharePair,
    params: &SecurityParams,
) -> Result<BigInt> {
    do_recover_scaled(sk, pair, 2 * params.data_bits)
}

/// Recovery after both servers reduced their shares modulo θ.
///
/// Over the integers `z₁ - z₀` is either `2α·xy` or `2α·xy - N`, so the
/// difference mod θ is tested both as-is and shifted by `N mod θ`. The
/// unique candidate that is a multiple of `2α` with quotient in `[0, 2^l]`
/// is accepted.
pub fn do_recover_product_theta(
    sk: &PrivateKey,
    pair: &SharePair,
    theta: &Arc<BigUint>,
    data_bits: u32,
) -> Result<BigInt> {
    if **theta >= *sk.n() {
        return Err(Error::ThetaTooLarge);
    }
    for s in [&pair.s0, &pair.s1] {
        match s.context() {
            ShareContext::ModTheta(t) if t == theta => {}
            _ => return Err(Error::ContextMismatch),
        }
    }
    let z = mod_signed(&reconstruct(pair)?, theta);
    let shifted = (&z + sk.n() % &**theta) % &**theta;
    let limit = pow2(data_bits as u64);
    let accept = |cand: &BigUint| -> Option<BigUint> {
        let (q, r) = cand.div_rem(sk.two_alpha());
        (r.is_zero() && q <= limit).then_some(q)
    };
    match (accept(&z), accept(&shifted)) {
        (Some(q), None) | (None, Some(q)) => Ok(BigInt::from(q)),
        (Some(a), Some(b)) if a == b => Ok(BigInt::from(a)),
        _ => Err(Error::UnrecoverableWrap),
    }
}
