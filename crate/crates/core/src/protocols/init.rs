use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::arith::pow2;
use crate::error::{Error, Result};
use crate::fastpai::{encode_signed, Ciphertext, PrivateKey, PublicKey};
use crate::sharing::{share_signed, Role, Share};

/// Per-server bootstrap material `{⟨2α⟩ᵢ, ⟦(2α)^-1⟧, ⟦0⟧, ⟦1⟧}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssistedTuple {
    pub role: Role,
    pub two_alpha_share: Share,
    pub ct_two_alpha_inv: Ciphertext,
    pub ct_zero: Ciphertext,
    pub ct_one: Ciphertext,
}

impl AssistedTuple {
    pub(crate) fn expect_role(&self, role: Role, action: &'static str) -> Result<()> {
        if self.role != role || self.two_alpha_share.role() != role {
            return Err(Error::RoleViolation {
                role: self.role,
                action,
            });
        }
        Ok(())
    }
}

/// What one server stores for an uploaded value `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UploadRecord {
    pub ct: Ciphertext,
    pub share_2ax: Share,
}

/// Data-owner setup: shares `2α` over the integers and encrypts
/// `(2α)^-1 mod N`, `0` and `1` once for both servers.
pub fn do_init<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    sk: &PrivateKey,
    rng: &mut R,
) -> Result<(AssistedTuple, AssistedTuple)> {
    let params = pk.params();
    let bound = pow2(params.two_alpha_bound_bits() as u64);
    let pair = share_signed(
        &BigInt::from(sk.two_alpha().clone()),
        &bound,
        params.kappa,
        rng,
    )?;
    let ct_two_alpha_inv = pk.encrypt(sk.two_alpha_inv(), rng)?;
    let ct_zero = pk.encrypt(&BigUint::zero(), rng)?;
    let ct_one = pk.encrypt(&BigUint::one(), rng)?;
    let make = |role: Role, share: Share| AssistedTuple {
        role,
        two_alpha_share: share,
        ct_two_alpha_inv: ct_two_alpha_inv.clone(),
        ct_zero: ct_zero.clone(),
        ct_one: ct_one.clone(),
    };
    Ok((make(Role::S0, pair.s0), make(Role::S1, pair.s1)))
}

/// Encrypts `x` and shares `2α·x` over the integers with bound
/// `2^l · 2^(4κ+1)`. Both records carry the same ciphertext.
pub fn do_upload<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    sk: &PrivateKey,
    x: &BigInt,
    rng: &mut R,
) -> Result<(UploadRecord, UploadRecord)> {
    let params = pk.params();
    let m = encode_signed(x, pk.n(), params.data_bits)?;
    let ct = pk.encrypt(&m, rng)?;
    let secret = x * BigInt::from(sk.two_alpha().clone());
    let bound = pow2(params.upload_bound_bits() as u64);
    let pair = share_signed(&secret, &bound, params.kappa, rng)?;
    Ok((
        UploadRecord {
            ct: ct.clone(),
            share_2ax: pair.s0,
        },
        UploadRecord {
            ct,
            share_2ax: pair.s1,
        },
    ))
}
