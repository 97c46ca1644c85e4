//! Share ↔ ciphertext conversions.
//!
//! S2C: each server turns its share of `2α·x·y` into a share of `x·y` with
//! `DDLog(⟦(2α)^-1⟧^⟨2α·x·y⟩ᵢ)`, encrypts it and sends it to the peer; both
//! then compute `⟦x·y⟧ = ⟦t₁⟧·⟦t₀⟧^-1`, which is byte-identical on the two
//! sides.
//!
//! C2S: S0 forwards `⟦μ⟧`, and each server computes `DDLog(⟦μ⟧^⟨2α⟩ᵢ)`.

use num_bigint::BigInt;
use rand::{CryptoRng, RngCore};

use super::AssistedTuple;
use crate::ddlog::ddlog;
use crate::error::{Error, Result};
use crate::fastpai::{Ciphertext, PublicKey};
use crate::sharing::{Role, Share, ShareContext, SharePair};

/// Local S2C state of one server.
#[derive(Clone, Debug)]
pub struct S2cLocal {
    /// Share of `x·y` in `Z_N`.
    pub t: Share,
    /// `⟦t⟧`, the one ciphertext this server sends to its peer.
    pub outbound: Ciphertext,
}

pub fn s2c_local<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    share_2axy: &Share,
    assisted: &AssistedTuple,
    rng: &mut R,
) -> Result<S2cLocal> {
    assisted.expect_role(share_2axy.role(), "convert another role's share")?;
    let g = assisted.ct_two_alpha_inv.scalar_mul(share_2axy.value())?;
    let t = ddlog(g.value(), pk.n())?;
    let outbound = pk.encrypt(&t, rng)?;
    Ok(S2cLocal {
        t: Share::new(
            BigInt::from(t),
            share_2axy.role(),
            ShareContext::ModN(pk.n_arc().clone()),
        ),
        outbound,
    })
}

/// `⟦x·y⟧ = ⟦t₁⟧ · ⟦t₀⟧^-1`, evaluated from either side.
pub fn s2c_combine(role: Role, own: &Ciphertext, peer: &Ciphertext) -> Result<Ciphertext> {
    let (t1, t0) = match role {
        Role::S0 => (peer, own),
        Role::S1 => (own, peer),
    };
    t1.sub(t0)
}

/// Both sides of S2C in-process; returns the two (identical) ciphertexts.
pub fn s2c_pair<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    shares: &SharePair,
    assisted: (&AssistedTuple, &AssistedTuple),
    rng: &mut R,
) -> Result<(Ciphertext, Ciphertext)> {
    let l0 = s2c_local(pk, &shares.s0, assisted.0, rng)?;
    let l1 = s2c_local(pk, &shares.s1, assisted.1, rng)?;
    let c0 = s2c_combine(Role::S0, &l0.outbound, &l1.outbound)?;
    let c1 = s2c_combine(Role::S1, &l1.outbound, &l0.outbound)?;
    Ok((c0, c1))
}

/// One server's half of C2S: a `Z_N` share of `2α·μ`.
pub fn c2s_local(pk: &PublicKey, ct_mu: &Ciphertext, assisted: &AssistedTuple) -> Result<Share> {
    if ct_mu.modulus() != pk.n_sq() {
        return Err(Error::ModulusMismatch);
    }
    let g = ct_mu.scalar_mul(assisted.two_alpha_share.value())?;
    let z = ddlog(g.value(), pk.n())?;
    Ok(Share::new(
        BigInt::from(z),
        assisted.role,
        ShareContext::ModN(pk.n_arc().clone()),
    ))
}

pub fn c2s_pair(
    pk: &PublicKey,
    ct_mu: &Ciphertext,
    assisted: (&AssistedTuple, &AssistedTuple),
) -> Result<SharePair> {
    SharePair::new(
        c2s_local(pk, ct_mu, assisted.0)?,
        c2s_local(pk, ct_mu, assisted.1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow2;
    use crate::fastpai::keygen_with_y;
    use crate::params::{ParamSet, SecurityParams};
    use crate::protocols::do_init;
    use crate::sharing::{reconstruct, share_signed};
    use num_bigint::BigUint;
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup(
        seed: u64,
    ) -> (
        PublicKey,
        crate::fastpai::PrivateKey,
        AssistedTuple,
        AssistedTuple,
        ChaCha20Rng,
    ) {
        let (pk, sk) = keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &BigUint::from(2u32),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (a0, a1) = do_init(&pk, &sk, &mut rng).unwrap();
        (pk, sk, a0, a1, rng)
    }

    #[test]
    fn s2c_of_integer_shares_of_twelve() {
        let (pk, sk, a0, a1, mut rng) = setup(1);
        let pair = share_signed(&BigInt::from(290 * 12), &pow2(13), 2, &mut rng).unwrap();
        let (c0, c1) = s2c_pair(&pk, &pair, (&a0, &a1), &mut rng).unwrap();
        assert_eq!(c0, c1);
        assert_eq!(sk.decrypt(&c0).unwrap(), BigUint::from(12u32));
        let zero = share_signed(&BigInt::zero(), &pow2(13), 2, &mut rng).unwrap();
        let (z0, _) = s2c_pair(&pk, &zero, (&a0, &a1), &mut rng).unwrap();
        assert_eq!(sk.decrypt(&z0).unwrap(), BigUint::zero());
    }

    #[test]
    fn c2s_of_one_and_zero() {
        let (pk, _sk, a0, a1, mut rng) = setup(2);
        let one = pk.encrypt(&BigUint::one(), &mut rng).unwrap();
        let zero = pk.encrypt(&BigUint::zero(), &mut rng).unwrap();
        assert_eq!(
            reconstruct(&c2s_pair(&pk, &one, (&a0, &a1)).unwrap()).unwrap(),
            BigInt::from(290)
        );
        assert_eq!(
            reconstruct(&c2s_pair(&pk, &zero, (&a0, &a1)).unwrap()).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn s2c_refuses_mismatched_role() {
        let (pk, _sk, a0, _a1, mut rng) = setup(3);
        let pair = share_signed(&BigInt::from(5), &pow2(13), 2, &mut rng).unwrap();
        assert!(s2c_local(&pk, &pair.s1, &a0, &mut rng).is_err());
    }
}
