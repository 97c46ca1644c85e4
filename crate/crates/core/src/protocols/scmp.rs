//! Secure comparison. Only S0 learns the output `⟦μ⟧`, with `μ = 0` iff
//! `x ≥ y`.
//!
//! S0 blinds the difference with a coin `π`, a factor `r₁ ∈ {0,1}^σ \ {0}`
//! and an offset `r₂ ∈ (N/2 - r₁, N/2]`. S1 only sees which side of `N/2`
//! the blinded value `d` falls on, which is an unbiased coin.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{CryptoRng, Rng, RngCore};

use super::{AssistedTuple, Rerandomize};
use crate::arith::{mod_signed, pow2};
use crate::ddlog::ddlog;
use crate::error::{Error, Result};
use crate::fastpai::{Ciphertext, PublicKey};
use crate::sharing::Role;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Coin {
    #[default]
    Random,
    /// Fix `π` (for tests and instrumented runs).
    Forced(bool),
}

/// S0 → S1: `(D, z₀ - r₂ mod N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScmpRound1 {
    pub d: Ciphertext,
    pub z0_masked: BigUint,
}

/// S0's private state between its two steps. Consumed by
/// [`scmp_s0_finalize`], which drops `π`, `r₁` and `r₂`.
#[derive(Debug)]
pub struct ScmpSession {
    id: u64,
    pi: bool,
    r1: BigUint,
    r2: BigUint,
}

impl ScmpSession {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn pi(&self) -> bool {
        self.pi
    }

    pub fn r1(&self) -> &BigUint {
        &self.r1
    }

    pub fn r2(&self) -> &BigUint {
        &self.r2
    }
}

/// What S1 computed locally; exposed for instrumentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct S1View {
    pub d: BigUint,
    pub above_half: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonResult {
    /// Decrypts to 0 iff `x ≥ y`, 1 iff `x < y`.
    pub ct_mu: Ciphertext,
}

pub fn scmp_s0_round1<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    session_id: u64,
    ct_x: &Ciphertext,
    ct_y: &Ciphertext,
    assisted: &AssistedTuple,
    coin: Coin,
    rng: &mut R,
) -> Result<(ScmpRound1, ScmpSession)> {
    assisted.expect_role(Role::S0, "start a comparison")?;
    let n = pk.n();
    let sigma = pk.params().sigma as u64;
    let r1 = loop {
        let r = rng.gen_biguint(sigma);
        if !r.is_zero() {
            break r;
        }
    };
    // N is odd: r₂ ≤ ⌊N/2⌋ and r₁ + r₂ ≥ ⌊N/2⌋ + 1.
    let half = n >> 1u32;
    let r2_lo = if r1 > half {
        BigUint::zero()
    } else {
        &half + 1u32 - &r1
    };
    let r2 = rng.gen_biguint_range(&r2_lo, &(&half + 1u32));
    let pi = match coin {
        Coin::Random => rng.gen::<bool>(),
        Coin::Forced(b) => b,
    };
    let base = if pi {
        ct_y.sub(ct_x)?
    } else {
        ct_x.sub(ct_y)?.add(&assisted.ct_one)?
    };
    let d = base.scalar_mul_unsigned(&r1);
    let g = d.scalar_mul(assisted.two_alpha_share.value())?;
    let z0 = ddlog(g.value(), n)?;
    let z0_masked = mod_signed(&(BigInt::from(z0) - BigInt::from(r2.clone())), n);
    Ok((
        ScmpRound1 { d, z0_masked },
        ScmpSession {
            id: session_id,
            pi,
            r1,
            r2,
        },
    ))
}

/// S1's step: `d = DDLog(D^⟨2α⟩₁) - z₀ mod N`, reply `⟦0⟧` if `d > N/2`
/// and `⟦1⟧` otherwise.
pub fn scmp_s1_round<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    msg: &ScmpRound1,
    assisted: &AssistedTuple,
    rerandomize: Rerandomize,
    rng: &mut R,
) -> Result<(Ciphertext, S1View)> {
    assisted.expect_role(Role::S1, "answer a comparison")?;
    let n = pk.n();
    if msg.z0_masked >= *n || msg.d.modulus() != pk.n_sq() {
        return Err(Error::InvalidCiphertext);
    }
    let g = msg.d.scalar_mul(assisted.two_alpha_share.value())?;
    let z1 = ddlog(g.value(), n)?;
    let d = mod_signed(&(BigInt::from(z1) - BigInt::from(msg.z0_masked.clone())), n);
    let above_half = d > (n >> 1u32);
    let reply = if above_half {
        rerandomize.mask(pk, &assisted.ct_zero, 0, rng)?
    } else {
        rerandomize.mask(pk, &assisted.ct_one, 1, rng)?
    };
    Ok((reply, S1View { d, above_half }))
}

/// S0's last step: undo the coin and re-mask with `⟦0⟧`.
pub fn scmp_s0_finalize<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    session: ScmpSession,
    session_id: u64,
    mu0: &Ciphertext,
    assisted: &AssistedTuple,
    rerandomize: Rerandomize,
    rng: &mut R,
) -> Result<ComparisonResult> {
    assisted.expect_role(Role::S0, "finish a comparison")?;
    if session.id != session_id {
        return Err(Error::SessionMismatch(session_id));
    }
    let mu = if session.pi {
        assisted.ct_one.sub(mu0)?
    } else {
        mu0.clone()
    };
    let zero = rerandomize.mask(pk, &assisted.ct_zero, 0, rng)?;
    Ok(ComparisonResult {
        ct_mu: mu.add(&zero)?,
    })
}

/// Runs all three steps in-process and returns S1's view alongside.
pub fn scmp_run<R: RngCore + CryptoRng>(
    pk: &PublicKey,
    ct_x: &Ciphertext,
    ct_y: &Ciphertext,
    assisted: (&AssistedTuple, &AssistedTuple),
    coin: Coin,
    rerandomize: Rerandomize,
    rng: &mut R,
) -> Result<(ComparisonResult, S1View, bool)> {
    let session_id = rng.next_u64();
    let (msg, session) = scmp_s0_round1(pk, session_id, ct_x, ct_y, assisted.0, coin, rng)?;
    let pi = session.pi;
    let (mu0, view) = scmp_s1_round(pk, &msg, assisted.1, rerandomize, rng)?;
    let out = scmp_s0_finalize(pk, session, session_id, &mu0, assisted.0, rerandomize, rng)?;
    Ok((out, view, pi))
}

/// Largest admissible `r₁`, `2^σ - 1`.
pub fn r1_bound(pk: &PublicKey) -> BigUint {
    pow2(pk.params().sigma as u64) - BigUint::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastpai::keygen_with_y;
    use crate::params::{ParamSet, SecurityParams};
    use crate::protocols::do_init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn toy_d_for_equal_inputs_with_coin_zero() {
        let (pk, sk) = keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &BigUint::from(2u32),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (a0, a1) = do_init(&pk, &sk, &mut rng).unwrap();
        let cx = pk.encrypt(&BigUint::from(3u32), &mut rng).unwrap();
        let cy = pk.encrypt(&BigUint::from(3u32), &mut rng).unwrap();
        let (msg, session) =
            scmp_s0_round1(&pk, 9, &cx, &cy, &a0, Coin::Forced(false), &mut rng).unwrap();
        assert!(!session.pi());
        assert_eq!(&sk.decrypt(&msg.d).unwrap(), session.r1());
        assert!(session.r1() <= &r1_bound(&pk) && !session.r1().is_zero());
        let half = pk.n() >> 1u32;
        assert!(session.r2() <= &half);
        assert!(session.r1() + session.r2() > half);
        let (mu0, view) = scmp_s1_round(&pk, &msg, &a1, Rerandomize::Stored, &mut rng).unwrap();
        assert!(!view.d.is_zero() && &view.d < pk.n());
        let res =
            scmp_s0_finalize(&pk, session, 9, &mu0, &a0, Rerandomize::Stored, &mut rng).unwrap();
        let mu = sk.decrypt(&res.ct_mu).unwrap();
        assert!(mu <= BigUint::one());
    }

    #[test]
    fn wrong_role_and_session_rejected() {
        let (pk, sk) = keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &BigUint::from(2u32),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (a0, a1) = do_init(&pk, &sk, &mut rng).unwrap();
        let c = pk.encrypt(&BigUint::from(1u32), &mut rng).unwrap();
        assert!(matches!(
            scmp_s0_round1(&pk, 1, &c, &c, &a1, Coin::Random, &mut rng),
            Err(Error::RoleViolation { .. })
        ));
        let (msg, session) = scmp_s0_round1(&pk, 1, &c, &c, &a0, Coin::Random, &mut rng).unwrap();
        assert!(scmp_s1_round(&pk, &msg, &a0, Rerandomize::Stored, &mut rng).is_err());
        let (mu0, _) = scmp_s1_round(&pk, &msg, &a1, Rerandomize::Stored, &mut rng).unwrap();
        assert!(matches!(
            scmp_s0_finalize(&pk, session, 2, &mu0, &a0, Rerandomize::Stored, &mut rng),
            Err(Error::SessionMismatch(2))
        ));
    }
}
