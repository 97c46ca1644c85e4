//! Subtractive secret sharing: `⟨x⟩₁ - ⟨x⟩₀ = x`.
//!
//! Shares live in one of three arithmetic contexts: exact integers (fresh
//! shares from the data owner), `Z_N` (outputs of the distributed discrete
//! log) or `Z_θ` (after modulus reduction). Mixing contexts is an error.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use rand::{CryptoRng, RngCore};

use crate::arith::{self, mod_signed, pow2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    S0,
    S1,
}

impl Role {
    pub fn bit(self) -> u8 {
        match self {
            Role::S0 => 0,
            Role::S1 => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Role::S0),
            1 => Ok(Role::S1),
            other => Err(Error::wire(format!("invalid role bit {other}"))),
        }
    }

    pub fn peer(self) -> Role {
        match self {
            Role::S0 => Role::S1,
            Role::S1 => Role::S0,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::S0 => f.write_str("S0"),
            Role::S1 => f.write_str("S1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShareContext {
    /// Exact integers; `bound` is the magnitude bound `m` on the secret.
    Integers {
        bound: BigUint,
    },
    ModN(Arc<BigUint>),
    ModTheta(Arc<BigUint>),
}

impl ShareContext {
    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            ShareContext::Integers { .. } => None,
            ShareContext::ModN(m) | ShareContext::ModTheta(m) => Some(m),
        }
    }

    /// Context of the result of combining two shares; integer bounds add up.
    fn combine(&self, other: &ShareContext) -> Result<ShareContext> {
        match (self, other) {
            (ShareContext::Integers { bound: a }, ShareContext::Integers { bound: b }) => {
                Ok(ShareContext::Integers { bound: a + b })
            }
            (ShareContext::ModN(a), ShareContext::ModN(b)) if a == b => Ok(self.clone()),
            (ShareContext::ModTheta(a), ShareContext::ModTheta(b)) if a == b => Ok(self.clone()),
            _ => Err(Error::ContextMismatch),
        }
    }

    fn normalize(&self, v: BigInt) -> BigInt {
        match self.modulus() {
            Some(m) => BigInt::from(mod_signed(&v, m)),
            None => v,
        }
    }
}

/// One server's share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    value: BigInt,
    role: Role,
    ctx: ShareContext,
}

impl Share {
    /// Builds a share, reducing the value when the context is modular.
    pub fn new(value: BigInt, role: Role, ctx: ShareContext) -> Self {
        let value = ctx.normalize(value);
        Share { value, role, ctx }
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn context(&self) -> &ShareContext {
        &self.ctx
    }

    fn check_binary(&self, other: &Share) -> Result<ShareContext> {
        if self.role != other.role {
            return Err(Error::RoleMismatch);
        }
        self.ctx.combine(&other.ctx)
    }

    /// `⟨x+y⟩ᵢ = ⟨x⟩ᵢ + ⟨y⟩ᵢ`.
    pub fn add(&self, other: &Share) -> Result<Share> {
        let ctx = self.check_binary(other)?;
        Ok(Share::new(&self.value + &other.value, self.role, ctx))
    }

    /// `⟨x-y⟩ᵢ = ⟨x⟩ᵢ - ⟨y⟩ᵢ`.
    pub fn sub(&self, other: &Share) -> Result<Share> {
        let ctx = self.check_binary(other)?;
        Ok(Share::new(&self.value - &other.value, self.role, ctx))
    }

    /// `⟨c·x⟩ᵢ = c·⟨x⟩ᵢ`.
    pub fn scalar_mul(&self, k: &BigInt) -> Share {
        let ctx = match &self.ctx {
            ShareContext::Integers { bound } => ShareContext::Integers {
                bound: bound * k.magnitude(),
            },
            other => other.clone(),
        };
        Share::new(&self.value * k, self.role, ctx)
    }

    /// Moves the share into `Z_θ`. Integer shares may be reduced directly;
    /// `Z_N` shares require `θ < N`.
    pub fn reduce_mod_theta(&self, theta: &Arc<BigUint>) -> Result<Share> {
        match &self.ctx {
            ShareContext::ModN(n) if **theta >= **n => Err(Error::ThetaTooLarge),
            ShareContext::ModTheta(t) if t != theta => Err(Error::ContextMismatch),
            _ => Ok(Share::new(
                self.value.clone(),
                self.role,
                ShareContext::ModTheta(theta.clone()),
            )),
        }
    }
}

/// Both shares of one secret. Only the data owner and tests ever hold this.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharePair {
    pub s0: Share,
    pub s1: Share,
}

impl SharePair {
    pub fn new(s0: Share, s1: Share) -> Result<Self> {
        if s0.role != Role::S0 || s1.role != Role::S1 {
            return Err(Error::RoleMismatch);
        }
        if s0.ctx.clone().combine(&s1.ctx).is_err() {
            return Err(Error::ContextMismatch);
        }
        Ok(SharePair { s0, s1 })
    }

    pub fn get(&self, role: Role) -> &Share {
        match role {
            Role::S0 => &self.s0,
            Role::S1 => &self.s1,
        }
    }

    pub fn add(&self, other: &SharePair) -> Result<SharePair> {
        Ok(SharePair {
            s0: self.s0.add(&other.s0)?,
            s1: self.s1.add(&other.s1)?,
        })
    }

    pub fn sub(&self, other: &SharePair) -> Result<SharePair> {
        Ok(SharePair {
            s0: self.s0.sub(&other.s0)?,
            s1: self.s1.sub(&other.s1)?,
        })
    }

    pub fn scalar_mul(&self, k: &BigInt) -> SharePair {
        SharePair {
            s0: self.s0.scalar_mul(k),
            s1: self.s1.scalar_mul(k),
        }
    }

    pub fn reduce_mod_theta(&self, theta: &Arc<BigUint>) -> Result<SharePair> {
        Ok(SharePair {
            s0: self.s0.reduce_mod_theta(theta)?,
            s1: self.s1.reduce_mod_theta(theta)?,
        })
    }
}

/// Shares `x ∈ (-m, m)` over the integers: `⟨x⟩₁` uniform on
/// `[-m·2^κ + 1, m·2^κ - 1]` and `⟨x⟩₀ = ⟨x⟩₁ - x`.
pub fn share_signed<R: RngCore + CryptoRng>(
    x: &BigInt,
    bound: &BigUint,
    kappa: u32,
    rng: &mut R,
) -> Result<SharePair> {
    if x.magnitude() >= bound {
        return Err(Error::SecretOutOfBound);
    }
    let span = BigInt::from(bound * pow2(kappa as u64));
    let lo = -&span + 1;
    let hi = &span - 1;
    let s1 = arith::random_in_closed(rng, &lo, &hi);
    let s0 = &s1 - x;
    let ctx = ShareContext::Integers {
        bound: bound.clone(),
    };
    Ok(SharePair {
        s0: Share::new(s0, Role::S0, ctx.clone()),
        s1: Share::new(s1, Role::S1, ctx),
    })
}

/// Shares a residue in `Z_modulus` with a uniform role-1 share.
pub fn share_mod<R: RngCore + CryptoRng>(
    x: &BigUint,
    ctx: ShareContext,
    rng: &mut R,
) -> Result<SharePair> {
    let m = ctx.modulus().ok_or(Error::ContextMismatch)?.clone();
    let s1 = num_bigint::RandBigInt::gen_biguint_below(rng, &m);
    let s0 = BigInt::from(s1.clone()) - BigInt::from(x.clone());
    Ok(SharePair {
        s0: Share::new(s0, Role::S0, ctx.clone()),
        s1: Share::new(BigInt::from(s1), Role::S1, ctx),
    })
}

/// `⟨x⟩₁ - ⟨x⟩₀` in the shares' arithmetic.
pub fn reconstruct(pair: &SharePair) -> Result<BigInt> {
    reconstruct_shares(&pair.s0, &pair.s1)
}

pub fn reconstruct_shares(s0: &Share, s1: &Share) -> Result<BigInt> {
    if s0.role != Role::S0 || s1.role != Role::S1 {
        return Err(Error::RoleMismatch);
    }
    let ctx = s0.ctx.combine(&s1.ctx)?;
    let diff = &s1.value - &s0.value;
    Ok(match ctx.modulus() {
        Some(m) => BigInt::from(mod_signed(&diff, m)),
        None => diff,
    })
}

/// Whether an integer-context role-1 share lies in the sampling interval.
pub fn in_sampling_interval(value: &BigInt, bound: &BigUint, kappa: u32) -> bool {
    value.magnitude() < &(bound * pow2(kappa as u64))
}
