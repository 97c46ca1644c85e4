//! Paillier variant with a short private key.
//!
//! Public key `(N, h)` with `h = -y^(2β) mod N`; private key `α = pq`.
//!
//! ```text
//! Enc(m) = (1+N)^m · (h^r mod N)^N      mod N^2,   r <- {0,1}^(4κ)
//! Dec(c) = L(c^(2α) mod N^2) · (2α)^-1  mod N,     L(x) = (x-1)/N
//! ```
//!
//! `(1+N)^m = 1 + m·N (mod N^2)`, and `(h^r mod N)^N = (h^N)^r (mod N^2)`, so
//! encryption is a single fixed-base exponentiation of `h^N mod N^2`.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{CryptoRng, RngCore};

use crate::arith::{self, mod_inv, pow2};
use crate::error::{Error, Result};
use crate::fixed_base::{FixedBaseTable, DEFAULT_WINDOW};
use crate::params::{ngen, ParamSet, SecurityParams};

#[derive(Clone)]
pub struct PublicKey {
    n: Arc<BigUint>,
    n_sq: Arc<BigUint>,
    h: BigUint,
    params: SecurityParams,
    enc_table: Arc<FixedBaseTable>,
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PublicKey")
            .field("n_bits", &self.n.bits())
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl PartialEq for PublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.h == other.h && self.params == other.params
    }
}

impl Eq for PublicKey {}

impl PublicKey {
    pub fn new(n: BigUint, h: BigUint, params: SecurityParams) -> Result<Self> {
        if h <= BigUint::one() || h >= n || !h.gcd(&n).is_one() {
            return Err(Error::InvalidParams("h must be a unit in (1, N)".into()));
        }
        let n_sq = &n * &n;
        let h_n = h.modpow(&n, &n_sq);
        let enc_table = FixedBaseTable::new(&h_n, &n_sq, params.l_sk_bits as u64, DEFAULT_WINDOW);
        Ok(PublicKey {
            n: Arc::new(n),
            n_sq: Arc::new(n_sq),
            h,
            params,
            enc_table: Arc::new(enc_table),
        })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_arc(&self) -> &Arc<BigUint> {
        &self.n
    }

    pub fn n_sq(&self) -> &BigUint {
        &self.n_sq
    }

    pub fn h(&self) -> &BigUint {
        &self.h
    }

    pub fn params(&self) -> &SecurityParams {
        &self.params
    }

    /// Width in bytes of a fixed-width Z_N field; Z_{N^2} fields are twice this.
    pub fn byte_width(&self) -> usize {
        arith::byte_width(&self.n)
    }

    /// Precomputed table for `h^N mod N^2`.
    pub fn encryption_table(&self) -> &FixedBaseTable {
        &self.enc_table
    }

    /// Encryption randomness `r <- {0,1}^(4κ)`.
    pub fn sample_r<R: RngCore + CryptoRng>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint(self.params.l_sk_bits as u64)
    }

    pub fn encrypt<R: RngCore + CryptoRng>(&self, m: &BigUint, rng: &mut R) -> Result<Ciphertext> {
        let r = self.sample_r(rng);
        self.encrypt_with_r(m, &r)
    }

    pub fn encrypt_with_r(&self, m: &BigUint, r: &BigUint) -> Result<Ciphertext> {
        if m >= &*self.n {
            return Err(Error::PlaintextOutOfRange);
        }
        let plain = (BigUint::one() + m * &*self.n) % &*self.n_sq;
        let mask = self.enc_table.pow(r)?;
        Ok(Ciphertext {
            value: (plain * mask) % &*self.n_sq,
            n_sq: self.n_sq.clone(),
        })
    }

    /// Encrypts `encode_signed(x)` after checking `|x| ≤ 2^l`.
    pub fn encrypt_signed<R: RngCore + CryptoRng>(
        &self,
        x: &BigInt,
        rng: &mut R,
    ) -> Result<Ciphertext> {
        let m = encode_signed(x, &self.n, self.params.data_bits)?;
        self.encrypt(&m, rng)
    }

    /// Wraps a raw value as a ciphertext under this key after checking
    /// membership in Z*_{N^2}.
    pub fn ciphertext(&self, value: BigUint) -> Result<Ciphertext> {
        if value.is_zero() || value >= *self.n_sq || !value.gcd(&self.n).is_one() {
            return Err(Error::InvalidCiphertext);
        }
        Ok(Ciphertext {
            value,
            n_sq: self.n_sq.clone(),
        })
    }

    /// Ciphertext of `m` with randomness `r = 0`.
    pub fn trivial(&self, m: &BigUint) -> Result<Ciphertext> {
        self.encrypt_with_r(m, &BigUint::zero())
    }
}

#[derive(Clone)]
pub struct PrivateKey {
    n: Arc<BigUint>,
    n_sq: Arc<BigUint>,
    alpha: BigUint,
    two_alpha: BigUint,
    two_alpha_inv: BigUint,
}

impl fmt::Debug for PrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrivateKey")
            .field("n_bits", &self.n.bits())
            .finish_non_exhaustive()
    }
}

impl PartialEq for PrivateKey {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.alpha == other.alpha
    }
}

impl Eq for PrivateKey {}

impl PrivateKey {
    pub fn new(n: BigUint, alpha: BigUint) -> Result<Self> {
        let two_alpha = &alpha * 2u32;
        let two_alpha_inv = mod_inv(&two_alpha, &n)?;
        let n_sq = &n * &n;
        Ok(PrivateKey {
            n: Arc::new(n),
            n_sq: Arc::new(n_sq),
            alpha,
            two_alpha,
            two_alpha_inv,
        })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn alpha(&self) -> &BigUint {
        &self.alpha
    }

    pub fn two_alpha(&self) -> &BigUint {
        &self.two_alpha
    }

    /// `(2α)^-1 mod N`.
    pub fn two_alpha_inv(&self) -> &BigUint {
        &self.two_alpha_inv
    }

    pub fn decrypt(&self, c: &Ciphertext) -> Result<BigUint> {
        if *c.n_sq != *self.n_sq {
            return Err(Error::ModulusMismatch);
        }
        let u = c.value.modpow(&self.two_alpha, &self.n_sq);
        let (l, rem) = (u - 1u32).div_rem(&self.n);
        if !rem.is_zero() {
            return Err(Error::NotDecryptable);
        }
        Ok((l * &self.two_alpha_inv) % &*self.n)
    }

    pub fn decrypt_signed(&self, c: &Ciphertext, bound_bits: u32) -> Result<BigInt> {
        decode_signed(&self.decrypt(c)?, &self.n, bound_bits)
    }
}

/// Draws parameters and keys for `params`.
pub fn keygen<R: RngCore + CryptoRng>(
    params: &SecurityParams,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    let ps = ngen(params, rng)?;
    keygen_from_paramset(&ps, params, rng)
}

pub fn keygen_from_paramset<R: RngCore + CryptoRng>(
    ps: &ParamSet,
    params: &SecurityParams,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    loop {
        let y = arith::random_unit(rng, &ps.n);
        match keygen_with_y(ps, params, &y) {
            // h = N-1 or h = 1 can only happen at toy sizes
            Err(Error::InvalidParams(_)) => continue,
            other => return other,
        }
    }
}

/// Deterministic key derivation from a parameter set and `y ∈ Z*_N`.
pub fn keygen_with_y(
    ps: &ParamSet,
    params: &SecurityParams,
    y: &BigUint,
) -> Result<(PublicKey, PrivateKey)> {
    let n = &ps.n;
    let beta = ps.beta();
    let y_pow = y.modpow(&(beta * 2u32), n);
    let h = (n - y_pow) % n;
    let pk = PublicKey::new(n.clone(), h, *params)?;
    let sk = PrivateKey::new(n.clone(), ps.alpha())?;
    Ok((pk, sk))
}

/// An element of Z*_{N^2}, tagged with the modulus it lives in.
#[derive(Clone)]
pub struct Ciphertext {
    value: BigUint,
    n_sq: Arc<BigUint>,
}

impl fmt::Debug for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ciphertext({:x})", self.value)
    }
}

impl PartialEq for Ciphertext {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.n_sq == other.n_sq
    }
}

impl Eq for Ciphertext {}

impl Ciphertext {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n_sq
    }

    fn same_modulus(&self, other: &Ciphertext) -> Result<()> {
        if Arc::ptr_eq(&self.n_sq, &other.n_sq) || self.n_sq == other.n_sq {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    fn with_value(&self, value: BigUint) -> Ciphertext {
        Ciphertext {
            value,
            n_sq: self.n_sq.clone(),
        }
    }

    /// `⟦x+y⟧ = ⟦x⟧·⟦y⟧ mod N^2`.
    pub fn add(&self, other: &Ciphertext) -> Result<Ciphertext> {
        self.same_modulus(other)?;
        Ok(self.with_value((&self.value * &other.value) % &*self.n_sq))
    }

    /// `⟦x-y⟧ = ⟦x⟧·⟦y⟧^-1 mod N^2`.
    pub fn sub(&self, other: &Ciphertext) -> Result<Ciphertext> {
        self.same_modulus(other)?;
        let inv = other.inverse()?;
        Ok(self.with_value((&self.value * inv.value) % &*self.n_sq))
    }

    pub fn inverse(&self) -> Result<Ciphertext> {
        Ok(self.with_value(mod_inv(&self.value, &self.n_sq)?))
    }

    /// `⟦k·x⟧ = ⟦x⟧^k mod N^2`; negative `k` raises the inverse.
    pub fn scalar_mul(&self, k: &BigInt) -> Result<Ciphertext> {
        Ok(self.with_value(arith::pow_signed(&self.value, k, &self.n_sq)?))
    }

    pub fn scalar_mul_unsigned(&self, k: &BigUint) -> Ciphertext {
        self.with_value(self.value.modpow(k, &self.n_sq))
    }

    /// Big-endian magnitude in `2·width` bytes.
    pub fn to_fixed_bytes(&self, width: usize) -> Result<Vec<u8>> {
        arith::to_fixed_be(&self.value, 2 * width)
    }
}

pub fn add_ct(c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext> {
    c1.add(c2)
}

pub fn sub_ct(c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext> {
    c1.sub(c2)
}

pub fn scalar_mul_ct(c: &Ciphertext, k: &BigInt) -> Result<Ciphertext> {
    c.scalar_mul(k)
}

/// Maps `x ∈ [-2^l, 2^l]` into Z_N, negatives as `N - |x|`.
pub fn encode_signed(x: &BigInt, n: &BigUint, bound_bits: u32) -> Result<BigUint> {
    let bound = pow2(bound_bits as u64);
    let mag = x.magnitude();
    if mag > &bound || bound.clone() * 2u32 >= *n {
        return Err(Error::SignedOverflow { bound_bits });
    }
    Ok(match x.sign() {
        Sign::Minus => n - mag,
        _ => mag.clone(),
    })
}

/// Inverse of [`encode_signed`]: residues up to `N/2` are non-negative, the
/// rest negative. Values outside `[-2^bound_bits, 2^bound_bits]` are rejected.
pub fn decode_signed(m: &BigUint, n: &BigUint, bound_bits: u32) -> Result<BigInt> {
    if m >= n {
        return Err(Error::PlaintextOutOfRange);
    }
    let half = n >> 1u32;
    let x = if m <= &half {
        BigInt::from(m.clone())
    } else {
        -BigInt::from(n - m)
    };
    if x.abs().magnitude() > &pow2(bound_bits as u64) {
        return Err(Error::SignedOverflow { bound_bits });
    }
    Ok(x)
}
