//! Big-integer helpers shared by the cryptosystem and the protocols.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

/// Inverse of `a` modulo `m` by extended Euclid.
pub fn mod_inv(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::NotInvertible);
    }
    let a = BigInt::from(a % m);
    let m_int = BigInt::from(m.clone());
    let egcd = a.extended_gcd(&m_int);
    if !egcd.gcd.is_one() {
        return Err(Error::NotInvertible);
    }
    Ok(egcd.x.mod_floor(&m_int).magnitude().clone())
}

/// `base^exp mod m` for a signed exponent. A negative exponent raises the
/// inverse of `base`.
pub fn pow_signed(base: &BigUint, exp: &BigInt, m: &BigUint) -> Result<BigUint> {
    match exp.sign() {
        Sign::Minus => Ok(mod_inv(base, m)?.modpow(exp.magnitude(), m)),
        _ => Ok(base.modpow(exp.magnitude(), m)),
    }
}

/// Non-negative residue of a signed integer.
pub fn mod_signed(x: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    x.mod_floor(&m).magnitude().clone()
}

/// Uniform element of Z*_m.
pub fn random_unit<R: RngCore + CryptoRng>(rng: &mut R, m: &BigUint) -> BigUint {
    loop {
        let y = rng.gen_biguint_below(m);
        if !y.is_zero() && y.gcd(m).is_one() {
            return y;
        }
    }
}

/// Uniform integer in the closed interval `[lo, hi]`.
pub fn random_in_closed<R: RngCore + CryptoRng>(rng: &mut R, lo: &BigInt, hi: &BigInt) -> BigInt {
    rng.gen_bigint_range(lo, &(hi + 1u32))
}

pub fn pow2(bits: u64) -> BigUint {
    BigUint::one() << bits
}

/// Number of bytes in the fixed-width encoding of values below `m`.
pub fn byte_width(m: &BigUint) -> usize {
    m.bits().div_ceil(8) as usize
}

/// Big-endian magnitude left-padded to `width` bytes.
pub fn to_fixed_be(x: &BigUint, width: usize) -> Result<Vec<u8>> {
    let raw = if x.is_zero() {
        Vec::new()
    } else {
        x.to_bytes_be()
    };
    if raw.len() > width {
        return Err(Error::wire(format!(
            "value needs {} bytes, field holds {width}",
            raw.len()
        )));
    }
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(&raw);
    Ok(out)
}

pub fn abs_bits(x: &BigInt) -> u64 {
    x.abs().bits()
}
