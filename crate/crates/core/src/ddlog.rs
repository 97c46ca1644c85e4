//! Distributed discrete logarithm over `Z*_{N^2}`.
//!
//! For divisive shares `g₁ = g₀·(1+N)^x mod N^2`, each party computes
//! `z = ⌊g/N⌋ · (g mod N)^-1 mod N` locally and `z₁ - z₀ ≡ x (mod N)`
//! holds with certainty.

use num_bigint::BigUint;
use num_integer::Integer;

use crate::arith::mod_inv;
use crate::error::{Error, Result};

pub fn ddlog(g: &BigUint, n: &BigUint) -> Result<BigUint> {
    let (high, low) = g.div_rem(n);
    let inv = mod_inv(&low, n).map_err(|_| Error::NotInvertible)?;
    Ok((high % n * inv) % n)
}
