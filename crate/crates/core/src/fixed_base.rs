//! Fixed-base windowed exponentiation.
//!
//! For a base `g`, modulus `m`, window `b` and exponent length `L`, the table
//! stores `g^(j·2^(b·i)) mod m` for every window `i < ⌈L/b⌉` and digit
//! `j < 2^b`. An exponentiation is then one table lookup and one modular
//! multiplication per window.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: u32 = 5;

#[derive(Clone, Debug)]
pub struct FixedBaseTable {
    base: BigUint,
    modulus: BigUint,
    window: u32,
    max_bits: u64,
    rows: Vec<Vec<BigUint>>,
}

impl FixedBaseTable {
    pub fn new(base: &BigUint, modulus: &BigUint, max_bits: u64, window: u32) -> Self {
        assert!((1..=16).contains(&window), "window must be in 1..=16");
        let windows = max_bits.div_ceil(window as u64).max(1) as usize;
        let digits = 1usize << window;
        let mut rows = Vec::with_capacity(windows);
        let mut g = base % modulus;
        for _ in 0..windows {
            let mut row = Vec::with_capacity(digits);
            row.push(BigUint::one());
            for j in 1..digits {
                let next = (&row[j - 1] * &g) % modulus;
                row.push(next);
            }
            // g^(2^b) for the next window
            g = (&row[digits - 1] * &g) % modulus;
            rows.push(row);
        }
        FixedBaseTable {
            base: base % modulus,
            modulus: modulus.clone(),
            window,
            max_bits,
            rows,
        }
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn max_bits(&self) -> u64 {
        self.max_bits
    }

    /// Table-lookup multiplications per exponentiation, `⌈L/b⌉`.
    pub fn multiplications(&self) -> usize {
        self.rows.len()
    }

    /// `base^exp mod modulus`.
    pub fn pow(&self, exp: &BigUint) -> Result<BigUint> {
        if exp.bits() > self.max_bits {
            return Err(Error::ExponentTooLarge {
                bits: exp.bits(),
                max_bits: self.max_bits,
            });
        }
        let mask = BigUint::from((1u32 << self.window) - 1);
        let mut acc = BigUint::one();
        let mut e = exp.clone();
        for row in &self.rows {
            if e.bits() == 0 {
                break;
            }
            let digit = (&e & &mask).to_usize().expect("window digit fits usize");
            if digit != 0 {
                acc = (acc * &row[digit]) % &self.modulus;
            }
            e >>= self.window;
        }
        Ok(acc % &self.modulus)
    }
}

/// `h^r mod N` through a precomputed table for `h`.
pub fn fixed_base_pow(table: &FixedBaseTable, r: &BigUint) -> Result<BigUint> {
    table.pow(r)
}
