//! Security parameters and modulus generation.
//!
//! A parameter set is a tuple `(N = P·Q, P, Q, p, q)` where `p | P-1`,
//! `q | Q-1`, `P ≡ Q ≡ 3 (mod 4)`, `gcd(P-1, Q-1) = 2` and
//! `gcd(pq, (P-1)(Q-1)/(4pq)) = 1`. The short private key is `α = pq`.
//! We additionally require `gcd(2α, N) = 1` so that `(2α)^-1 mod N` exists.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::arith::pow2;
use crate::error::{Error, Result};

/// Default bound on outer prime-search attempts in [`ngen`].
pub const DEFAULT_NGEN_ATTEMPTS: usize = 64;

const INNER_SEARCH_FACTOR: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SecurityParams {
    /// Security parameter κ.
    pub kappa: u32,
    /// Bit length of N.
    pub n_bits: u32,
    /// Private-key length `4κ`.
    pub l_sk_bits: u32,
    /// Bit length of the comparison blinding factor.
    pub sigma: u32,
    /// Plaintext magnitude bound `l`: data lives in `[-2^l, 2^l]`.
    pub data_bits: u32,
    toy: bool,
}

impl SecurityParams {
    pub fn new(kappa: u32, n_bits: u32, sigma: u32, data_bits: u32) -> Result<Self> {
        let sp = SecurityParams {
            kappa,
            n_bits,
            l_sk_bits: 4 * kappa,
            sigma,
            data_bits,
            toy: false,
        };
        sp.validate()?;
        Ok(sp)
    }

    /// Standard modulus length for κ, with `σ = 128` and `l = 32`.
    pub fn for_kappa(kappa: u32) -> Result<Self> {
        let n_bits = match kappa {
            112 => 2048,
            128 => 3072,
            192 => 7680,
            256 => 15360,
            other => {
                return Err(Error::InvalidParams(format!(
                    "no standard modulus length for kappa = {other}"
                )))
            }
        };
        Self::new(kappa, n_bits, 128, 32)
    }

    /// Tiny parameters for the brute-force oracle suite (N = 649).
    ///
    /// Size and range checks are skipped; the comparison protocol is not
    /// expected to be semantically correct at this size.
    pub fn toy() -> Self {
        SecurityParams {
            kappa: 2,
            n_bits: 10,
            l_sk_bits: 8,
            sigma: 2,
            data_bits: 4,
            toy: true,
        }
    }

    pub fn is_toy(&self) -> bool {
        self.toy
    }

    pub fn with_data_bits(mut self, data_bits: u32) -> Result<Self> {
        self.data_bits = data_bits;
        if !self.toy {
            self.validate()?;
        }
        Ok(self)
    }

    pub fn with_sigma(mut self, sigma: u32) -> Result<Self> {
        self.sigma = sigma;
        if !self.toy {
            self.validate()?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_sk_bits != 4 * self.kappa {
            return Err(Error::InvalidParams("l_sk_bits must equal 4*kappa".into()));
        }
        if self.kappa == 0 || self.sigma == 0 {
            return Err(Error::InvalidParams(
                "kappa and sigma must be positive".into(),
            ));
        }
        if !self.n_bits.is_multiple_of(2) {
            return Err(Error::InvalidParams("n_bits must be even".into()));
        }
        // p and q are l_sk/2-bit primes drawn by the prime generator, which
        // works from 128 bits upward.
        if self.l_sk_bits / 2 < 128 {
            return Err(Error::InvalidParams(
                "kappa too small for prime generation (need 4*kappa/2 >= 128)".into(),
            ));
        }
        if self.l_sk_bits / 2 + 2 >= self.n_bits / 2 {
            return Err(Error::InvalidParams(
                "private key longer than the prime factors".into(),
            ));
        }
        let need = self.data_bits as u64 + self.sigma as u64 + self.l_sk_bits as u64 + 2;
        if need >= self.n_bits as u64 - 2 {
            return Err(Error::InvalidParams(format!(
                "data_bits + sigma + l_sk_bits + 2 = {need} must be below n_bits - 2 = {}",
                self.n_bits - 2
            )));
        }
        if self.theta_bits() as u64 >= self.n_bits as u64 - 1 {
            return Err(Error::InvalidParams("theta must be smaller than N".into()));
        }
        Ok(())
    }

    /// `log2 θ = 4κ + 1 + κ`.
    pub fn theta_bits(&self) -> u32 {
        4 * self.kappa + 1 + self.kappa
    }

    pub fn theta(&self) -> BigUint {
        pow2(self.theta_bits() as u64)
    }

    /// Bits of the sharing bound for `2α` (`2α < 2^(l_sk+1)`).
    pub fn two_alpha_bound_bits(&self) -> u32 {
        self.l_sk_bits + 1
    }

    /// Bits of the sharing bound for `2α·x` with `|x| ≤ 2^l`.
    pub fn upload_bound_bits(&self) -> u32 {
        self.data_bits + self.l_sk_bits + 1
    }
}

/// The modulus tuple `(N, P, Q, p, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSet {
    pub n: BigUint,
    pub big_p: BigUint,
    pub big_q: BigUint,
    pub p: BigUint,
    pub q: BigUint,
}

impl ParamSet {
    /// Builds a parameter set from explicit primes, checking every
    /// structural invariant but no sizes.
    pub fn from_primes(big_p: BigUint, big_q: BigUint, p: BigUint, q: BigUint) -> Result<Self> {
        for (v, what) in [
            (&big_p, "P is prime"),
            (&big_q, "Q is prime"),
            (&p, "p is prime"),
            (&q, "q is prime"),
        ] {
            if !is_probable_prime(v) {
                return Err(Error::ParamInvariant(what));
            }
        }
        let two = BigUint::from(2u32);
        let four = BigUint::from(4u32);
        let three = BigUint::from(3u32);
        if p.is_even() || q.is_even() {
            return Err(Error::ParamInvariant("p and q are odd"));
        }
        if p == q {
            return Err(Error::ParamInvariant("p != q"));
        }
        if big_p == big_q {
            return Err(Error::ParamInvariant("P != Q"));
        }
        let pm1 = &big_p - 1u32;
        let qm1 = &big_q - 1u32;
        if !(&pm1 % &p).is_zero() {
            return Err(Error::ParamInvariant("p | P-1"));
        }
        if !(&qm1 % &q).is_zero() {
            return Err(Error::ParamInvariant("q | Q-1"));
        }
        if &big_p % &four != three || &big_q % &four != three {
            return Err(Error::ParamInvariant("P = Q = 3 mod 4"));
        }
        if pm1.gcd(&qm1) != two {
            return Err(Error::ParamInvariant("gcd(P-1, Q-1) = 2"));
        }
        let alpha = &p * &q;
        let phi = &pm1 * &qm1;
        let four_alpha = &alpha * 4u32;
        if !(&phi % &four_alpha).is_zero() {
            return Err(Error::ParamInvariant("4pq | (P-1)(Q-1)"));
        }
        let beta = &phi / &four_alpha;
        if !alpha.gcd(&beta).is_one() {
            return Err(Error::ParamInvariant("gcd(pq, (P-1)(Q-1)/(4pq)) = 1"));
        }
        let n = &big_p * &big_q;
        if !(&alpha * 2u32).gcd(&n).is_one() {
            return Err(Error::ParamInvariant("gcd(2pq, N) = 1"));
        }
        Ok(ParamSet {
            n,
            big_p,
            big_q,
            p,
            q,
        })
    }

    /// The toy tuple `(649, 11, 59, 5, 29)`.
    pub fn toy() -> Self {
        Self::from_primes(
            BigUint::from(11u32),
            BigUint::from(59u32),
            BigUint::from(5u32),
            BigUint::from(29u32),
        )
        .expect("toy parameters satisfy every invariant")
    }

    pub fn alpha(&self) -> BigUint {
        &self.p * &self.q
    }

    /// `β = (P-1)(Q-1) / (4pq)`.
    pub fn beta(&self) -> BigUint {
        let phi = (&self.big_p - 1u32) * (&self.big_q - 1u32);
        phi / (self.alpha() * 4u32)
    }

    /// Checks bit lengths against `sp` (not applicable to toy sets).
    pub fn check_sizes(&self, sp: &SecurityParams) -> Result<()> {
        let half = (sp.n_bits / 2) as u64;
        let sub = (sp.l_sk_bits / 2) as u64;
        if self.n.bits() != sp.n_bits as u64 {
            return Err(Error::ParamInvariant("|N| = n_bits"));
        }
        if self.big_p.bits() != half || self.big_q.bits() != half {
            return Err(Error::ParamInvariant("|P| = |Q| = n_bits/2"));
        }
        if self.p.bits() != sub || self.q.bits() != sub {
            return Err(Error::ParamInvariant("|p| = |q| = l_sk/2"));
        }
        Ok(())
    }
}

/// Generates a parameter set for `sp` with the default attempt bound.
pub fn ngen<R: RngCore + CryptoRng>(sp: &SecurityParams, rng: &mut R) -> Result<ParamSet> {
    ngen_with_attempts(sp, rng, DEFAULT_NGEN_ATTEMPTS)
}

/// Samples `p, q`, then searches `P = 2·p·k + 1` (k odd, so `P ≡ 3 mod 4`)
/// and likewise `Q`, resampling until every invariant holds.
pub fn ngen_with_attempts<R: RngCore + CryptoRng>(
    sp: &SecurityParams,
    rng: &mut R,
    max_attempts: usize,
) -> Result<ParamSet> {
    if sp.is_toy() {
        return Ok(ParamSet::toy());
    }
    sp.validate()?;
    let half = sp.n_bits as u64 / 2;
    let sub = sp.l_sk_bits as usize / 2;
    for attempt in 0..max_attempts {
        let p = glass_pumpkin::prime::from_rng(sub, rng)
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        let q = glass_pumpkin::prime::from_rng(sub, rng)
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        if p == q {
            continue;
        }
        let Some((big_p, k_p)) = search_outer_prime(&p, half, rng) else {
            continue;
        };
        let Some((big_q, k_q)) = search_outer_prime(&q, half, rng) else {
            continue;
        };
        // gcd(P-1, Q-1) = 2  <=>  gcd(p·k_P, q·k_Q) = 1
        if !(&p * &k_p).gcd(&(&q * &k_q)).is_one() {
            continue;
        }
        match ParamSet::from_primes(big_p, big_q, p, q) {
            Ok(ps) if ps.check_sizes(sp).is_ok() => {
                log::debug!("ngen: found parameters after {} attempts", attempt + 1);
                return Ok(ps);
            }
            _ => continue,
        }
    }
    Err(Error::GenerationExhausted(max_attempts))
}

/// Finds a prime `P = 2·small·k + 1` with exactly `bits` bits and odd `k`.
/// The lower end of the search range is `1.5·2^(bits-1)` so that the
/// product of two such primes always has `2·bits` bits.
fn search_outer_prime<R: RngCore + CryptoRng>(
    small: &BigUint,
    bits: u64,
    rng: &mut R,
) -> Option<(BigUint, BigUint)> {
    let two_small = small * 2u32;
    let lo_target = pow2(bits - 2) * 3u32;
    let hi_target = pow2(bits) - 1u32;
    let k_lo = lo_target.div_ceil(&two_small);
    let k_hi = (&hi_target - 1u32) / &two_small;
    if k_lo >= k_hi {
        return None;
    }
    let tries = INNER_SEARCH_FACTOR * bits as usize;
    for _ in 0..tries {
        let mut k = rng.gen_biguint_range(&k_lo, &k_hi);
        k |= BigUint::one();
        let cand = &two_small * &k + 1u32;
        if cand.bits() != bits {
            continue;
        }
        if is_probable_prime(&cand) {
            return Some((cand, k));
        }
    }
    None
}

/// Deterministic primality check: trial division for word-size values,
/// Miller-Rabin with a fixed witness stream above that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < (1u64 << 32) {
            return is_prime_u64(small);
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_9417);
    glass_pumpkin::prime::check_with(n, &mut rng)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
