//! Machine-integer reference for the N = 649 parameter set.
//!
//! Every value is recomputed from the defining formulas with `u128`/`i128`
//! arithmetic; nothing here calls into the library except to obtain the
//! values under test. Each check returns the number of cases it covered.

use std::collections::HashMap;

use hss_core::fastpai::{encode_signed, Ciphertext};
use hss_core::protocols::{
    c2s_pair, do_init, do_recover_product, do_upload, s2c_combine, s2c_local, scmp_s0_finalize,
    scmp_s0_round1, scmp_s1_round, smul_pair, AssistedTuple, Coin, Rerandomize,
};
use hss_core::sharing::{share_signed, SharePair};
use hss_core::transport::{run_session, SessionConfig, Topology};
use hss_core::wire::{LinearOp, SlotPart};
use hss_core::{PrivateKey, PublicKey, Role};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Check = Result<usize, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub struct Toy {
    pub n: u128,
    pub n2: u128,
    pub two_alpha: u128,
    pub two_alpha_inv: u128,
    pub h: u128,
    /// `(1+N)^(2α·m) mod N²` for every `m`, keyed by value.
    dec_table: HashMap<u128, u128>,
}

pub fn powm(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn inv(a: u128, m: u128) -> Option<u128> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u128)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn u(x: &BigUint) -> u128 {
    x.to_u128().expect("toy value fits in u128")
}

pub fn i(x: &BigInt) -> i128 {
    x.to_i128().expect("toy value fits in i128")
}

pub fn ct_u(c: &Ciphertext) -> u128 {
    u(c.value())
}

impl Toy {
    pub fn new() -> Self {
        let (big_p, big_q, p, q) = (11u128, 59u128, 5u128, 29u128);
        let n = big_p * big_q;
        let n2 = n * n;
        let alpha = p * q;
        let beta = (big_p - 1) * (big_q - 1) / (4 * alpha);
        let h = (n - powm(2, 2 * beta, n)) % n;
        let two_alpha = 2 * alpha;
        let dec_table = (0..n)
            .map(|m| (powm(1 + n, two_alpha * m, n2), m))
            .collect();
        Toy {
            n,
            n2,
            two_alpha,
            two_alpha_inv: inv(two_alpha, n).unwrap(),
            h,
            dec_table,
        }
    }

    /// `(1+N)^m · (h^r mod N)^N mod N²`.
    pub fn enc(&self, m: u128, r: u128) -> u128 {
        let hr = powm(self.h, r, self.n);
        powm(1 + self.n, m, self.n2) * powm(hr, self.n, self.n2) % self.n2
    }

    /// The `m` with `c^(2α) = (1+N)^(2α·m)`, found by table lookup.
    pub fn dec(&self, c: u128) -> Option<u128> {
        self.dec_table
            .get(&powm(c, self.two_alpha, self.n2))
            .copied()
    }

    pub fn ddlog(&self, g: u128) -> u128 {
        (g / self.n) % self.n * inv(g % self.n, self.n).unwrap() % self.n
    }

    pub fn pow_signed(&self, c: u128, e: i128) -> u128 {
        if e >= 0 {
            powm(c, e as u128, self.n2)
        } else {
            powm(inv(c, self.n2).unwrap(), e.unsigned_abs(), self.n2)
        }
    }

    pub fn mul(&self, a: u128, b: u128) -> u128 {
        a * b % self.n2
    }

    pub fn div(&self, a: u128, b: u128) -> u128 {
        a * inv(b, self.n2).unwrap() % self.n2
    }

    pub fn encode(&self, x: i128) -> u128 {
        x.rem_euclid(self.n as i128) as u128
    }

    pub fn decode(&self, m: u128) -> i128 {
        if m <= self.n / 2 {
            m as i128
        } else {
            m as i128 - self.n as i128
        }
    }

    pub fn modn(&self, x: i128) -> u128 {
        x.rem_euclid(self.n as i128) as u128
    }

    pub fn is_unit(&self, g: u128) -> bool {
        g != 0 && gcd(g, self.n) == 1
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Encryption with every `(m, r)`, `r` over the whole `{0,1}^(4κ)` range.
pub fn check_encrypt(o: &Toy, pk: &PublicKey) -> Check {
    let mut cases = 0;
    for m in 0..o.n {
        for r in 0..256u128 {
            let c = pk
                .encrypt_with_r(&BigUint::from(m), &BigUint::from(r))
                .map_err(|e| e.to_string())?;
            ensure!(
                ct_u(&c) == o.enc(m, r),
                "Enc({m}; r={r}) = {} vs oracle {}",
                ct_u(&c),
                o.enc(m, r)
            );
            cases += 1;
        }
    }
    Ok(cases)
}

/// Decryption of every unit of `Z*_{N²}`.
pub fn check_decrypt(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut cases = 0;
    for c in 1..o.n2 {
        if !o.is_unit(c) {
            continue;
        }
        let ct = pk.ciphertext(BigUint::from(c)).map_err(|e| e.to_string())?;
        let want = o
            .dec(c)
            .ok_or_else(|| format!("oracle cannot decrypt {c}"))?;
        let got = u(&sk.decrypt(&ct).map_err(|e| e.to_string())?);
        ensure!(got == want, "Dec({c}) = {got} vs oracle {want}");
        cases += 1;
    }
    Ok(cases)
}

/// The DDLog formula on every unit, and its difference property on a grid.
pub fn check_ddlog(o: &Toy) -> Check {
    let n = BigUint::from(o.n);
    let mut cases = 0;
    for g in 1..o.n2 {
        if !o.is_unit(g) {
            continue;
        }
        let got = u(&hss_core::ddlog::ddlog(&BigUint::from(g), &n).map_err(|e| e.to_string())?);
        ensure!(
            got == o.ddlog(g),
            "DDLog({g}) = {got} vs oracle {}",
            o.ddlog(g)
        );
        cases += 1;
    }
    let mut r = rng(11);
    for _ in 0..2000 {
        let g0 = loop {
            let g = r.gen_range(1..o.n2);
            if o.is_unit(g) {
                break g;
            }
        };
        let x = r.gen_range(0..o.n);
        let g1 = o.mul(g0, powm(1 + o.n, x, o.n2));
        let diff = (o.ddlog(g1) + o.n - o.ddlog(g0)) % o.n;
        ensure!(diff == x, "DDLog difference {diff} for x = {x}, g0 = {g0}");
        cases += 1;
    }
    Ok(cases)
}

fn assisted_ok(o: &Toy, a: (&AssistedTuple, &AssistedTuple)) -> Result<(), String> {
    let s0 = i(a.0.two_alpha_share.value());
    let s1 = i(a.1.two_alpha_share.value());
    ensure!(
        s1 - s0 == o.two_alpha as i128,
        "⟨2α⟩ reconstructs to {}",
        s1 - s0
    );
    ensure!(
        s1.unsigned_abs() < (1 << 9) << 2,
        "⟨2α⟩₁ = {s1} outside the sampling interval"
    );
    ensure!(
        a.0.ct_one == a.1.ct_one && a.0.ct_zero == a.1.ct_zero,
        "tuples differ in ciphertexts"
    );
    ensure!(
        o.dec(ct_u(&a.0.ct_two_alpha_inv)) == Some(o.two_alpha_inv),
        "⟦(2α)^-1⟧ wrong"
    );
    ensure!(o.dec(ct_u(&a.0.ct_zero)) == Some(0), "⟦0⟧ wrong");
    ensure!(o.dec(ct_u(&a.0.ct_one)) == Some(1), "⟦1⟧ wrong");
    Ok(())
}

/// Initialization and upload for every `x` in the toy data range.
pub fn check_init_upload(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut r = rng(12);
    let mut cases = 0;
    for _ in 0..50 {
        let (a0, a1) = do_init(pk, sk, &mut r).map_err(|e| e.to_string())?;
        assisted_ok(o, (&a0, &a1))?;
        cases += 1;
    }
    for x in -16i128..=16 {
        let (u0, u1) = do_upload(pk, sk, &BigInt::from(x), &mut r).map_err(|e| e.to_string())?;
        ensure!(u0.ct == u1.ct, "upload of {x}: ciphertexts differ");
        ensure!(
            o.dec(ct_u(&u0.ct)) == Some(o.encode(x)),
            "upload of {x}: wrong plaintext"
        );
        let diff = i(u1.share_2ax.value()) - i(u0.share_2ax.value());
        ensure!(
            diff == o.two_alpha as i128 * x,
            "upload of {x}: shares give {diff}"
        );
        cases += 1;
    }
    Ok(cases)
}

/// SMUL exhaustively on `{-8..8}²`.
pub fn check_smul(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut r = rng(13);
    let mut cases = 0;
    for x in -8i128..=8 {
        for y in -8i128..=8 {
            let (ux, _) = do_upload(pk, sk, &BigInt::from(x), &mut r).map_err(|e| e.to_string())?;
            let (v0, v1) =
                do_upload(pk, sk, &BigInt::from(y), &mut r).map_err(|e| e.to_string())?;
            let shares = SharePair::new(v0.share_2ax, v1.share_2ax).map_err(|e| e.to_string())?;
            let z = smul_pair(pk, &ux.ct, &shares).map_err(|e| e.to_string())?;
            let c = ct_u(&ux.ct);
            let z0 = o.ddlog(o.pow_signed(c, i(shares.s0.value())));
            let z1 = o.ddlog(o.pow_signed(c, i(shares.s1.value())));
            ensure!(i(z.s0.value()) as u128 == z0, "SMUL {x}·{y}: z₀ differs");
            ensure!(i(z.s1.value()) as u128 == z1, "SMUL {x}·{y}: z₁ differs");
            let m = (z1 + o.n - z0) % o.n * o.two_alpha_inv % o.n;
            ensure!(
                o.decode(m) == x * y,
                "SMUL {x}·{y}: oracle recovers {}",
                o.decode(m)
            );
            let got = do_recover_product(sk, &z, pk.params()).map_err(|e| e.to_string())?;
            ensure!(i(&got) == x * y, "SMUL {x}·{y}: recovered {got}");
            cases += 1;
        }
    }
    Ok(cases)
}

/// S2C on integer shares of `2α·v`, for every `v ∈ [-16, 16]`.
pub fn check_s2c(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut r = rng(14);
    let (a0, a1) = do_init(pk, sk, &mut r).map_err(|e| e.to_string())?;
    let bound = BigUint::from(1u32) << 13u32;
    let inv_ct = ct_u(&a0.ct_two_alpha_inv);
    let mut cases = 0;
    for v in -16i128..=16 {
        for _ in 0..4 {
            let secret = BigInt::from(o.two_alpha as i128 * v);
            let pair = share_signed(&secret, &bound, 2, &mut r).map_err(|e| e.to_string())?;
            let l0 = s2c_local(pk, &pair.s0, &a0, &mut r).map_err(|e| e.to_string())?;
            let l1 = s2c_local(pk, &pair.s1, &a1, &mut r).map_err(|e| e.to_string())?;
            let t0 = o.ddlog(o.pow_signed(inv_ct, i(pair.s0.value())));
            let t1 = o.ddlog(o.pow_signed(inv_ct, i(pair.s1.value())));
            ensure!(
                i(l0.t.value()) as u128 == t0 && i(l1.t.value()) as u128 == t1,
                "S2C {v}: t differs"
            );
            ensure!(o.dec(ct_u(&l0.outbound)) == Some(t0), "S2C {v}: ⟦t₀⟧ wrong");
            ensure!(o.dec(ct_u(&l1.outbound)) == Some(t1), "S2C {v}: ⟦t₁⟧ wrong");
            let c0 =
                s2c_combine(Role::S0, &l0.outbound, &l1.outbound).map_err(|e| e.to_string())?;
            let c1 =
                s2c_combine(Role::S1, &l1.outbound, &l0.outbound).map_err(|e| e.to_string())?;
            let want = o.div(ct_u(&l1.outbound), ct_u(&l0.outbound));
            ensure!(
                ct_u(&c0) == want && ct_u(&c1) == want,
                "S2C {v}: combined ciphertext differs"
            );
            ensure!(
                o.dec(want) == Some(o.encode(v)),
                "S2C {v}: decrypts to {:?}",
                o.dec(want)
            );
            cases += 1;
        }
    }
    Ok(cases)
}

/// C2S of every plaintext in `Z_N`.
pub fn check_c2s(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut r = rng(15);
    let (a0, a1) = do_init(pk, sk, &mut r).map_err(|e| e.to_string())?;
    let (s0, s1) = (i(a0.two_alpha_share.value()), i(a1.two_alpha_share.value()));
    let mut cases = 0;
    for m in 0..o.n {
        let ct = pk
            .encrypt(&BigUint::from(m), &mut r)
            .map_err(|e| e.to_string())?;
        let pair = c2s_pair(pk, &ct, (&a0, &a1)).map_err(|e| e.to_string())?;
        let z0 = o.ddlog(o.pow_signed(ct_u(&ct), s0));
        let z1 = o.ddlog(o.pow_signed(ct_u(&ct), s1));
        ensure!(
            i(pair.s0.value()) as u128 == z0 && i(pair.s1.value()) as u128 == z1,
            "C2S {m}: shares differ"
        );
        ensure!(
            (z1 + o.n - z0) % o.n == o.two_alpha * m % o.n,
            "C2S {m}: not 2α·m"
        );
        cases += 1;
    }
    Ok(cases)
}

/// Every step of SCMP on `{-4..4}²` with both coins and both masking modes.
///
/// The checks are formula-level: `2α` is not small against `N` here, so the
/// sign test on `d` is not expected to match `[x < y]`.
pub fn check_scmp(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut r = rng(16);
    let (a0, a1) = do_init(pk, sk, &mut r).map_err(|e| e.to_string())?;
    let (s0, s1) = (i(a0.two_alpha_share.value()), i(a1.two_alpha_share.value()));
    let (one, zero) = (ct_u(&a0.ct_one), ct_u(&a0.ct_zero));
    let mut cases = 0;
    for x in -4i128..=4 {
        for y in -4i128..=4 {
            for pi in [false, true] {
                for mode in [Rerandomize::Stored, Rerandomize::Fresh] {
                    let cx = pk
                        .encrypt(&BigUint::from(o.encode(x)), &mut r)
                        .map_err(|e| e.to_string())?;
                    let cy = pk
                        .encrypt(&BigUint::from(o.encode(y)), &mut r)
                        .map_err(|e| e.to_string())?;
                    let sid = r.gen();
                    let (msg, session) =
                        scmp_s0_round1(pk, sid, &cx, &cy, &a0, Coin::Forced(pi), &mut r)
                            .map_err(|e| e.to_string())?;
                    let (r1, r2) = (u(session.r1()), u(session.r2()));
                    ensure!((1..4).contains(&r1), "r₁ = {r1} out of range");
                    ensure!(
                        r2 <= o.n / 2 && r1 + r2 > o.n / 2,
                        "r₂ = {r2} out of range for r₁ = {r1}"
                    );
                    let base = if pi {
                        o.div(ct_u(&cy), ct_u(&cx))
                    } else {
                        o.mul(o.div(ct_u(&cx), ct_u(&cy)), one)
                    };
                    let d_ct = powm(base, r1, o.n2);
                    ensure!(ct_u(&msg.d) == d_ct, "SCMP ({x},{y},π={pi}): D differs");
                    let plain = if pi { y - x } else { x - y + 1 };
                    ensure!(
                        o.dec(d_ct) == Some(o.modn(r1 as i128 * plain)),
                        "SCMP: D plaintext"
                    );
                    let z0 = o.ddlog(o.pow_signed(d_ct, s0));
                    let z0_masked = (z0 + o.n - r2) % o.n;
                    ensure!(
                        u(&msg.z0_masked) == z0_masked,
                        "SCMP ({x},{y}): masked z₀ differs"
                    );
                    let (mu0, view) =
                        scmp_s1_round(pk, &msg, &a1, mode, &mut r).map_err(|e| e.to_string())?;
                    let z1 = o.ddlog(o.pow_signed(d_ct, s1));
                    let d = (z1 + o.n - z0_masked) % o.n;
                    ensure!(u(&view.d) == d, "SCMP ({x},{y}): d differs");
                    ensure!(
                        d == o.modn(o.two_alpha as i128 * r1 as i128 * plain + r2 as i128),
                        "SCMP ({x},{y}): d is not 2α·r₁·m + r₂"
                    );
                    let above = d > o.n / 2;
                    ensure!(
                        view.above_half == above,
                        "SCMP ({x},{y}): side of N/2 differs"
                    );
                    let want_bit = if above { 0 } else { 1 };
                    ensure!(
                        o.dec(ct_u(&mu0)) == Some(want_bit),
                        "SCMP ({x},{y}): S1 reply"
                    );
                    if mode == Rerandomize::Stored {
                        ensure!(
                            ct_u(&mu0) == if above { zero } else { one },
                            "SCMP: stored mask"
                        );
                    }
                    let out = scmp_s0_finalize(pk, session, sid, &mu0, &a0, mode, &mut r)
                        .map_err(|e| e.to_string())?;
                    let flipped = if pi {
                        o.div(one, ct_u(&mu0))
                    } else {
                        ct_u(&mu0)
                    };
                    if mode == Rerandomize::Stored {
                        ensure!(
                            ct_u(&out.ct_mu) == o.mul(flipped, zero),
                            "SCMP ({x},{y}): ⟦μ⟧ differs"
                        );
                    }
                    let mu = if pi { 1 - want_bit } else { want_bit };
                    ensure!(
                        o.dec(ct_u(&out.ct_mu)) == Some(mu),
                        "SCMP ({x},{y}): μ plaintext"
                    );
                    cases += 1;
                }
            }
        }
    }
    Ok(cases)
}

/// The same protocols driven through the message-passing endpoints.
pub fn check_end_to_end(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    let mut cases = 0;
    for (k, (x, y)) in [(3i64, 4i64), (-5, 7), (0, -8), (8, 8), (-6, -2)]
        .into_iter()
        .enumerate()
    {
        let (res, _) = run_session(
            &Topology::InProcess,
            pk,
            sk,
            SessionConfig::with_seed(k as u64),
            |d| {
                let sx = d.upload(&BigInt::from(x))?;
                let sy = d.upload(&BigInt::from(y))?;
                let ct_x = d.fetch_ct(sx)?;
                let up_y = d.fetch_shares(sy)?;
                let prod = d.smul(sx, sy)?;
                let z = d.fetch_shares(prod)?;
                let xy = d.recover_product(prod)?;
                let s2c = d.s2c(sx)?;
                let s2c_plain = d.decrypt(s2c)?;
                let c2s = d.c2s(sy)?;
                let c2s_shares = d.fetch_shares(c2s)?;
                let cmp = d.scmp(sx, sy, Coin::Random)?;
                let mu = d.decrypt(cmp)?;
                let sum = d.linear(LinearOp::AddShares, sx, sy)?;
                let sum_shares = d.fetch_shares(sum)?;
                let diff = d.linear(LinearOp::SubCts, sx, sy)?;
                let diff_plain = d.decrypt(diff)?;
                let scaled = d.scale(SlotPart::Ciphertext, sx, -3)?;
                let scaled_plain = d.decrypt(scaled)?;
                Ok((
                    ct_x,
                    up_y,
                    z,
                    xy,
                    s2c_plain,
                    c2s_shares,
                    mu,
                    sum_shares,
                    diff_plain,
                    scaled_plain,
                ))
            },
        )
        .map_err(|e| e.to_string())?;
        let (ct_x, up_y, z, xy, s2c_plain, c2s_shares, mu, sum_shares, diff_plain, scaled_plain) =
            res;
        let (x, y) = (x as i128, y as i128);
        let c = ct_u(&ct_x);
        ensure!(o.dec(c) == Some(o.encode(x)), "session {k}: ⟦x⟧ wrong");
        let z0 = o.ddlog(o.pow_signed(c, i(up_y.s0.value())));
        let z1 = o.ddlog(o.pow_signed(c, i(up_y.s1.value())));
        ensure!(
            i(z.s0.value()) as u128 == z0 && i(z.s1.value()) as u128 == z1,
            "session {k}: SMUL shares"
        );
        ensure!(i(&xy) == x * y, "session {k}: x·y = {xy}");
        ensure!(
            u(&s2c_plain) == o.encode(x),
            "session {k}: S2C of the upload"
        );
        // C2S of slot y converts the slot's ciphertext ⟦y⟧.
        let c2s_diff = i(c2s_shares.s1.value()) - i(c2s_shares.s0.value());
        ensure!(
            o.modn(c2s_diff) == o.modn(o.two_alpha as i128 * y),
            "session {k}: C2S"
        );
        ensure!(
            u(&mu) <= 1,
            "session {k}: comparison output {mu} is not a bit"
        );
        let sum = i(sum_shares.s1.value()) - i(sum_shares.s0.value());
        ensure!(
            sum == o.two_alpha as i128 * (x + y),
            "session {k}: share addition"
        );
        ensure!(
            u(&diff_plain) == o.encode(x - y),
            "session {k}: ciphertext subtraction"
        );
        ensure!(
            u(&scaled_plain) == o.encode(-3 * x),
            "session {k}: scalar multiplication"
        );
        cases += 1;
    }
    Ok(cases)
}

/// Worked values for `N = 649`.
pub fn check_examples(o: &Toy, pk: &PublicKey, sk: &PrivateKey) -> Check {
    ensure!(
        o.n == 649 && o.h == 645 && o.two_alpha == 290,
        "toy constants"
    );
    ensure!(u(pk.h()) == 645, "public h = {}", pk.h());
    ensure!(
        o.two_alpha_inv == 47 && u(sk.two_alpha_inv()) == 47,
        "(2α)^-1 mod N"
    );
    let enc = |x: i64| {
        encode_signed(&BigInt::from(x), pk.n(), 4)
            .map(|m| u(&m))
            .ok()
    };
    ensure!(
        enc(-1) == Some(648) && enc(0) == Some(0) && o.decode(648) == -1,
        "signed codec"
    );
    ensure!(o.dec(o.enc(7, 5)) == Some(7), "Dec(Enc(7))");
    ensure!(o.modn(3 - 640) == 12, "ModN reconstruction");
    let g1 = o.mul(100, powm(650, 5, o.n2));
    ensure!(
        (o.ddlog(g1) + o.n - o.ddlog(100)) % o.n == 5,
        "DDLog with g₀ = 100"
    );
    let mut r = rng(17);
    let mut upload =
        |x: i64| do_upload(pk, sk, &BigInt::from(x), &mut r).map_err(|e| e.to_string());
    let (u0, u1) = upload(-3)?;
    ensure!(o.dec(ct_u(&u0.ct)) == Some(646), "upload(-3) plaintext");
    ensure!(
        i(u1.share_2ax.value()) - i(u0.share_2ax.value()) == -870,
        "upload(-3) shares"
    );
    let (u0, u1) = upload(5)?;
    ensure!(
        i(u1.share_2ax.value()) - i(u0.share_2ax.value()) == 1450,
        "upload(5) shares"
    );
    for (x, y, want) in [(3i64, 4i64, 235u128), (-2, 3, 207)] {
        let (ux, _) = upload(x)?;
        let (v0, v1) = upload(y)?;
        let shares = SharePair::new(v0.share_2ax, v1.share_2ax).map_err(|e| e.to_string())?;
        let z = smul_pair(pk, &ux.ct, &shares).map_err(|e| e.to_string())?;
        let got = o.modn(i(z.s1.value()) - i(z.s0.value()));
        ensure!(got == want, "SMUL {x}·{y} reconstructs to {got}");
    }
    ensure!(235 * o.two_alpha_inv % o.n == 12, "235·(2α)^-1");
    Ok(10)
}

pub type CheckFn = fn(&Toy, &PublicKey, &PrivateKey) -> Check;

pub fn all_checks() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("encrypt", |o, pk, _| check_encrypt(o, pk)),
        ("decrypt", check_decrypt),
        ("ddlog", |o, _, _| check_ddlog(o)),
        ("init/upload", check_init_upload),
        ("smul", check_smul),
        ("s2c", check_s2c),
        ("c2s", check_c2s),
        ("scmp", check_scmp),
        ("end-to-end", check_end_to_end),
        ("examples", check_examples),
    ]
}
