//! On-disk records for keys, assisted tuples and uploads.
//!
//! `"MRSE" | version u8 | kind u8 | body_len u32 | body`

use super::{decode_share, put_share, MessageCodec, Reader, Writer, MAGIC, MAX_PAYLOAD, VERSION};
use crate::error::{Error, Result};
use crate::fastpai::{PrivateKey, PublicKey};
use crate::params::SecurityParams;
use crate::protocols::{AssistedTuple, UploadRecord};

const RECORD_HEADER_LEN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum RecordKind {
    PublicKey = 1,
    SecretKey = 2,
    Assisted = 3,
    Upload = 4,
}

impl RecordKind {
    fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            1 => RecordKind::PublicKey,
            2 => RecordKind::SecretKey,
            3 => RecordKind::Assisted,
            4 => RecordKind::Upload,
            c => return Err(Error::wire(format!("unknown record kind {c}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeystoreRecord {
    PublicKey(PublicKey),
    SecretKey(PrivateKey),
    Assisted(AssistedTuple),
    Upload { slot: u32, record: UploadRecord },
}

impl KeystoreRecord {
    pub fn kind(&self) -> RecordKind {
        match self {
            KeystoreRecord::PublicKey(_) => RecordKind::PublicKey,
            KeystoreRecord::SecretKey(_) => RecordKind::SecretKey,
            KeystoreRecord::Assisted(_) => RecordKind::Assisted,
            KeystoreRecord::Upload { .. } => RecordKind::Upload,
        }
    }

    /// Serializes the record. Assisted tuples and uploads are written
    /// against `pk`'s widths.
    pub fn encode(&self, pk: Option<&PublicKey>) -> Result<Vec<u8>> {
        let mut w = Writer::default();
        match self {
            KeystoreRecord::PublicKey(pk) => {
                put_params(&mut w, pk.params());
                let width = pk.byte_width();
                w.u32(width as u32);
                w.fixed(pk.n(), width)?;
                w.fixed(pk.h(), width)?;
            }
            KeystoreRecord::SecretKey(sk) => {
                let width = crate::arith::byte_width(sk.n());
                w.u32(width as u32);
                w.fixed(sk.n(), width)?;
                w.fixed(sk.alpha(), width)?;
            }
            KeystoreRecord::Assisted(a) => {
                let codec = MessageCodec::new(require_pk(pk)?);
                put_share(&mut w, &a.two_alpha_share)?;
                for ct in [&a.ct_two_alpha_inv, &a.ct_zero, &a.ct_one] {
                    codec.put_ct(&mut w, ct)?;
                }
            }
            KeystoreRecord::Upload { slot, record } => {
                let codec = MessageCodec::new(require_pk(pk)?);
                w.u32(*slot);
                codec.put_ct(&mut w, &record.ct)?;
                put_share(&mut w, &record.share_2ax)?;
            }
        }
        let body = w.finish();
        let mut out = Vec::with_capacity(RECORD_HEADER_LEN + body.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind() as u8);
        out.extend_from_slice(&(body.len() as u32).to_be_bytes());
        out.extend_from_slice(&body);
        Ok(out)
    }

    /// Parses a record; `pk` is required for assisted tuples and uploads.
    pub fn decode(bytes: &[u8], pk: Option<&PublicKey>) -> Result<KeystoreRecord> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(Error::wire("bad magic"));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::wire(format!("unsupported version {version}")));
        }
        let kind = RecordKind::from_code(r.u8()?)?;
        let len = r.u32()? as usize;
        if len > MAX_PAYLOAD {
            return Err(Error::wire("record length exceeds limit"));
        }
        let body = r.take(len)?;
        r.finish()?;
        let mut r = Reader::new(body);
        let record = match kind {
            RecordKind::PublicKey => {
                let params = get_params(&mut r)?;
                let width = r.u32()? as usize;
                let n = r.fixed(width)?;
                let h = r.fixed(width)?;
                KeystoreRecord::PublicKey(PublicKey::new(n, h, params)?)
            }
            RecordKind::SecretKey => {
                let width = r.u32()? as usize;
                let n = r.fixed(width)?;
                let alpha = r.fixed(width)?;
                KeystoreRecord::SecretKey(PrivateKey::new(n, alpha)?)
            }
            RecordKind::Assisted => {
                let codec = MessageCodec::new(require_pk(pk)?);
                let share = decode_share(&mut r, Some(codec.public_key().n_arc()))?;
                KeystoreRecord::Assisted(AssistedTuple {
                    role: share.role(),
                    two_alpha_share: share,
                    ct_two_alpha_inv: codec.get_ct(&mut r)?,
                    ct_zero: codec.get_ct(&mut r)?,
                    ct_one: codec.get_ct(&mut r)?,
                })
            }
            RecordKind::Upload => {
                let codec = MessageCodec::new(require_pk(pk)?);
                let slot = r.u32()?;
                let ct = codec.get_ct(&mut r)?;
                let share_2ax = decode_share(&mut r, Some(codec.public_key().n_arc()))?;
                KeystoreRecord::Upload {
                    slot,
                    record: UploadRecord { ct, share_2ax },
                }
            }
        };
        r.finish()?;
        Ok(record)
    }
}

fn require_pk(pk: Option<&PublicKey>) -> Result<&PublicKey> {
    pk.ok_or_else(|| Error::wire("public key required for this record"))
}

fn put_params(w: &mut Writer, sp: &SecurityParams) {
    w.u32(sp.kappa);
    w.u32(sp.n_bits);
    w.u32(sp.sigma);
    w.u32(sp.data_bits);
    w.u8(u8::from(sp.is_toy()));
}

fn get_params(r: &mut Reader<'_>) -> Result<SecurityParams> {
    let kappa = r.u32()?;
    let n_bits = r.u32()?;
    let sigma = r.u32()?;
    let data_bits = r.u32()?;
    match r.u8()? {
        0 => SecurityParams::new(kappa, n_bits, sigma, data_bits),
        1 => {
            let toy = SecurityParams::toy();
            if toy.kappa != kappa || toy.n_bits != n_bits {
                return Err(Error::wire("inconsistent toy parameters"));
            }
            toy.with_data_bits(data_bits)?.with_sigma(sigma)
        }
        f => Err(Error::wire(format!("bad toy flag {f}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastpai::keygen_with_y;
    use crate::params::ParamSet;
    use crate::protocols::{do_init, do_upload};
    use num_bigint::{BigInt, BigUint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn records_round_trip_on_toy_keys() {
        let (pk, sk) = keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &BigUint::from(2u32),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let (a0, a1) = do_init(&pk, &sk, &mut rng).unwrap();
        let (u0, _) = do_upload(&pk, &sk, &BigInt::from(-3), &mut rng).unwrap();
        let records = [
            KeystoreRecord::PublicKey(pk.clone()),
            KeystoreRecord::SecretKey(sk),
            KeystoreRecord::Assisted(a0),
            KeystoreRecord::Assisted(a1),
            KeystoreRecord::Upload {
                slot: 7,
                record: u0,
            },
        ];
        for rec in records {
            let bytes = rec.encode(Some(&pk)).unwrap();
            assert_eq!(&bytes[..4], b"MRSE");
            assert_eq!(bytes[5], rec.kind() as u8);
            assert_eq!(KeystoreRecord::decode(&bytes, Some(&pk)).unwrap(), rec);
        }
    }

    #[test]
    fn truncated_or_keyless_records_rejected() {
        let (pk, sk) = keygen_with_y(
            &ParamSet::toy(),
            &SecurityParams::toy(),
            &BigUint::from(2u32),
        )
        .unwrap();
        let bytes = KeystoreRecord::PublicKey(pk.clone()).encode(None).unwrap();
        assert!(KeystoreRecord::decode(&bytes[..bytes.len() - 1], None).is_err());
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (a0, _) = do_init(&pk, &sk, &mut rng).unwrap();
        assert!(KeystoreRecord::Assisted(a0).encode(None).is_err());
    }
}
