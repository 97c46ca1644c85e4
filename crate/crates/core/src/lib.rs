//! Two-server homomorphic secret sharing over a fast Paillier variant.
//!
//! A data owner encrypts signed integers and hands each of two
//! non-colluding servers a ciphertext plus a subtractive share of `2α·x`.
//! The servers then add, multiply (without talking to each other), compare
//! and convert between shares and ciphertexts.

pub mod arith;
pub mod batch;
pub mod bench;
pub mod ddlog;
pub mod error;
pub mod fastpai;
pub mod fixed_base;
pub mod meter;
pub mod params;
pub mod protocols;
pub mod sharing;
pub mod transport;
pub mod wire;

pub use error::{Error, Result};
pub use fastpai::{keygen, Ciphertext, PrivateKey, PublicKey};
pub use params::{ParamSet, SecurityParams};
pub use sharing::{Role, Share, ShareContext, SharePair};
