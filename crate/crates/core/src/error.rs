use std::io;

use thiserror::Error;

use crate::sharing::Role;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid security parameters: {0}")]
    InvalidParams(String),

    #[error("parameter set violates `{0}`")]
    ParamInvariant(&'static str),

    #[error("no parameter set found within {0} attempts")]
    GenerationExhausted(usize),

    #[error("plaintext out of range for Z_N")]
    PlaintextOutOfRange,

    #[error("signed value exceeds the 2^{bound_bits} data bound")]
    SignedOverflow { bound_bits: u32 },

    #[error("ciphertext is not an element of Z*_{{N^2}}")]
    InvalidCiphertext,

    #[error("ciphertext does not decrypt under this key")]
    NotDecryptable,

    #[error("operands belong to different moduli")]
    ModulusMismatch,

    #[error("value has no inverse modulo the given modulus")]
    NotInvertible,

    #[error("exponent of {bits} bits exceeds table coverage of {max_bits} bits")]
    ExponentTooLarge { bits: u64, max_bits: u64 },

    #[error("secret outside the sharing bound")]
    SecretOutOfBound,

    #[error("share contexts do not match")]
    ContextMismatch,

    #[error("share roles do not match")]
    RoleMismatch,

    #[error("reduction modulus must be smaller than N")]
    ThetaTooLarge,

    #[error("recovered value exceeds 2^{bound_bits}")]
    RecoveredOutOfRange { bound_bits: u32 },

    #[error("no candidate in the theta-reduced difference is a valid product")]
    UnrecoverableWrap,

    #[error("session {0:#x} does not match the in-flight comparison")]
    SessionMismatch(u64),

    #[error("wire format: {0}")]
    Wire(String),

    #[error("protocol order violation: {0}")]
    ProtocolOrder(String),

    #[error("role {role} is not allowed to {action}")]
    RoleViolation { role: Role, action: &'static str },

    #[error("remote endpoint reported: {0}")]
    Remote(String),

    #[error("transport ({context}): {source}")]
    Transport {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("timed out waiting for {0}")]
    Timeout(String),

    #[error("link closed: {0}")]
    Disconnected(String),
}

impl Error {
    pub(crate) fn wire(msg: impl Into<String>) -> Self {
        Error::Wire(msg.into())
    }

    pub(crate) fn transport(context: impl Into<String>, source: io::Error) -> Self {
        Error::Transport {
            context: context.into(),
            source,
        }
    }
}
