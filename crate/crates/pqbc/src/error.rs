use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are deliberately flat so the FFI layer can map each one to a
/// stable integer code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("value {value:#x} does not fit in {bits} bits")]
    WidthMismatch { value: u64, bits: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("modulus {0:#x} is not an irreducible polynomial of the requested degree")]
    ReducibleModulus(u128),
    #[error("transcript repeats a query point at entry {0}")]
    RepeatedQuery(usize),
    #[error("tweak {0:#x} is outside the configured tweak space")]
    TweakOutOfSpace(u64),
    #[error("promise violated: {0}")]
    PromiseViolated(String),
    #[error("message is empty")]
    EmptyMessage,
    #[error("message does not end on a block boundary")]
    PartialBlock,
    #[error("authentication tag mismatch")]
    TagMismatch,
    #[error("nonce must be exactly {0} bits")]
    NonceWidth(u32),
    #[error("no collision found within the query budget")]
    NoCollisionFound,
    #[error("key recovery failed: {0}")]
    RecoveryFailed(String),
    #[error("no key is consistent with the supplied pairs")]
    NoKey,
    #[error("{0} keys are consistent with the supplied pairs")]
    AmbiguousKey(usize),
    #[error("formula used outside its regime: {0}")]
    RegimeError(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("query budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_width(value: u64, bits: u32) -> Result<u64> {
    if bits >= 64 || value >> bits == 0 {
        Ok(value)
    } else {
        Err(Error::WidthMismatch { value, bits })
    }
}
