//! Exact arithmetic for Kloosterman-type exponential sums over finite fields,
//! p-adic Frobenius structures on Bessel connections, Dwork congruences, and
//! Newton-polygon / ordinarity checks.
//!
//! Everything in this crate is exact: character sums are accumulated in
//! `Z[zeta_p]` with bignum coefficients, the Frobenius solver works in
//! `Q[pi]/(pi^(p-1)+p)` with exact rationals before reducing to truncated
//! pi-adic digits, and congruence checks track 2-adic valuations instead of
//! floating point. The `acceptance` module wires the cross-checks together;
//! `cargo run --example <name>` demonstrates each capability.

pub mod acceptance;
pub mod cyclotomic;
pub mod dwork;
pub mod expsum;
pub mod lfunction;
pub mod padic;
pub mod qpi;
pub mod field;
pub mod frobenius;
pub mod report;
pub mod series;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("supplied modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("field size {0} exceeds the q <= 2^20 construction cap")]
    FieldTooLarge(u64),
    #[error("modulus has wrong degree (expected {expected}, got {got})")]
    BadModulusDegree { expected: u32, got: u32 },
    #[error("elements belong to different fields")]
    MixedFields,
    #[error("cyclotomic orders differ ({0} vs {1})")]
    MixedOrders(u64, u64),
    #[error("scaled values carry different q ({0} vs {1})")]
    MixedScales(u64, u64),
    #[error("parameter a must be nonzero")]
    ZeroParameter,
    #[error("operation requires odd q")]
    EvenCharacteristic,
    #[error("degree {sub} does not divide {amb}")]
    NotASubfield { sub: u32, amb: u32 },
    #[error("no root of the subfield modulus in the ambient field")]
    NoEmbedding,
    #[error("division by {0} is not exact")]
    InexactDivision(String),
    #[error("inversion of a non-unit")]
    NonUnit,
    #[error("coefficient at index {0} has negative valuation")]
    NonIntegralCoefficient(usize),
    #[error("pi-adic precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("unsupported preset: {0}")]
    UnsupportedPreset(String),
    #[error("need at least {need} power sums, have {have}")]
    NotEnoughPowerSums { need: usize, have: usize },
    #[error("power series for degree {degree} has a nonzero coefficient at index {index}")]
    DegreeMismatch { degree: usize, index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
