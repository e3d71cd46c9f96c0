use thiserror::Error;

/// Errors produced by the engine.
///
/// Checked integer arithmetic is used throughout; any overflow is a hard
/// error rather than a silent wrap. Search budgets exhausting is reported
/// separately from genuine model inconsistencies.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("weight type mismatch")]
    WeightMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("arm index {arm} out of range (1..={t})")]
    ArmOutOfRange { arm: usize, t: usize },

    #[error("slot {slot} out of range for sequence of length {len}")]
    SlotOutOfRange { slot: usize, len: usize },

    #[error("integer overflow in checked arithmetic")]
    Overflow,

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("search budget exhausted after {nodes} nodes (depth {depth})")]
    SearchExhausted { nodes: u64, depth: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checked i64 helpers. All lattice arithmetic goes through these.
pub(crate) fn cadd(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn csub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub(crate) fn cmul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn cneg(a: i64) -> Result<i64> {
    a.checked_neg().ok_or(Error::Overflow)
}
