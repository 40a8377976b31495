use std::fmt;

use thiserror::Error;

/// One of the three admissibility conditions on a coefficient triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `b² − 3c ≤ 0`, which makes the cubic strictly increasing.
    I,
    /// `d < 0`, i.e. `f(0) < 0`.
    Ii,
    /// `1 + b + c + d > 0`, i.e. `f(1) > 0`.
    Iii,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::I => "i",
            Condition::Ii => "ii",
            Condition::Iii => "iii",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("ConditionViolation({0}): triple is not admissible")]
    ConditionViolation(Condition),

    #[error("HalfRoot: 1 + 2b + 4c + 8d = 0, the polynomial has the rational root 1/2")]
    HalfRoot,

    #[error("coefficient grew to {bits} bits, above the configured limit of {limit}")]
    CoefficientLimit { bits: u64, limit: u64 },

    #[error("CorruptState: polynomial vanished at the dyadic point {0}")]
    CorruptState(String),

    #[error("InvalidShape: b² = {b_squared} exceeds 3c = {three_c}")]
    InvalidShape { b_squared: String, three_c: String },

    #[error("PrecisionTooLow: {0} bits cannot resolve consecutive roots")]
    PrecisionTooLow(u32),

    #[error("DataCorrupt: {0}")]
    DataCorrupt(String),

    #[error("RankDeficient: reached rank {rank} of 64 after {equations} equations")]
    RankDeficient { rank: usize, equations: usize },

    #[error("InputTooShort: {test} needs at least {needed} bits, got {got}")]
    InputTooShort {
        test: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
