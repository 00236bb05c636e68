use thiserror::Error;

/// Errors shared across the crate.
///
/// Schedule validation failures carry the offending stage so callers can point
/// at the exact entry of a schedule file; size failures are always explicit
/// (`BudgetExceeded` / `Overflow`) rather than silent truncation or wraparound.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("h0 must be a positive integer, got {0}")]
    H0Invalid(u64),

    #[error("stage {stage}: copy count q must be at least 2, got {q}")]
    QInvalid { stage: usize, q: u64 },

    #[error("stage {stage}: q = {q} needs {expected} spacer entries, got {got}")]
    SpacerCountMismatch {
        stage: usize,
        q: u64,
        expected: usize,
        got: usize,
    },

    #[error("invalid tail rule: {0}")]
    TailInvalid(String),

    #[error("could not parse schedule: {0}")]
    ParseError(String),

    #[error("arithmetic overflow while computing stage {stage} quantities")]
    Overflow { stage: usize },

    #[error("budget exceeded: {what} needs {needed} but the limit is {limit}")]
    BudgetExceeded {
        what: String,
        needed: u64,
        limit: u64,
    },

    #[error("no non-constant gap witness for stage {n} up to stage {max_stage}")]
    NoWitness { n: usize, max_stage: usize },

    #[error("factor sets did not stabilize within {stage_limit} stages (max length {max_len})")]
    NoStabilization { max_len: usize, stage_limit: usize },

    #[error(
        "window of radius {radius} around level {level} leaves the depth-{depth} tower; \
         extend the address first"
    )]
    WindowExceedsDepth {
        depth: usize,
        level: u64,
        radius: u64,
    },

    #[error("need at least {need} returns, window has {have}")]
    TooFewReturns { have: usize, need: usize },

    #[error("copy index {copy} out of range for q = {q}")]
    CopyIndexOutOfRange { copy: u64, q: u64 },

    #[error("addresses have different depths ({left} vs {right})")]
    DepthMismatch { left: usize, right: usize },

    #[error("shift offset {offset} exceeds code radius {radius}")]
    OffsetExceedsRadius { offset: i64, radius: usize },

    #[error("schedule classified repeating-consistent at depth {depth_checked}; pass allow_repeating to proceed")]
    RepeatingSchedule { depth_checked: usize },

    #[error("image symbol at return {at} is a spacer; pre-compose with a shift and retry")]
    NormalizationRequired { at: i64 },

    #[error("insufficient context: {0}")]
    InsufficientContext(String),

    #[error("matched offsets disagree: {first} vs {other}")]
    OffsetsInconsistent { first: i64, other: i64 },

    #[error("word contains a window outside the language (length {len})")]
    WordNotInLanguage { len: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
