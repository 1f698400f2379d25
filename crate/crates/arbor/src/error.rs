use thiserror::Error;

/// Largest arity accepted wherever compositions or trees are iterated.
pub const MAX_ARITY: usize = 16;

/// Errors reported by the counting, enumeration, series and path routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity t = {0} is outside 1..={MAX_ARITY}")]
    Arity(usize),
    #[error("node count n must be at least 1")]
    EmptyTree,
    #[error("composition has {found} parts but arity is {expected}")]
    CompositionLength { expected: usize, found: usize },
    #[error("composition parts sum to {found}, expected {expected}")]
    CompositionSum { expected: usize, found: usize },
    #[error("forest tree count m = {m} is outside 1..{t} (must satisfy 1 <= m < t)")]
    ForestSize { m: usize, t: usize },
    #[error("forest composition part a{index} must be >= 1 (giant-root edge)")]
    MissingRootEdge { index: usize },
    #[error("forest with m = {m} trees needs at least {m} nodes, got {n}")]
    ForestTooSmall { m: usize, n: usize },
    #[error("slot index {slot} is outside 1..={t}")]
    Slot { slot: usize, t: usize },
    #[error("enumeration of {total} objects exceeds the budget of {budget}")]
    Budget { total: String, budget: u64 },
    #[error("series arity/truncation mismatch: ({0}, {1}) vs ({2}, {3})")]
    SeriesMismatch(usize, usize, usize, usize),
    #[error("x-degree {n} is beyond the series truncation {truncation}")]
    BeyondTruncation { n: usize, truncation: usize },
    #[error("malformed path at step {index}: {reason}")]
    MalformedPath { index: usize, reason: String },
    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },
    #[error("coefficient {value} is not divisible by {divisor}")]
    InexactDivision { value: String, divisor: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Accepts `1..=MAX_ARITY`.
pub fn check_arity(t: usize) -> Result<()> {
    if (1..=MAX_ARITY).contains(&t) {
        Ok(())
    } else {
        Err(Error::Arity(t))
    }
}
