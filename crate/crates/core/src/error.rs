use thiserror::Error;

/// Errors raised by scenario validation, bound evaluation and simulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArg(String),
    /// No index qualifies in the same-period `eta` minimum; only reachable for
    /// bursts at or above the deterministic bound.
    #[error("no qualifying index for eta at burst {0}")]
    EmptyIndexSet(String),
    #[error("group bounds use different quanta: {0} vs {1}")]
    QuantumMismatch(String, String),
    #[error("hyperperiod holds {events} arrivals, cap is {cap}")]
    HyperperiodOverflow { events: u128, cap: usize },
}

pub type Result<T, E = BoundError> = std::result::Result<T, E>;
