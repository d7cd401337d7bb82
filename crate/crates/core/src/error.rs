use thiserror::Error;

/// Errors produced by scenario loading, validation, and the numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Scenario document could not be parsed. The message carries the
    /// line/column context reported by the TOML parser.
    #[error("scenario parse error: {0}")]
    Parse(String),

    /// A scenario invariant failed. `path` names the offending field.
    #[error("invalid scenario: {path}: {message}")]
    Validation { path: String, message: String },

    /// A link has zero achievable rate but a nonzero payload to move.
    #[error("infeasible link `{link}`: zero rate with payload of {payload_bits} bits")]
    InfeasibleLink { link: &'static str, payload_bits: f64 },

    /// Negative input where a nonnegative quantity is required.
    #[error("{what} must be nonnegative, got {value}")]
    Negative { what: &'static str, value: f64 },

    /// Non-positive input where a positive quantity is required.
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    /// Bell-number recurrence left the representable range.
    #[error("bell number overflows u64 at n = {0}")]
    BellOverflow(u32),

    /// Set-partition enumeration asked for more elements than the cap allows.
    #[error("partition enumeration over {n} elements exceeds cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    /// Exhaustive assignment search asked for more than it can enumerate.
    #[error("assignment search over {coalitions} coalitions x {cells} cells exceeds cap {cap}")]
    AssignmentCap { coalitions: usize, cells: usize, cap: usize },

    /// Payment requested for an empty bid list or an absent winner.
    #[error("payment error: {0}")]
    Payment(String),

    /// Profit requested for a coalition/cell pair that cannot serve.
    #[error("coalition {coalition} is infeasible for cell {cell}")]
    InfeasiblePair { coalition: String, cell: u32 },

    /// Unknown id referenced somewhere.
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
