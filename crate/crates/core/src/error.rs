//! Error type shared by the engine modules.

use thiserror::Error;

/// Everything that can go wrong outside of plain arithmetic.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// `adem_reduce` was called on a pair that is already admissible.
    #[error("adem precondition violated: ({a}, {b}) is already admissible")]
    AdemPrecondition { a: u32, b: u32 },

    /// A `v_i` with `i` beyond the truncation level was requested.
    #[error("operator v_{i} does not exist at truncation level n = {n}")]
    Truncation { i: u32, n: i32 },

    /// A differential landed on a monomial missing from the enumerated
    /// basis. The window must be widened.
    #[error("completeness fault at ({x}, {s}): differential term `{term}` not in enumerated basis")]
    CompletenessFault { x: i32, s: u32, term: String },

    /// Module presentation rejected.
    #[error("invalid module presentation: {0}")]
    Presentation(String),

    /// Text input (monomial, expression, or JSON document) rejected.
    #[error("parse error: {0}")]
    Parse(String),

    /// A named class outside the built-in table.
    #[error("unknown class name `{0}`")]
    UnknownClass(String),
}

pub type Result<T> = std::result::Result<T, Error>;
