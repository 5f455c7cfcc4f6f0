use thiserror::Error;

/// Errors produced anywhere in the search pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A caller broke a documented precondition (non-symmetric matrix,
    /// non-equitable partition, dimension mismatch, out-of-range mask entry).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The two tracked eigenvalue curves do not cross inside the bracket.
    #[error("no eigenvalue crossing inside bracket [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    /// The leading-order spectrum has no degenerate cluster containing the
    /// marked-vertex eigenvalue; gamma is off-critical or the split is wrong.
    #[error("no degenerate cluster: marked eigenvalue {value} is isolated at tolerance {tol}")]
    NoDegeneracy { value: f64, tol: f64 },

    /// Exponent estimation needs structurally matching reduced matrices.
    #[error("structure mismatch: {0}; use an explicit mask split instead")]
    StructureMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
