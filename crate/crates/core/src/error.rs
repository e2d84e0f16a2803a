use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("group of order {order} exceeds the enumeration limit of {limit} elements")]
    Capacity { order: String, limit: usize },

    #[error("group is not nilpotent: lower central series stabilized at a subgroup of order {stalled_order}")]
    NotNilpotent { stalled_order: usize },

    #[error("jump law is not conjugacy-invariant: {0}")]
    NotConjugacyInvariant(String),

    #[error("reducible walk: support generates a proper subgroup of order {generated} (group order {order})")]
    ReducibleWalk { generated: usize, order: usize },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("no mixing-time bracket found below time cap {cap} (reducible walk suspected)")]
    Divergence { cap: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported projection: {0}")]
    UnsupportedProjection(String),

    #[error("degenerate density at t = 0; exact value is {exact}")]
    DegenerateDensity { exact: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for the capacity and numerical-precision family of failures.
    pub fn is_resource_error(&self) -> bool {
        matches!(
            self,
            Error::Capacity { .. } | Error::Precision(_) | Error::Divergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
