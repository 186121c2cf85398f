use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} = {value} exceeds the supported limit {limit}")]
    Unsupported {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// Fock truncation leaves more population outside the kept block than allowed.
    #[error("Fock truncation at n_max = {n_max} leaves tail mass {tail:e}")]
    Truncation { n_max: usize, tail: f64 },

    /// A numerical self-check (order doubling, step halving, trace drift) failed.
    #[error("{what}: deviation {deviation:e} exceeds tolerance {tol:e}")]
    Accuracy {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("refusing oracle run: {0}")]
    Refused(String),
}
