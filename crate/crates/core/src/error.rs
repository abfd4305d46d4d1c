use thiserror::Error;

/// Errors raised by the spectral, thermal and geometric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a parameter invariant (odd N, non-positive beta, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request would exceed what the dense routines are allowed to allocate.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("root not bracketed on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },

    /// Query sits on the phase boundary, where the limit metric jumps.
    #[error("singular point at beta = {beta}, h = {h}: {reason}")]
    Singular { beta: f64, h: f64, reason: String },

    /// Successive Richardson levels disagree beyond the accepted threshold.
    #[error("finite-difference estimate unstable: Richardson levels disagree by {rel:.3e} (relative)")]
    Unstable { rel: f64 },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::Resource(_) => 2,
            Error::Domain(_) | Error::Bracket { .. } | Error::Singular { .. } | Error::Unstable { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
