use thiserror::Error;

use crate::manifold::Family;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{family} with real dimension {dim} is not supported by {op}")]
    UnsupportedDimension {
        op: &'static str,
        family: Family,
        dim: usize,
    },

    #[error("{op} is not available on {family}")]
    UnsupportedManifold { op: &'static str, family: Family },

    #[error("no closed form for {family}; fall back to quadrature")]
    NoClosedForm { family: Family },

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureFailure {
        lo: f64,
        hi: f64,
        estimate: f64,
        error_bound: f64,
    },

    #[error("points belong to different manifolds")]
    SpecMismatch,

    #[error("coincident points {i} and {j} (distance {distance:e}): the Green function is singular")]
    Singularity { i: usize, j: usize, distance: f64 },

    #[error("finite-N lower bound violated: energy {energy} < bound {bound} at radius {radius}")]
    CertificateViolated {
        energy: f64,
        bound: f64,
        radius: f64,
    },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
