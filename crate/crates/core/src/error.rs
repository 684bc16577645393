//! Error taxonomy for the toolkit.
//!
//! Two broad classes matter to callers: parameter errors (the request never
//! made sense; CLI exit code 2) and numeric-contract violations (the request
//! was well-formed but a computation left its guaranteed envelope; exit
//! code 3). Everything else is ordinary I/O plumbing.

use crate::graph::GraphFamily;

/// Unified error type for graph construction, simulation, reduction,
/// spectral analysis, and experiment drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Scattering coefficients are only defined for degree >= 3.
    #[error("invalid vertex degree {degree}: scattering requires degree >= 3 (degree 1 reflects, degree 2 passes through)")]
    InvalidDegree { degree: usize },

    /// Graph or experiment parameters outside their documented domain.
    #[error("invalid parameters: {reason}")]
    InvalidParameter { reason: String },

    /// An operation received a graph from the wrong family.
    #[error("graph family mismatch: expected {expected:?}, got {found:?}")]
    FamilyMismatch {
        expected: GraphFamily,
        found: GraphFamily,
    },

    /// A state vector's length does not match the graph's directed-state count.
    #[error("dimension mismatch: state has {state} amplitudes, graph has {graph} directed states")]
    DimensionMismatch { state: usize, graph: usize },

    /// A claimed invariant subspace leaked: the image of a basis vector under
    /// the walk has a component outside the span larger than tolerated.
    #[error("basis is not invariant: residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    NotInvariant { residual: f64, tolerance: f64 },

    /// A numeric cross-check failed (dual-route disagreement, norm drift,
    /// non-finite value, ...). The message names the violated contract.
    #[error("numeric contract violated: {reason}")]
    Numeric { reason: String },

    /// A fit was requested on data that cannot support one.
    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            reason: reason.into(),
        }
    }

    pub fn numeric(reason: impl Into<String>) -> Self {
        Error::Numeric {
            reason: reason.into(),
        }
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidDegree { .. }
            | Error::InvalidParameter { .. }
            | Error::FamilyMismatch { .. }
            | Error::DimensionMismatch { .. } => 2,
            Error::NotInvariant { .. } | Error::Numeric { .. } | Error::InsufficientData { .. } => {
                3
            }
            Error::Io(_) | Error::Serialize(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
