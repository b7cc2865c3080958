use thiserror::Error;

use crate::integrand::{EvalError, ParseError};
use crate::regions::RegionError;
use crate::simplefn::SimpleFnError;

/// Errors raised by the functionals, the supermodularity scans and the
/// counterexample builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Region(#[from] RegionError),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    SimpleFn(#[from] SimpleFnError),

    #[error("integrand evaluation failed at {point:?}: {source}")]
    Eval {
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: integrand takes {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("not a violation witness: deficit {deficit} is not negative")]
    NotAWitness { deficit: f64 },

    #[error("no (eps, t0) pair with strict kernel decrease found within the search budget")]
    NoStrictDecreaseFound,

    #[error("kernel tail r^(n-1) j(r) does not decay on probes: {0}")]
    LimitViolated(String),

    #[error("kernel is not radial")]
    NotRadial,

    #[error("geometry precondition violated: {0}")]
    Geometry(String),
}

impl Error {
    pub(crate) fn eval(point: &[f64], source: EvalError) -> Self {
        Error::Eval {
            point: point.to_vec(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
