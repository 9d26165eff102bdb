use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("satellite {satellite}: {source}")]
    Satellite {
        satellite: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid point {grid_index}: {source}")]
    GridPoint {
        grid_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn at_satellite(self, satellite: usize) -> Self {
        Error::Satellite {
            satellite,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_grid_point(self, grid_index: usize) -> Self {
        Error::GridPoint {
            grid_index,
            source: Box::new(self),
        }
    }

    /// True for failures of a numerical kernel (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. } | Error::NoConvergence { .. } | Error::Numerical(_) => true,
            Error::Satellite { source, .. } | Error::GridPoint { source, .. } => {
                source.is_numerical()
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
