use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate direction: vector has zero norm")]
    DegenerateDirection,

    #[error("expected a unit vector, got norm {norm}")]
    NotUnit { norm: f64 },

    #[error("hyperplane not in H1: normal has last coordinate {last} (equatorial)")]
    NotInH1 { last: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid slab bounds ({y1}, {y2}]")]
    InvalidSlab { y1: f64, y2: f64 },

    #[error("matrix is not orthogonal (max |R^T R - I| = {deviation})")]
    NotOrthogonal { deviation: f64 },

    #[error(
        "nonzero atomless residual (particle TV {tv} > tolerance {tol}): \
         not finite-width representable under the pwl hypothesis"
    )]
    NonzeroResidual { tv: f64, tol: f64 },

    #[error("general-position check budget exhausted after {attempts} resamples (seed {seed})")]
    GeneralPositionBudget { seed: u64, attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed file")]
    Format(#[from] serde_json::Error),
}
