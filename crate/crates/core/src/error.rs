use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh size M = {m} outside the supported range 1..={cap}")]
    MeshSize { m: usize, cap: usize },

    #[error("polynomial degree {0} outside the supported range 1..=6")]
    Degree(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The node/monomial evaluation matrix of a reference element is numerically singular.
    #[error("Vandermonde matrix for degree {degree} is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { degree: usize, condition: f64 },

    #[error("triangle {cell} has non-positive area {area:e}")]
    DegenerateElement { cell: usize, area: f64 },

    #[error("incompatible spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("coefficient field is not uniformly elliptic at ({x}, {y}): eigenvalues {min_eig:e}..{max_eig:e}")]
    Ellipticity {
        x: f64,
        y: f64,
        min_eig: f64,
        max_eig: f64,
    },

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("linear solve failed: {reason} ({report:?})")]
    SolveFailed { reason: String, report: SolveReport },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
}
