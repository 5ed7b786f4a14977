//! Finite element discretizations of nonsymmetric or indefinite second-order
//! elliptic problems on the unit square, and two correction iterations that
//! solve the full problem only in a coarse space:
//!
//! * the iterative two-grid method, whose fine space lives on a nested
//!   refinement of the coarse mesh, and
//! * the iterative two-level method, whose fine space raises the polynomial
//!   degree on the coarse mesh itself.

// Tolerance checks are written as `!(x <= tol)` on purpose so that NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod analysis;
pub mod assembly;
pub mod element;
pub mod error;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;

pub use algorithms::{
    galerkin_solve, two_grid_iterate, two_level_iterate, IterateState, IterationOutcome,
    TwoGridConfig, TwoLevelConfig,
};
pub use analysis::{
    estimate_orders, h1_error, h1_error_to_interpolant, solution_error, time_run, ErrorReference,
    ExperimentRow, NormKind, OrderEstimate,
};
pub use assembly::{AssembledSystem, ProblemSpec, ReducedSystem};
pub use element::ReferenceElement;
pub use error::{Error, Result};
pub use mesh::{Diagonal, Mesh};
pub use quadrature::QuadratureRule;
pub use solver::{solve_general, solve_spd, SolveReport, SolverKind, SolverOptions};
pub use space::{dof_count, FeSpace, Prolongation};
pub use sparse::CsrMatrix;
