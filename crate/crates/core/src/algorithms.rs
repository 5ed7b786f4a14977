//! Plain Galerkin solves and the two correction iterations.
//!
//! Both iterations alternate between
//!
//! 1. a coarse correction `e` in the coarse space solving the full
//!    (nonsymmetric/indefinite) problem for the current residual,
//!    `(A_c + N_c) e = P^T (F - (A + N) u)`, and
//! 2. a fine update solving only the symmetric positive definite part,
//!    `A u_new = F - N (u + P e)`.
//!
//! They differ only in the fine space: the two-grid iteration uses the same
//! degree on a nested refinement, the two-level iteration a higher degree on
//! the coarse mesh itself.

use crate::analysis::{h1_error_with, solution_error, ErrorReference, NormKind};
use crate::assembly::{assemble_system, default_quadrature, ProblemSpec, ReducedSystem};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::solver::{LinearSolver, SolveReport, SolverOptions};
use crate::space::{FeSpace, Prolongation};
use crate::sparse::{norm2, CsrMatrix};

/// Parameters of the two-level iteration (one mesh, two degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelConfig {
    pub coarse_degree: usize,
    pub fine_degree: usize,
    pub iterations: usize,
    pub solver: SolverOptions,
    /// Stop early once the relative fine residual drops below this value.
    pub residual_stop: Option<f64>,
}

impl TwoLevelConfig {
    pub fn new(coarse_degree: usize, fine_degree: usize, iterations: usize) -> Self {
        Self {
            coarse_degree,
            fine_degree,
            iterations,
            solver: SolverOptions::default(),
            residual_stop: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_degree(self.coarse_degree)?;
        check_degree(self.fine_degree)?;
        if self.fine_degree < self.coarse_degree + 1 {
            return Err(Error::Parameter(format!(
                "fine degree {} must exceed coarse degree {}",
                self.fine_degree, self.coarse_degree
            )));
        }
        check_iterations(self.iterations)
    }
}

/// Parameters of the two-grid iteration (one degree, two nested meshes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGridConfig {
    pub degree: usize,
    /// Fine mesh has `refinement` times as many subdivisions per axis.
    pub refinement: usize,
    pub iterations: usize,
    pub solver: SolverOptions,
    pub residual_stop: Option<f64>,
}

impl TwoGridConfig {
    pub fn new(degree: usize, refinement: usize, iterations: usize) -> Self {
        Self {
            degree,
            refinement,
            iterations,
            solver: SolverOptions::default(),
            residual_stop: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_degree(self.degree)?;
        if self.refinement < 2 {
            return Err(Error::Parameter(format!(
                "refinement factor {} must be at least 2",
                self.refinement
            )));
        }
        check_iterations(self.iterations)
    }
}

fn check_degree(l: usize) -> Result<()> {
    if (1..=crate::element::MAX_DEGREE).contains(&l) {
        Ok(())
    } else {
        Err(Error::Degree(l))
    }
}

fn check_iterations(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter(
            "at least one iteration is required".into(),
        ));
    }
    Ok(())
}

/// Progress of an iteration: the current fine-space coefficients (all DOFs).
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub current: Vec<f64>,
    pub iteration: usize,
    /// `|F - (A + N) u| / |F|` on interior fine DOFs after each round.
    pub residual_history: Vec<f64>,
}

impl IterateState {
    pub fn zero(n_dofs: usize) -> Self {
        Self {
            current: vec![0.0; n_dofs],
            iteration: 0,
            residual_history: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub state: IterateState,
    /// Fine-space coefficients after each round, starting with round 1.
    pub iterates: Vec<Vec<f64>>,
    pub coarse_reports: Vec<SolveReport>,
    pub fine_reports: Vec<SolveReport>,
}

impl IterationOutcome {
    pub fn solution(&self) -> &[f64] {
        &self.state.current
    }

    /// H1 error of every iterate against the exact solution of `spec`.
    pub fn h1_errors(
        &self,
        fine: &FeSpace,
        spec: &ProblemSpec,
        quad: &QuadratureRule,
    ) -> Result<Vec<f64>> {
        let (u, grad) = exact_solution(spec)?;
        Ok(self
            .iterates
            .iter()
            .map(|c| h1_error_with(fine, c, u, grad, quad, NormKind::Full))
            .collect())
    }

    /// Error of every iterate measured against `reference`.
    pub fn errors(
        &self,
        fine: &FeSpace,
        spec: &ProblemSpec,
        reference: ErrorReference,
    ) -> Result<Vec<f64>> {
        self.iterates
            .iter()
            .map(|c| solution_error(fine, c, spec, reference))
            .collect()
    }
}

type ExactSolution<'a> = (
    &'a (dyn Fn(crate::mesh::Point) -> f64 + Send + Sync),
    &'a (dyn Fn(crate::mesh::Point) -> [f64; 2] + Send + Sync),
);

pub(crate) fn exact_solution(spec: &ProblemSpec) -> Result<ExactSolution<'_>> {
    match (&spec.exact_u, &spec.exact_grad_u) {
        (Some(u), Some(g)) => Ok((u.as_ref(), g.as_ref())),
        _ => Err(Error::Parameter("problem has no exact solution".into())),
    }
}

/// Discrete operators and factorizations shared by all rounds of an iteration.
#[derive(Debug)]
pub struct CorrectionSolver {
    coarse: ReducedSystem,
    fine: ReducedSystem,
    /// Interior-to-interior embedding of the coarse space into the fine one.
    prolongation: CsrMatrix,
    coarse_solver: LinearSolver,
    fine_solver: LinearSolver,
    fine_dofs: usize,
    fine_interior: Vec<usize>,
}

impl CorrectionSolver {
    /// Assembles both levels, builds the embedding and factorizes the
    /// coarse full operator and the fine diffusion operator.
    pub fn new(
        coarse: &FeSpace,
        fine: &FeSpace,
        spec: &ProblemSpec,
        solver: SolverOptions,
    ) -> Result<Self> {
        let quad = default_quadrature(coarse.degree().max(fine.degree()));
        let coarse_sys = assemble_system(coarse, spec, &quad)?.apply_dirichlet();
        let fine_sys = assemble_system(fine, spec, &quad)?.apply_dirichlet();
        let prolongation = Prolongation::new(coarse, fine)?.interior().clone();
        let coarse_solver = LinearSolver::general(&coarse_sys.full_operator(), solver)?;
        let fine_solver = LinearSolver::spd(&fine_sys.stiffness, solver)?;
        Ok(Self {
            coarse: coarse_sys,
            fine: fine_sys,
            prolongation,
            coarse_solver,
            fine_solver,
            fine_dofs: fine.n_dofs(),
            fine_interior: fine.interior_dofs().to_vec(),
        })
    }

    pub fn coarse_system(&self) -> &ReducedSystem {
        &self.coarse
    }

    pub fn fine_system(&self) -> &ReducedSystem {
        &self.fine
    }

    pub fn prolongation(&self) -> &CsrMatrix {
        &self.prolongation
    }

    /// `F - (A + N) u` on interior fine DOFs.
    pub fn fine_residual(&self, u: &[f64]) -> Vec<f64> {
        let au = self.fine.apply_full(u);
        self.fine.load.iter().zip(au).map(|(f, a)| f - a).collect()
    }

    pub fn relative_residual(&self, u: &[f64]) -> f64 {
        let nf = norm2(&self.fine.load);
        let r = norm2(&self.fine_residual(u));
        if nf == 0.0 {
            r
        } else {
            r / nf
        }
    }

    /// Step 1: coarse correction `e` for the interior fine iterate `u`.
    pub fn coarse_correction(&self, u: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let rhs = self.prolongation.tr_mul_vec(&self.fine_residual(u));
        self.coarse_solver.solve(&rhs)
    }

    /// Step 2: diffusion solve with the remainder of `u + P e` moved to the right.
    pub fn fine_update(&self, u: &[f64], e: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let pe = self.prolongation.mul_vec(e);
        let w: Vec<f64> = u.iter().zip(&pe).map(|(a, b)| a + b).collect();
        let nw = self.fine.nonsym.mul_vec(&w);
        let rhs: Vec<f64> = self.fine.load.iter().zip(nw).map(|(f, n)| f - n).collect();
        self.fine_solver.solve(&rhs)
    }

    fn extend(&self, interior: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.fine_dofs];
        for (&d, &v) in self.fine_interior.iter().zip(interior) {
            full[d] = v;
        }
        full
    }

    /// Runs `iterations` rounds from the zero vector.
    pub fn iterate(
        &self,
        iterations: usize,
        residual_stop: Option<f64>,
    ) -> Result<IterationOutcome> {
        let mut state = IterateState::zero(self.fine_dofs);
        let mut u = vec![0.0; self.fine_interior.len()];
        let mut outcome = IterationOutcome {
            state: IterateState::zero(0),
            iterates: Vec::with_capacity(iterations),
            coarse_reports: Vec::with_capacity(iterations),
            fine_reports: Vec::with_capacity(iterations),
        };
        for _ in 0..iterations {
            let (e, coarse_report) = self.coarse_correction(&u)?;
            let (next, fine_report) = self.fine_update(&u, &e)?;
            u = next;
            state.iteration += 1;
            let res = self.relative_residual(&u);
            state.residual_history.push(res);
            outcome.iterates.push(self.extend(&u));
            outcome.coarse_reports.push(coarse_report);
            outcome.fine_reports.push(fine_report);
            if residual_stop.is_some_and(|tol| res <= tol) {
                break;
            }
        }
        state.current = self.extend(&u);
        outcome.state = state;
        Ok(outcome)
    }
}

/// Solves the full discrete problem `(A + N) u = F` on `space`.
pub fn galerkin_solve(
    space: &FeSpace,
    spec: &ProblemSpec,
    solver: SolverOptions,
) -> Result<Vec<f64>> {
    let quad = default_quadrature(space.degree());
    let sys = assemble_system(space, spec, &quad)?.apply_dirichlet();
    let (u, _) = LinearSolver::general(&sys.full_operator(), solver)?.solve(&sys.load)?;
    Ok(space.extend_interior(&u))
}

/// Iterative two-grid method: `fine` has the degree of `coarse` on a nested
/// refinement of its mesh.
pub fn two_grid_iterate(
    spec: &ProblemSpec,
    coarse: &FeSpace,
    fine: &FeSpace,
    config: &TwoGridConfig,
) -> Result<IterationOutcome> {
    config.validate()?;
    let (mc, mf) = (coarse.mesh().subdivisions(), fine.mesh().subdivisions());
    if coarse.degree() != config.degree || fine.degree() != config.degree {
        return Err(Error::IncompatibleSpaces(format!(
            "two-grid spaces must both have degree {}",
            config.degree
        )));
    }
    if mf != mc * config.refinement {
        return Err(Error::IncompatibleSpaces(format!(
            "fine mesh M={mf} is not the {}-fold refinement of M={mc}",
            config.refinement
        )));
    }
    CorrectionSolver::new(coarse, fine, spec, config.solver)?
        .iterate(config.iterations, config.residual_stop)
}

/// Iterative two-level method: `fine` raises the degree of `coarse` on the same mesh.
pub fn two_level_iterate(
    spec: &ProblemSpec,
    coarse: &FeSpace,
    fine: &FeSpace,
    config: &TwoLevelConfig,
) -> Result<IterationOutcome> {
    config.validate()?;
    if coarse.mesh().subdivisions() != fine.mesh().subdivisions() {
        return Err(Error::IncompatibleSpaces(
            "two-level spaces must share one mesh".into(),
        ));
    }
    if coarse.degree() != config.coarse_degree || fine.degree() != config.fine_degree {
        return Err(Error::IncompatibleSpaces(format!(
            "expected degrees ({}, {}), found ({}, {})",
            config.coarse_degree,
            config.fine_degree,
            coarse.degree(),
            fine.degree()
        )));
    }
    CorrectionSolver::new(coarse, fine, spec, config.solver)?
        .iterate(config.iterations, config.residual_stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use std::sync::Arc;

    fn spaces(m: usize, l: usize, s: usize) -> (FeSpace, FeSpace) {
        let mesh = Arc::new(Mesh::structured(m).unwrap());
        (
            FeSpace::new(mesh.clone(), l).unwrap(),
            FeSpace::new(mesh, s).unwrap(),
        )
    }

    #[test]
    fn config_validation() {
        assert!(TwoLevelConfig::new(3, 3, 3).validate().is_err());
        assert!(TwoLevelConfig::new(3, 4, 0).validate().is_err());
        assert!(TwoLevelConfig::new(3, 7, 3).validate().is_err());
        assert!(TwoLevelConfig::new(3, 6, 3).validate().is_ok());
        assert!(TwoGridConfig::new(3, 1, 3).validate().is_err());
        assert!(TwoGridConfig::new(3, 2, 3).validate().is_ok());
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let (c, _) = spaces(3, 2, 3);
        let spec = ProblemSpec::constant(1.0, [0.3, -0.2], -10.0, |_| 0.0);
        let u = galerkin_solve(&c, &spec, SolverOptions::default()).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let (c, f) = spaces(3, 2, 3);
        let spec = ProblemSpec::constant(1.0, [0.0; 2], 0.0, |_| 1.0);
        assert!(two_level_iterate(&spec, &c, &f, &TwoLevelConfig::new(2, 4, 1)).is_err());
        assert!(two_grid_iterate(&spec, &c, &f, &TwoGridConfig::new(2, 2, 1)).is_err());
        let (other, _) = spaces(4, 3, 4);
        assert!(two_level_iterate(&spec, &c, &other, &TwoLevelConfig::new(2, 3, 1)).is_err());
    }

    #[test]
    fn iteration_starts_from_zero_and_records_history() {
        let (c, f) = spaces(3, 1, 3);
        let spec = ProblemSpec::constant(1.0, [1.0, 0.5], -5.0, |[x, y]| x * y + 1.0);
        let out = two_level_iterate(&spec, &c, &f, &TwoLevelConfig::new(1, 3, 4)).unwrap();
        assert_eq!(out.state.iteration, 4);
        assert_eq!(out.iterates.len(), 4);
        assert_eq!(out.state.residual_history.len(), 4);
        assert_eq!(out.solution(), out.iterates[3].as_slice());
        assert!(IterateState::zero(5).current.iter().all(|&v| v == 0.0));
        for w in out.state.residual_history.windows(2) {
            assert!(w[1] <= w[0] * 1.0001);
        }
    }

    #[test]
    fn residual_stop_ends_early() {
        let (c, f) = spaces(3, 1, 2);
        let spec = ProblemSpec::constant(1.0, [0.0; 2], 0.0, |_| 1.0);
        let mut cfg = TwoLevelConfig::new(1, 2, 10);
        cfg.residual_stop = Some(1e-10);
        let out = two_level_iterate(&spec, &c, &f, &cfg).unwrap();
        assert_eq!(out.state.iteration, 1);
    }
}
