//! Runs the configured algorithm over a list of mesh sizes.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use twolevel_core::analysis::solution_error;
use twolevel_core::{
    dof_count, galerkin_solve, time_run, two_grid_iterate, two_level_iterate, ExperimentRow,
    FeSpace, Mesh, ProblemSpec, SolverOptions,
};

use crate::config::{Algorithm, RunConfig};
use crate::CliResult;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TWOLEVEL_THREADS";

const WARM_UP_SUBDIVISIONS: usize = 2;

/// One requested row: the computed values, or why the computation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    pub m: usize,
    pub outcome: Result<ExperimentRow, String>,
}

impl RowResult {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }
}

/// Computes one row per entry of `config.m_list`, in order.
///
/// Rows are timed and run one after another unless `config.parallel` is set,
/// in which case they run concurrently and `cpu_seconds` is left empty.
pub fn run_experiment(config: &RunConfig) -> CliResult<Vec<RowResult>> {
    config.validate()?;
    let spec = config.problem()?.on_diagonal(config.diagonal);
    if !config.parallel {
        // One untimed solve on a tiny mesh first, so that one-time costs
        // (basis tables, allocator growth) are not charged to the first row.
        let _ = solve(&spec, config, WARM_UP_SUBDIVISIONS);
        return Ok(config
            .m_list
            .iter()
            .map(|&m| RowResult {
                m,
                outcome: compute_row(&spec, config, m, true).map_err(|e| e.to_string()),
            })
            .collect());
    }
    let n = config.m_list.len();
    let threads = worker_threads().min(n);
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; n]);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let m = config.m_list[i];
                let outcome = compute_row(&spec, config, m, false).map_err(|e| e.to_string());
                results.lock().expect("no worker panicked")[i] = Some(RowResult { m, outcome });
            });
        }
    });
    Ok(results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every row was computed"))
        .collect())
}

/// Worker count: available cores, capped by `TWOLEVEL_THREADS` when set.
pub fn worker_threads() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => available.min(cap),
        _ => available,
    }
}

/// Solves for one mesh size and measures the error of the final iterate.
pub fn compute_row(
    spec: &ProblemSpec,
    config: &RunConfig,
    m: usize,
    timed: bool,
) -> twolevel_core::Result<ExperimentRow> {
    let (solved, seconds) = time_run(|| solve(spec, config, m));
    let (space, coeffs, s_or_r, k, dofs_coarse) = solved?;
    let error = solution_error(&space, &coeffs, spec, config.error_reference)?;
    Ok(ExperimentRow::new(
        m,
        config.l,
        s_or_r,
        k,
        dofs_coarse,
        space.n_dofs(),
        error,
        config.scale_exponent,
        timed.then_some(seconds),
    ))
}

type Solved = (FeSpace, Vec<f64>, usize, usize, usize);

fn solve(spec: &ProblemSpec, config: &RunConfig, m: usize) -> twolevel_core::Result<Solved> {
    let mesh = Arc::new(Mesh::structured(m)?);
    match config.algorithm {
        Algorithm::Galerkin => {
            let space = FeSpace::new(mesh, config.l)?;
            let solver = SolverOptions {
                kind: config.solver,
                ..SolverOptions::default()
            };
            let coeffs = galerkin_solve(&space, spec, solver)?;
            let n = space.n_dofs();
            Ok((space, coeffs, config.l, 0, n))
        }
        Algorithm::TwoLevel => {
            let cfg = config.two_level();
            let coarse = FeSpace::new(mesh.clone(), cfg.coarse_degree)?;
            let fine = FeSpace::new(mesh, cfg.fine_degree)?;
            let out = two_level_iterate(spec, &coarse, &fine, &cfg)?;
            let coeffs = out.state.current;
            Ok((
                fine,
                coeffs,
                cfg.fine_degree,
                cfg.iterations,
                coarse.n_dofs(),
            ))
        }
        Algorithm::TwoGrid => {
            let cfg = config.two_grid(m);
            let fine_mesh = Arc::new(mesh.refine_nested(cfg.refinement)?);
            let coarse = FeSpace::new(mesh, cfg.degree)?;
            let fine = FeSpace::new(fine_mesh, cfg.degree)?;
            let out = two_grid_iterate(spec, &coarse, &fine, &cfg)?;
            let coeffs = out.state.current;
            Ok((
                fine,
                coeffs,
                cfg.refinement,
                cfg.iterations,
                coarse.n_dofs(),
            ))
        }
    }
}

/// Degree-of-freedom counts per mesh size, with the fine-mesh column of the
/// two-grid method (`h = H^2`) for the first listed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofTable {
    pub degrees: Vec<usize>,
    pub rows: Vec<DofRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofRow {
    pub m: usize,
    /// `dof(V_H^d)` for each listed degree.
    pub coarse: Vec<usize>,
    /// `dof(V_h^d)` with `h = H^2` and `d` the first listed degree.
    pub fine: usize,
}

pub fn dof_table(m_list: &[usize], degrees: &[usize]) -> CliResult<DofTable> {
    let Some(&first) = degrees.first() else {
        return Err(crate::CliError::Usage(
            "at least one degree is required".into(),
        ));
    };
    let rows = m_list
        .iter()
        .map(|&m| {
            Ok(DofRow {
                m,
                coarse: degrees
                    .iter()
                    .map(|&d| dof_count(m, d))
                    .collect::<Result<_, _>>()?,
                fine: dof_count(m * m, first)?,
            })
        })
        .collect::<CliResult<_>>()?;
    Ok(DofTable {
        degrees: degrees.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_space_has_four_dofs() {
        let t = dof_table(&[1], &[1]).unwrap();
        assert_eq!(t.rows[0].coarse, vec![4]);
    }

    #[test]
    fn thread_cap_is_at_least_one() {
        assert!(worker_threads() >= 1);
    }
}
