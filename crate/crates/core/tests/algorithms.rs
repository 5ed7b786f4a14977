use std::sync::Arc;

use twolevel_core::algorithms::CorrectionSolver;
use twolevel_core::assembly::{assemble_system, default_quadrature};
use twolevel_core::problems::{example_one, example_two};
use twolevel_core::solver::LinearSolver;
use twolevel_core::sparse::norm2;
use twolevel_core::{
    galerkin_solve, solution_error, two_grid_iterate, two_level_iterate, ErrorReference, FeSpace,
    Mesh, ProblemSpec, SolverKind, SolverOptions, TwoGridConfig, TwoLevelConfig,
};

fn space(m: usize, l: usize) -> FeSpace {
    FeSpace::new(Arc::new(Mesh::structured(m).unwrap()), l).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn without_remainder_one_round_recovers_galerkin() {
    let spec = ProblemSpec::constant(1.0, [0.0, 0.0], 0.0, |[x, y]| (3.0 * x).sin() + y);
    let (coarse, fine) = (space(4, 2), space(4, 4));
    let out = two_level_iterate(&spec, &coarse, &fine, &TwoLevelConfig::new(2, 4, 1)).unwrap();
    let galerkin = galerkin_solve(&fine, &spec, SolverOptions::default()).unwrap();
    assert!(max_diff(out.solution(), &galerkin) < 1e-10);

    let mesh = Arc::new(Mesh::structured(3).unwrap());
    let coarse = FeSpace::new(mesh.clone(), 2).unwrap();
    let fine = FeSpace::new(Arc::new(mesh.refine_nested(3).unwrap()), 2).unwrap();
    let out = two_grid_iterate(&spec, &coarse, &fine, &TwoGridConfig::new(2, 3, 1)).unwrap();
    let galerkin = galerkin_solve(&fine, &spec, SolverOptions::default()).unwrap();
    assert!(max_diff(out.solution(), &galerkin) < 1e-10);
}

#[test]
fn coarse_step_makes_residual_orthogonal_to_coarse_space() {
    let spec = ProblemSpec::constant(1.0, [2.0, -1.0], -10.0, |[x, y]| x * (1.0 - y) + 1.0);
    for (coarse, fine) in [(space(3, 2), space(3, 4)), (space(4, 3), space(4, 6))] {
        let solver =
            CorrectionSolver::new(&coarse, &fine, &spec, SolverOptions::default()).unwrap();
        let n = solver.fine_system().size();
        let u: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.5)
            .collect();
        let (e, _) = solver.coarse_correction(&u).unwrap();
        let pe = solver.prolongation().mul_vec(&e);
        let w: Vec<f64> = u.iter().zip(&pe).map(|(a, b)| a + b).collect();
        let before = norm2(&solver.prolongation().tr_mul_vec(&solver.fine_residual(&u)));
        let after = norm2(&solver.prolongation().tr_mul_vec(&solver.fine_residual(&w)));
        assert!(after <= 1e-10 * before.max(1.0), "{after:e} vs {before:e}");
    }
}

#[test]
fn iteration_converges_to_the_fine_galerkin_solution() {
    let spec = example_one();
    let (coarse, fine) = (space(6, 2), space(6, 4));
    let out = two_level_iterate(&spec, &coarse, &fine, &TwoLevelConfig::new(2, 4, 12)).unwrap();
    let galerkin = galerkin_solve(&fine, &spec, SolverOptions::default()).unwrap();
    assert!(max_diff(out.solution(), &galerkin) < 1e-11);
    let history = &out.state.residual_history;
    assert!(history.last().unwrap() < &1e-11);
    assert!(history.windows(2).take(4).all(|w| w[1] < w[0]));
}

#[test]
fn early_stop_on_residual() {
    let spec = example_one();
    let (coarse, fine) = (space(6, 2), space(6, 4));
    let mut cfg = TwoLevelConfig::new(2, 4, 50);
    cfg.residual_stop = Some(1e-6);
    let out = two_level_iterate(&spec, &coarse, &fine, &cfg).unwrap();
    assert!(out.state.iteration < 50);
    assert!(*out.state.residual_history.last().unwrap() <= 1e-6);
    assert_eq!(out.iterates.len(), out.state.iteration);
}

#[test]
fn polynomial_solution_is_reproduced_on_degree_six() {
    let spec = example_two();
    let s = space(4, 6);
    let u = galerkin_solve(&s, &spec, SolverOptions::default()).unwrap();
    let e = solution_error(&s, &u, &spec, ErrorReference::Exact).unwrap();
    assert!(e <= 1e-11, "{e:e}");
}

#[test]
fn diffusion_systems_are_positive_definite() {
    let spec = example_one();
    for m in 2..=12 {
        for l in 1..=6 {
            let s = space(m, l);
            let sys = assemble_system(&s, &spec, &default_quadrature(l))
                .unwrap()
                .apply_dirichlet();
            assert!(sys.stiffness.asymmetry() < 1e-12);
            let solver = LinearSolver::spd(&sys.stiffness, SolverOptions::default())
                .unwrap_or_else(|e| panic!("M={m} l={l}: {e}"));
            let (x, report) = solver.solve(&sys.load).unwrap();
            assert!(report.backward_error < 1e-14, "M={m} l={l}: {report:?}");
            let energy: f64 = x
                .iter()
                .zip(sys.stiffness.mul_vec(&x))
                .map(|(a, b)| a * b)
                .sum();
            assert!(energy > 0.0);
        }
    }
}

#[test]
fn iterative_and_direct_solvers_agree() {
    let spec = example_one();
    let (coarse, fine) = (space(5, 2), space(5, 4));
    let direct = two_level_iterate(&spec, &coarse, &fine, &TwoLevelConfig::new(2, 4, 3)).unwrap();
    let mut cfg = TwoLevelConfig::new(2, 4, 3);
    cfg.solver.kind = SolverKind::Iterative;
    let iterative = two_level_iterate(&spec, &coarse, &fine, &cfg).unwrap();
    assert!(max_diff(direct.solution(), iterative.solution()) < 1e-9);
}

#[test]
fn runs_are_bitwise_repeatable() {
    let spec = example_two();
    let (coarse, fine) = (space(5, 3), space(5, 5));
    let a = two_level_iterate(&spec, &coarse, &fine, &TwoLevelConfig::new(3, 5, 3)).unwrap();
    let b = two_level_iterate(&spec, &coarse, &fine, &TwoLevelConfig::new(3, 5, 3)).unwrap();
    assert_eq!(a.solution(), b.solution());
}

#[test]
fn invalid_configurations_are_rejected() {
    let spec = example_one();
    let (c, f) = (space(3, 3), space(3, 4));
    assert!(two_level_iterate(&spec, &f, &c, &TwoLevelConfig::new(4, 3, 3)).is_err());
    assert!(two_level_iterate(&spec, &c, &f, &TwoLevelConfig::new(3, 4, 0)).is_err());
    assert!(two_grid_iterate(&spec, &c, &f, &TwoGridConfig::new(3, 1, 3)).is_err());
    // Spaces that do not match the configuration.
    assert!(two_level_iterate(&spec, &c, &f, &TwoLevelConfig::new(2, 4, 3)).is_err());
    let no_exact = ProblemSpec::constant(1.0, [0.0; 2], 0.0, |_| 1.0);
    let u = galerkin_solve(&c, &no_exact, SolverOptions::default()).unwrap();
    assert!(solution_error(&c, &u, &no_exact, ErrorReference::Exact).is_err());
}
