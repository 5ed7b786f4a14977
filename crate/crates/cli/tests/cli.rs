use std::process::{Command, Output};
use std::sync::Arc;

use twolevel_cli::table::CSV_HEADER;
use twolevel_core::{galerkin_solve, h1_error, FeSpace, Mesh, SolverOptions};

fn twolevel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twolevel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(line: &str, column: &str) -> String {
    let idx = CSV_HEADER.split(',').position(|c| c == column).unwrap();
    line.split(',').nth(idx).unwrap().to_string()
}

#[test]
fn two_grid_row_for_example_two() {
    let out = twolevel(&[
        "--example",
        "2",
        "--algorithm",
        "two-grid",
        "--l",
        "3",
        "--k",
        "3",
        "--M",
        "9",
        "--fine-factor",
        "square",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    assert_eq!(field(lines[1], "s_or_r"), "9");
    assert_eq!(field(lines[1], "dofs_fine"), "59536");
    let e: f64 = field(lines[1], "h1_error").parse().unwrap();
    assert!((e - 6.0567e-8).abs() / 6.0567e-8 < 0.05, "{e}");
}

#[test]
fn galerkin_smoke_run_reports_true_error() {
    let out = twolevel(&[
        "--example",
        "1",
        "--algorithm",
        "galerkin",
        "--l",
        "1",
        "--M",
        "2",
        "--error-reference",
        "exact",
        "--diagonal",
        "-1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    let e: f64 = field(line, "h1_error").parse().unwrap();

    let spec = twolevel_core::problems::example_one();
    let space = FeSpace::new(Arc::new(Mesh::structured(2).unwrap()), 1).unwrap();
    let u = galerkin_solve(&space, &spec, SolverOptions::default()).unwrap();
    let expected = h1_error(
        &space,
        &u,
        spec.exact_u.as_ref().unwrap().as_ref(),
        spec.exact_grad_u.as_ref().unwrap().as_ref(),
        &twolevel_core::analysis::error_quadrature(1),
    );
    assert!(e > 0.0);
    assert_eq!(field(line, "h1_error"), twolevel_cli::table::sci(expected));
}

#[test]
fn error_columns_are_reproducible() {
    let args = ["--example", "2", "--s", "5", "--M", "3,4"];
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let a = strip(stdout(&twolevel(&args)));
    let b = strip(stdout(&twolevel(&args)));
    assert_eq!(a, b);
}

#[test]
fn parallel_rows_are_untimed_and_identical() {
    let serial = stdout(&twolevel(&["--s", "4", "--M", "3,4,5"]));
    let out = Command::new(env!("CARGO_BIN_EXE_twolevel"))
        .args(["--s", "4", "--M", "3,4,5", "--parallel"])
        .env("TWOLEVEL_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let parallel = stdout(&out);
    for (s, p) in serial.lines().zip(parallel.lines()).skip(1) {
        assert!(p.ends_with(','), "{p}");
        assert_eq!(s.rsplit_once(',').unwrap().0, p.rsplit_once(',').unwrap().0);
    }
}

#[test]
fn dof_table_subcommand() {
    let out = twolevel(&["dof-table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "M,dof(V_H^3),dof(V_h^3),dof(V_H^4),dof(V_H^5),dof(V_H^6)"
    );
    assert!(text.contains("11,1156,132496,2025,3136,4489"));
    let one = stdout(&twolevel(&["dof-table", "--M", "1", "--degrees", "1"]));
    assert_eq!(one.lines().nth(1).unwrap(), "1,4,4");
}

#[test]
fn markdown_output_to_file() {
    let dir = std::env::temp_dir().join(format!("twolevel-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.md");
    let out = twolevel(&[
        "--s",
        "4",
        "--M",
        "3",
        "--format",
        "markdown",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("| M | H | l |"));
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn custom_problem_file() {
    let dir = std::env::temp_dir().join(format!("twolevel-cli-custom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    // u = x(1-x) y(1-y) is quadratic in each variable, so degree 4 is exact.
    std::fs::write(
        &path,
        r#"{"beta": [1.0, 2.0], "gamma": -5.0, "solution": [[1.0, 1, 1], [-1.0, 2, 1], [-1.0, 1, 2], [1.0, 2, 2]]}"#,
    )
    .unwrap();
    let out = twolevel(&[
        "--example",
        "custom",
        "--problem-file",
        path.to_str().unwrap(),
        "--l",
        "2",
        "--s",
        "4",
        "--k",
        "20",
        "--M",
        "3",
        "--error-reference",
        "exact",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    let e: f64 = field(&line, "h1_error").parse().unwrap();
    assert!(e < 1e-9, "{e}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_configurations_exit_with_usage_errors() {
    for args in [
        vec!["--s", "2"],
        vec!["--k", "0"],
        vec!["--algorithm", "two-grid", "--fine-factor", "1"],
        vec!["--example", "custom"],
        vec!["--algorithm", "multigrid"],
        vec!["--M", "0"],
    ] {
        let out = twolevel(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn missing_problem_file_is_reported() {
    let out = twolevel(&[
        "--example",
        "custom",
        "--problem-file",
        "/nonexistent/problem.json",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}
