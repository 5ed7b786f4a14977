use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twolevel_cli::table::{render_dof_table, render_rows};
use twolevel_cli::{
    dof_table, run_experiment, Algorithm, CliError, CliResult, Example, FineFactor, OutputFormat,
    RunConfig,
};
use twolevel_core::{Diagonal, ErrorReference, SolverKind};

/// Convergence tables for the two-level (degree-raising) and two-grid
/// (mesh-refining) iterations on an indefinite elliptic model problem.
#[derive(Parser, Debug)]
#[command(
    name = "twolevel",
    version,
    about,
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for each M and print one table row per mesh size (default).
    Run(RunArgs),
    /// Print degree-of-freedom counts of the coarse and fine spaces.
    DofTable(DofArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExampleArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Custom,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Direct,
    Iterative,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Problem preset, or `custom` together with --problem-file.
    #[arg(long, value_enum, default_value = "1")]
    example: ExampleArg,

    /// JSON file describing a polynomial problem (for --example custom).
    #[arg(long)]
    problem_file: Option<PathBuf>,

    /// galerkin, two-grid or two-level.
    #[arg(long, default_value = "two-level")]
    algorithm: Algorithm,

    /// Coarse degree (the only degree for galerkin and two-grid).
    #[arg(long, default_value_t = 3)]
    l: usize,

    /// Fine degree of the two-level method.
    #[arg(long, default_value_t = 6)]
    s: usize,

    /// Number of correction rounds.
    #[arg(long, default_value_t = 3)]
    k: usize,

    /// Mesh subdivisions per axis, comma separated.
    #[arg(
        long = "M",
        alias = "m",
        value_delimiter = ',',
        default_value = "9,10,11,12"
    )]
    m: Vec<usize>,

    /// p in scaled_error = h1_error * M^p. Defaults to the expected order:
    /// s (two-level), 2l with --fine-factor square (two-grid), l otherwise.
    #[arg(long, allow_hyphen_values = true)]
    scale_exponent: Option<i32>,

    /// Two-grid nesting factor: `square` (h = H^2) or an integer r (h = H/r).
    #[arg(long, default_value = "square")]
    fine_factor: FineFactor,

    #[arg(long, value_enum, default_value = "direct")]
    solver: SolverArg,

    /// Slope of the cell diagonals, -1 or +1.
    #[arg(long, default_value = "+1", allow_hyphen_values = true)]
    diagonal: Diagonal,

    /// Measure errors against the interpolant of u in the discrete space
    /// (`interpolant`) or against u itself (`exact`).
    #[arg(long, default_value = "interpolant")]
    error_reference: ErrorReference,

    /// csv or markdown.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,

    /// Write the table here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Compute rows concurrently (rows are then not timed). The thread
    /// count is capped by TWOLEVEL_THREADS.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args, Debug)]
struct DofArgs {
    #[arg(
        long = "M",
        alias = "m",
        value_delimiter = ',',
        default_value = "9,10,11,12"
    )]
    m: Vec<usize>,

    /// Polynomial degrees; the fine (h = H^2) column uses the first one.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
    degrees: Vec<usize>,

    #[arg(long, default_value = "csv")]
    format: OutputFormat,

    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> CliResult<RunConfig> {
        let example = match (self.example, self.problem_file) {
            (ExampleArg::Custom, Some(path)) => Example::Custom(path),
            (ExampleArg::Custom, None) => {
                return Err(CliError::Usage(
                    "--example custom needs --problem-file PATH".into(),
                ))
            }
            (_, Some(_)) => {
                return Err(CliError::Usage(
                    "--problem-file requires --example custom".into(),
                ))
            }
            (ExampleArg::One, None) => Example::One,
            (ExampleArg::Two, None) => Example::Two,
        };
        let scale_exponent =
            self.scale_exponent
                .unwrap_or(match (self.algorithm, self.fine_factor) {
                    (Algorithm::TwoLevel, _) => self.s as i32,
                    (Algorithm::TwoGrid, FineFactor::Square) => 2 * self.l as i32,
                    _ => self.l as i32,
                });
        Ok(RunConfig {
            example,
            algorithm: self.algorithm,
            l: self.l,
            s: self.s,
            k: self.k,
            m_list: self.m,
            scale_exponent,
            fine_factor: self.fine_factor,
            solver: match self.solver {
                SolverArg::Direct => SolverKind::Direct,
                SolverArg::Iterative => SolverKind::Iterative,
            },
            diagonal: self.diagonal,
            error_reference: self.error_reference,
            format: self.format,
            output: self.output,
            parallel: self.parallel,
        })
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(args: RunArgs) -> CliResult<bool> {
    let config = args.into_config()?;
    let rows = run_experiment(&config)?;
    for row in &rows {
        if let Err(reason) = &row.outcome {
            eprintln!("M={}: {reason}", row.m);
        }
    }
    emit(&render_rows(&rows, config.format), config.output.as_ref())?;
    Ok(rows.iter().all(|r| r.is_ok()))
}

fn dofs(args: DofArgs) -> CliResult<bool> {
    let table = dof_table(&args.m, &args.degrees)?;
    emit(&render_dof_table(&table, args.format), args.output.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Some(Command::Run(args)) => run(args),
        Some(Command::DofTable(args)) => dofs(args),
        None => run(cli.run),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
