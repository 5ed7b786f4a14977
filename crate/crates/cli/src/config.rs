//! Validated description of one table-producing run.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use twolevel_core::{Diagonal, ErrorReference, SolverKind, TwoGridConfig, TwoLevelConfig};

use crate::problem_file::ProblemFile;
use crate::{CliError, CliResult};

/// Which problem to solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Example {
    /// `u = sin(pi x) sin(pi y)`.
    One,
    /// `u = x (1 - x)^2 y (1 - y)^2`.
    Two,
    /// Polynomial problem read from a JSON file.
    Custom(PathBuf),
}

impl FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(Self::One),
            "2" => Ok(Self::Two),
            "custom" => Err("--example custom needs --problem-file PATH".into()),
            other => Err(format!("unknown example '{other}' (use 1, 2 or custom)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Galerkin,
    TwoGrid,
    TwoLevel,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "galerkin" => Ok(Self::Galerkin),
            "two-grid" => Ok(Self::TwoGrid),
            "two-level" => Ok(Self::TwoLevel),
            other => Err(format!(
                "unknown algorithm '{other}' (use galerkin, two-grid or two-level)"
            )),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Galerkin => "galerkin",
            Self::TwoGrid => "two-grid",
            Self::TwoLevel => "two-level",
        })
    }
}

/// Nesting factor between the coarse and fine mesh of the two-grid method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FineFactor {
    /// `r = M`, so `h = H^2`.
    #[default]
    Square,
    Fixed(usize),
}

impl FineFactor {
    pub fn for_subdivisions(self, m: usize) -> usize {
        match self {
            Self::Square => m,
            Self::Fixed(r) => r,
        }
    }
}

impl FromStr for FineFactor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "square" {
            return Ok(Self::Square);
        }
        s.parse::<usize>()
            .map(Self::Fixed)
            .map_err(|_| format!("fine factor must be 'square' or an integer, got '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(format!("unknown format '{other}' (use csv or markdown)")),
        }
    }
}

/// Everything needed to produce one convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: Example,
    pub algorithm: Algorithm,
    /// Coarse degree (two-level, two-grid) or the only degree (Galerkin).
    pub l: usize,
    /// Fine degree of the two-level method.
    pub s: usize,
    /// Number of correction rounds.
    pub k: usize,
    pub m_list: Vec<usize>,
    /// `scaled_error = h1_error * M^p`.
    pub scale_exponent: i32,
    pub fine_factor: FineFactor,
    pub solver: SolverKind,
    pub diagonal: Diagonal,
    pub error_reference: ErrorReference,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Compute rows concurrently; rows are then not timed.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            example: Example::One,
            algorithm: Algorithm::TwoLevel,
            l: 3,
            s: 6,
            k: 3,
            m_list: vec![9, 10, 11, 12],
            scale_exponent: 6,
            fine_factor: FineFactor::Square,
            solver: SolverKind::Direct,
            diagonal: Diagonal::PositiveSlope,
            error_reference: ErrorReference::Interpolant,
            format: OutputFormat::Csv,
            output: None,
            parallel: false,
        }
    }
}

impl RunConfig {
    /// Checks every parameter before any computation starts.
    pub fn validate(&self) -> CliResult<()> {
        self.check().map_err(|e| match e {
            CliError::Core(inner) => CliError::Usage(inner.to_string()),
            other => other,
        })
    }

    fn check(&self) -> CliResult<()> {
        if self.m_list.is_empty() {
            return Err(CliError::Usage("at least one M is required".into()));
        }
        if let Some(&m) = self.m_list.iter().find(|&&m| m == 0) {
            return Err(CliError::Usage(format!("M must be positive, got {m}")));
        }
        match self.algorithm {
            Algorithm::Galerkin => {
                if !(1..=twolevel_core::element::MAX_DEGREE).contains(&self.l) {
                    return Err(twolevel_core::Error::Degree(self.l).into());
                }
            }
            Algorithm::TwoLevel => self.two_level().validate()?,
            Algorithm::TwoGrid => {
                for &m in &self.m_list {
                    self.two_grid(m).validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn two_level(&self) -> TwoLevelConfig {
        let mut cfg = TwoLevelConfig::new(self.l, self.s, self.k);
        cfg.solver.kind = self.solver;
        cfg
    }

    pub fn two_grid(&self, m: usize) -> TwoGridConfig {
        let mut cfg = TwoGridConfig::new(self.l, self.fine_factor.for_subdivisions(m), self.k);
        cfg.solver.kind = self.solver;
        cfg
    }

    /// Loads the problem named by `example`.
    pub fn problem(&self) -> CliResult<twolevel_core::ProblemSpec> {
        match &self.example {
            Example::One => Ok(twolevel_core::problems::example_one()),
            Example::Two => Ok(twolevel_core::problems::example_two()),
            Example::Custom(path) => ProblemFile::read(path)?.to_spec(),
        }
    }
}
