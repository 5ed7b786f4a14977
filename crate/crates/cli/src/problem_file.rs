//! JSON description of a custom problem with a polynomial exact solution.
//!
//! ```json
//! {
//!   "alpha": [[1.0, 0.0], [0.0, 1.0]],
//!   "beta": [0.0, 0.0],
//!   "gamma": -10.0,
//!   "solution": [[1.0, 1, 1], [-1.0, 2, 1], [-1.0, 1, 2], [1.0, 2, 2]]
//! }
//! ```
//!
//! Each solution term `[c, i, j]` stands for `c x^i y^j`. The source term is
//! derived symbolically; the solution must vanish on the boundary.

use std::path::Path;

use serde::Deserialize;
use twolevel_core::problems::{Polynomial, PolynomialProblem};
use twolevel_core::ProblemSpec;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "identity")]
    pub alpha: [[f64; 2]; 2],
    #[serde(default)]
    pub beta: [f64; 2],
    #[serde(default)]
    pub gamma: f64,
    pub solution: Vec<(f64, u32, u32)>,
}

fn identity() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 1.0]]
}

impl ProblemFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("invalid problem file: {e}")))
    }

    pub fn to_problem(&self) -> CliResult<PolynomialProblem> {
        let solution = Polynomial {
            terms: self.solution.clone(),
        };
        if !solution.vanishes_on_boundary(64, 1e-12) {
            return Err(CliError::Usage(
                "the exact solution must vanish on the boundary of the unit square".into(),
            ));
        }
        Ok(PolynomialProblem {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            solution,
        })
    }

    pub fn to_spec(&self) -> CliResult<ProblemSpec> {
        let spec = self.to_problem()?.to_spec();
        spec.check_ellipticity(f64::MIN_POSITIVE, f64::INFINITY, 2)?;
        Ok(spec)
    }
}
