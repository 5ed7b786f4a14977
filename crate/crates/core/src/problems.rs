//! Manufactured test problems on the unit square.

use std::f64::consts::PI;

use crate::assembly::ProblemSpec;
use crate::mesh::Point;

/// Reaction coefficient shared by both presets (indefinite problem).
pub const PRESET_GAMMA: f64 = -10.0;

/// `u = sin(pi x) sin(pi y)` with `alpha = 1`, `beta = 0`, `gamma = -10`,
/// so `f = (2 pi^2 - 10) u`.
pub fn example_one() -> ProblemSpec {
    let c = 2.0 * PI * PI + PRESET_GAMMA;
    ProblemSpec::constant(1.0, [0.0; 2], PRESET_GAMMA, move |[x, y]| {
        c * (PI * x).sin() * (PI * y).sin()
    })
    .with_exact(
        |[x, y]| (PI * x).sin() * (PI * y).sin(),
        |[x, y]| {
            [
                PI * (PI * x).cos() * (PI * y).sin(),
                PI * (PI * x).sin() * (PI * y).cos(),
            ]
        },
    )
}

// p(t) = t (1 - t)^2 = t - 2t^2 + t^3
fn p(t: f64) -> f64 {
    t * (1.0 - t) * (1.0 - t)
}

fn dp(t: f64) -> f64 {
    1.0 - 4.0 * t + 3.0 * t * t
}

fn ddp(t: f64) -> f64 {
    6.0 * t - 4.0
}

/// Source of the second preset: `-Laplace(u) - 10 u` for `u = p(x) p(y)`.
pub fn example_two_source([x, y]: Point) -> f64 {
    -(ddp(x) * p(y) + p(x) * ddp(y)) + PRESET_GAMMA * p(x) * p(y)
}

/// `u = x (1 - x)^2 y (1 - y)^2` with `alpha = 1`, `beta = 0`, `gamma = -10`.
pub fn example_two() -> ProblemSpec {
    ProblemSpec::constant(1.0, [0.0; 2], PRESET_GAMMA, example_two_source)
        .with_exact(|[x, y]| p(x) * p(y), |[x, y]| [dp(x) * p(y), p(x) * dp(y)])
}

/// A polynomial `sum c x^a y^b`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub terms: Vec<(f64, u32, u32)>,
}

impl Polynomial {
    pub fn eval(&self, [x, y]: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    pub fn dx(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(c, a, b)| (c * a as f64, a - 1, b))
                .collect(),
        }
    }

    pub fn dy(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.2 > 0)
                .map(|&(c, a, b)| (c * b as f64, a, b - 1))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, a, b)| (s * c, a, b)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.1 + t.2).max().unwrap_or(0)
    }

    /// `true` if the polynomial vanishes on the boundary of the unit square,
    /// checked at `samples` points per side.
    pub fn vanishes_on_boundary(&self, samples: usize, tol: f64) -> bool {
        (0..=samples).all(|i| {
            let t = i as f64 / samples as f64;
            [[t, 0.0], [t, 1.0], [0.0, t], [1.0, t]]
                .iter()
                .all(|&p| self.eval(p).abs() <= tol)
        })
    }
}

/// Problem with constant coefficients and a polynomial exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialProblem {
    pub alpha: [[f64; 2]; 2],
    pub beta: [f64; 2],
    pub gamma: f64,
    pub solution: Polynomial,
}

impl PolynomialProblem {
    /// `-div(alpha grad u) + beta . grad u + gamma u`, expanded symbolically.
    pub fn source(&self) -> Polynomial {
        let u = &self.solution;
        let (ux, uy) = (u.dx(), u.dy());
        let a = self.alpha;
        let diffusion = ux
            .dx()
            .scaled(a[0][0])
            .plus(&ux.dy().scaled(a[0][1] + a[1][0]))
            .plus(&uy.dy().scaled(a[1][1]));
        diffusion
            .scaled(-1.0)
            .plus(&ux.scaled(self.beta[0]))
            .plus(&uy.scaled(self.beta[1]))
            .plus(&u.scaled(self.gamma))
    }

    pub fn to_spec(&self) -> ProblemSpec {
        let alpha = self.alpha;
        let beta = self.beta;
        let gamma = self.gamma;
        let f = self.source();
        let u = self.solution.clone();
        let (ux, uy) = (u.dx(), u.dy());
        let mut spec = ProblemSpec::constant(1.0, beta, gamma, move |p| f.eval(p))
            .with_exact(move |p| u.eval(p), move |p| [ux.eval(p), uy.eval(p)]);
        spec.alpha = std::sync::Arc::new(move |_| alpha);
        spec
    }
}
