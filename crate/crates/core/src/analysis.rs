//! Error norms, convergence orders and run timing.

use std::time::Instant;

use crate::algorithms::exact_solution;
use crate::assembly::ProblemSpec;
use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::quadrature::QuadratureRule;
use crate::space::FeSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormKind {
    /// `sqrt(|e|_0^2 + |grad e|_0^2)`
    #[default]
    Full,
    /// `|grad e|_0` only
    Seminorm,
}

/// What a discrete solution is compared with when reporting its error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum ErrorReference {
    /// The Lagrange interpolant of the exact solution in the same space, so
    /// the reported value is `||I u - u_h||_1`. This is the convention of
    /// finite element packages that represent `u` as an expression of the
    /// discrete degree before taking the norm.
    #[default]
    Interpolant,
    /// The exact solution itself, `||u - u_h||_1`.
    Exact,
}

impl std::str::FromStr for ErrorReference {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "interpolant" => Ok(Self::Interpolant),
            "exact" => Ok(Self::Exact),
            other => Err(format!(
                "unknown error reference '{other}' (use interpolant or exact)"
            )),
        }
    }
}

impl std::fmt::Display for ErrorReference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Interpolant => "interpolant",
            Self::Exact => "exact",
        })
    }
}

/// Quadrature for error integrals on a degree-`degree` space.
pub fn error_quadrature(degree: usize) -> QuadratureRule {
    QuadratureRule::collapsed_gauss(2 * degree + 6).expect("positive quadrature degree")
}

/// Full H1 norm of `u_h - u`, where `u_h` has coefficients `coeffs` in `space`.
pub fn h1_error(
    space: &FeSpace,
    coeffs: &[f64],
    exact_u: impl Fn(Point) -> f64,
    exact_grad_u: impl Fn(Point) -> [f64; 2],
    quad: &QuadratureRule,
) -> f64 {
    h1_error_with(space, coeffs, exact_u, exact_grad_u, quad, NormKind::Full)
}

pub fn h1_error_with(
    space: &FeSpace,
    coeffs: &[f64],
    exact_u: impl Fn(Point) -> f64,
    exact_grad_u: impl Fn(Point) -> [f64; 2],
    quad: &QuadratureRule,
    kind: NormKind,
) -> f64 {
    let (l2, semi) = error_parts(space, coeffs, exact_u, exact_grad_u, quad);
    match kind {
        NormKind::Full => (l2 + semi).sqrt(),
        NormKind::Seminorm => semi.sqrt(),
    }
}

/// Full H1 norm of `I u - u_h`, with `I` the Lagrange interpolant of `space`.
pub fn h1_error_to_interpolant(
    space: &FeSpace,
    coeffs: &[f64],
    exact_u: impl Fn(Point) -> f64,
    quad: &QuadratureRule,
) -> f64 {
    assert_eq!(coeffs.len(), space.n_dofs());
    let diff: Vec<f64> = space
        .interpolate(exact_u)
        .iter()
        .zip(coeffs)
        .map(|(a, b)| b - a)
        .collect();
    let (l2, semi) = error_parts(space, &diff, |_| 0.0, |_| [0.0, 0.0], quad);
    (l2 + semi).sqrt()
}

/// H1 error of `coeffs` for a problem with known solution, measured against
/// `reference` with the default error quadrature of the space.
pub fn solution_error(
    space: &FeSpace,
    coeffs: &[f64],
    spec: &ProblemSpec,
    reference: ErrorReference,
) -> Result<f64> {
    let (u, grad) = exact_solution(spec)?;
    let quad = error_quadrature(space.degree());
    Ok(match reference {
        ErrorReference::Interpolant => h1_error_to_interpolant(space, coeffs, u, &quad),
        ErrorReference::Exact => h1_error(space, coeffs, u, grad, &quad),
    })
}

/// Squared L2 and squared gradient errors.
pub fn error_parts(
    space: &FeSpace,
    coeffs: &[f64],
    exact_u: impl Fn(Point) -> f64,
    exact_grad_u: impl Fn(Point) -> [f64; 2],
    quad: &QuadratureRule,
) -> (f64, f64) {
    assert_eq!(coeffs.len(), space.n_dofs());
    let tab = space.element().tabulate(quad);
    let mesh = space.mesh();
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for t in 0..mesh.n_triangles() {
        let [p0, p1, p2] = mesh.triangle_vertices(t);
        let j = [
            [p1[0] - p0[0], p2[0] - p0[0]],
            [p1[1] - p0[1], p2[1] - p0[1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [
            [j[1][1] / det, -j[0][1] / det],
            [-j[1][0] / det, j[0][0] / det],
        ];
        let local: Vec<f64> = space.cell_dofs(t).iter().map(|&d| coeffs[d]).collect();
        let mut cell_l2 = 0.0;
        let mut cell_semi = 0.0;
        for (q, (&r, &w)) in quad.points().iter().zip(quad.weights()).enumerate() {
            let x = [
                p0[0] + j[0][0] * r[0] + j[0][1] * r[1],
                p0[1] + j[1][0] * r[0] + j[1][1] * r[1],
            ];
            let mut uh = 0.0;
            let mut gref = [0.0; 2];
            for ((c, v), g) in local.iter().zip(tab.values(q)).zip(tab.gradients(q)) {
                uh += c * v;
                gref[0] += c * g[0];
                gref[1] += c * g[1];
            }
            let gh = [
                inv[0][0] * gref[0] + inv[1][0] * gref[1],
                inv[0][1] * gref[0] + inv[1][1] * gref[1],
            ];
            let gu = exact_grad_u(x);
            let e = uh - exact_u(x);
            cell_l2 += w * e * e;
            cell_semi += w * ((gh[0] - gu[0]).powi(2) + (gh[1] - gu[1]).powi(2));
        }
        l2 += det * cell_l2;
        semi += det * cell_semi;
    }
    (l2, semi)
}

/// One line of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub m: usize,
    pub h: f64,
    pub l: usize,
    /// Fine degree (two-level) or refinement factor (two-grid); `l` for Galerkin.
    pub s_or_r: usize,
    pub k: usize,
    pub dofs_coarse: usize,
    pub dofs_fine: usize,
    pub h1_error: f64,
    pub scaled_error: f64,
    /// `None` when the row was not timed.
    pub cpu_seconds: Option<f64>,
}

impl ExperimentRow {
    /// Row with `scaled_error = h1_error * M^p`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: usize,
        l: usize,
        s_or_r: usize,
        k: usize,
        dofs_coarse: usize,
        dofs_fine: usize,
        h1_error: f64,
        scale_exponent: i32,
        cpu_seconds: Option<f64>,
    ) -> Self {
        Self {
            m,
            h: 1.0 / m as f64,
            l,
            s_or_r,
            k,
            dofs_coarse,
            dofs_fine,
            h1_error,
            scaled_error: h1_error * (m as f64).powi(scale_exponent),
            cpu_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// Orders between consecutive usable rows.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `log e` against `log H`.
    pub slope: f64,
    /// Indices of rows dropped because their error was not positive.
    pub excluded: Vec<usize>,
}

/// Observed convergence orders from `(H, error)` pairs.
pub fn estimate_orders_from(h: &[f64], errors: &[f64]) -> Result<OrderEstimate> {
    if h.len() != errors.len() {
        return Err(Error::Dimension {
            expected: h.len(),
            found: errors.len(),
        });
    }
    let mut excluded = Vec::new();
    let mut pts = Vec::new();
    for (i, (&hi, &ei)) in h.iter().zip(errors).enumerate() {
        if ei > 0.0 && ei.is_finite() && hi > 0.0 {
            pts.push((hi.ln(), ei.ln()));
        } else {
            excluded.push(i);
        }
    }
    if pts.len() < 2 {
        return Err(Error::Parameter(
            "need at least two rows with positive errors".into(),
        ));
    }
    let mut pairwise = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let dh = w[0].0 - w[1].0;
        if dh == 0.0 {
            return Err(Error::Parameter(
                "rows must have distinct mesh sizes".into(),
            ));
        }
        pairwise.push((w[0].1 - w[1].1) / dh);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(OrderEstimate {
        pairwise,
        slope: sxy / sxx,
        excluded,
    })
}

pub fn estimate_orders(rows: &[ExperimentRow]) -> Result<OrderEstimate> {
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    estimate_orders_from(&h, &e)
}

/// Runs `procedure` and returns its result with elapsed wall-clock seconds.
pub fn time_run<T>(procedure: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = procedure();
    (out, start.elapsed().as_secs_f64())
}
