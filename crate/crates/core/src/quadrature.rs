//! Quadrature on the reference triangle `{x >= 0, y >= 0, x + y <= 1}`.

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::mesh::Point;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    points: Vec<Point>,
    weights: Vec<f64>,
    exact_degree: usize,
}

impl QuadratureRule {
    /// Collapsed (Duffy) tensor Gauss-Legendre rule exact for all polynomials
    /// of total degree `<= min_exact_degree`.
    ///
    /// `(s, t) -> (s, t (1 - s))` maps the unit square onto the triangle with
    /// Jacobian `1 - s`, so a degree-`d` integrand needs `ceil((d + 2) / 2)`
    /// points in `s`; one extra point per axis is added as margin.
    pub fn collapsed_gauss(min_exact_degree: usize) -> Result<Self> {
        if min_exact_degree == 0 {
            return Err(Error::Parameter(
                "quadrature degree must be at least 1".into(),
            ));
        }
        let n = (min_exact_degree + 2).div_ceil(2) + 1;
        let line = GaussLegendre::new(n)
            .map_err(|e| Error::Parameter(format!("Gauss-Legendre rule of size {n}: {e}")))?;
        let line: Vec<(f64, f64)> = line
            .as_node_weight_pairs()
            .iter()
            .map(|&(z, w)| (0.5 * (z + 1.0), 0.5 * w))
            .collect();
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for &(s, ws) in &line {
            for &(t, wt) in &line {
                points.push([s, t * (1.0 - s)]);
                weights.push(ws * wt * (1.0 - s));
            }
        }
        Ok(Self {
            points,
            weights,
            exact_degree: 2 * n - 2,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest total polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn integrate(&self, mut f: impl FnMut(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}
