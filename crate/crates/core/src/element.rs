//! Lagrange elements of degree 1 to 6 on the reference triangle.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::quadrature::QuadratureRule;

pub const MAX_DEGREE: usize = 6;

const MAX_CONDITION: f64 = 1e12;

/// Lagrange basis on equispaced nodes `(i/l, j/l)`, `i + j <= l`.
///
/// Nodes are ordered with `j` outer and `i` inner, so node `(i, j)` has local
/// index `j * (l + 1) - j * (j - 1) / 2 + i`. Each basis function is stored
/// through its coefficients in the monomial basis `x^a y^b`, `a + b <= l`.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    degree: usize,
    nodes: Vec<Point>,
    lattice: Vec<[usize; 2]>,
    exponents: Vec<[u32; 2]>,
    /// `coefficients[m * n + i]` is the weight of monomial `m` in basis function `i`.
    coefficients: Vec<f64>,
}

pub fn node_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::Degree(degree));
        }
        let n = node_count(degree);
        let lf = degree as f64;
        let mut lattice = Vec::with_capacity(n);
        for j in 0..=degree {
            for i in 0..=degree - j {
                lattice.push([i, j]);
            }
        }
        let nodes: Vec<Point> = lattice
            .iter()
            .map(|&[i, j]| [i as f64 / lf, j as f64 / lf])
            .collect();
        let mut exponents = Vec::with_capacity(n);
        for total in 0..=degree as u32 {
            for b in 0..=total {
                exponents.push([total - b, b]);
            }
        }

        let vandermonde: Vec<f64> = nodes
            .iter()
            .flat_map(|&[x, y]| {
                exponents
                    .iter()
                    .map(move |&[a, b]| x.powi(a as i32) * y.powi(b as i32))
            })
            .collect();
        // inverse[m * n + i]: monomial m, node i -- exactly the coefficient layout.
        let coefficients = invert_full_pivot(&vandermonde, n).ok_or(Error::IllConditioned {
            degree,
            condition: f64::INFINITY,
        })?;
        let condition = norm_one(&vandermonde, n) * norm_one(&coefficients, n);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { degree, condition });
        }
        Ok(Self {
            degree,
            nodes,
            lattice,
            exponents,
            coefficients,
        })
    }

    /// Shared instance for `degree`, built on first use.
    pub fn cached(degree: usize) -> Result<&'static Self> {
        static CACHE: [OnceLock<ReferenceElement>; MAX_DEGREE] =
            [const { OnceLock::new() }; MAX_DEGREE];
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::Degree(degree));
        }
        let slot = &CACHE[degree - 1];
        if let Some(elem) = slot.get() {
            return Ok(elem);
        }
        let elem = Self::new(degree)?;
        Ok(slot.get_or_init(|| elem))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_basis(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Integer lattice coordinates `(i, j)` of each node.
    pub fn node_lattice(&self) -> &[[usize; 2]] {
        &self.lattice
    }

    pub fn monomial_exponents(&self) -> &[[u32; 2]] {
        &self.exponents
    }

    pub fn basis_coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval_values(&self, p: Point, values: &mut [f64]) {
        let n = self.n_basis();
        values.fill(0.0);
        let (xp, yp) = self.powers(p);
        for (m, &[a, b]) in self.exponents.iter().enumerate() {
            let mono = xp[a as usize] * yp[b as usize];
            let row = &self.coefficients[m * n..(m + 1) * n];
            for (v, c) in values.iter_mut().zip(row) {
                *v += c * mono;
            }
        }
    }

    /// Values and reference-coordinate gradients of every basis function at `p`.
    pub fn eval(&self, p: Point, values: &mut [f64], gradients: &mut [[f64; 2]]) {
        let n = self.n_basis();
        values.fill(0.0);
        gradients.fill([0.0; 2]);
        let (xp, yp) = self.powers(p);
        for (m, &[a, b]) in self.exponents.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let mono = xp[a] * yp[b];
            let dx = if a > 0 {
                a as f64 * xp[a - 1] * yp[b]
            } else {
                0.0
            };
            let dy = if b > 0 {
                b as f64 * xp[a] * yp[b - 1]
            } else {
                0.0
            };
            let row = &self.coefficients[m * n..(m + 1) * n];
            for ((v, g), c) in values.iter_mut().zip(gradients.iter_mut()).zip(row) {
                *v += c * mono;
                g[0] += c * dx;
                g[1] += c * dy;
            }
        }
    }

    pub fn eval_basis(&self, p: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let mut values = vec![0.0; self.n_basis()];
        let mut gradients = vec![[0.0; 2]; self.n_basis()];
        self.eval(p, &mut values, &mut gradients);
        (values, gradients)
    }

    /// Basis values and gradients at every point of `quad`.
    pub fn tabulate(&self, quad: &QuadratureRule) -> Tabulation {
        let n = self.n_basis();
        let mut values = vec![0.0; quad.len() * n];
        let mut gradients = vec![[0.0; 2]; quad.len() * n];
        for (q, &p) in quad.points().iter().enumerate() {
            self.eval(
                p,
                &mut values[q * n..(q + 1) * n],
                &mut gradients[q * n..(q + 1) * n],
            );
        }
        Tabulation {
            n_basis: n,
            values,
            gradients,
        }
    }

    fn powers(&self, [x, y]: Point) -> ([f64; MAX_DEGREE + 1], [f64; MAX_DEGREE + 1]) {
        let mut xp = [1.0; MAX_DEGREE + 1];
        let mut yp = [1.0; MAX_DEGREE + 1];
        for k in 1..=self.degree {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        (xp, yp)
    }
}

/// Basis data at the points of a quadrature rule, point-major.
#[derive(Debug, Clone)]
pub struct Tabulation {
    n_basis: usize,
    values: Vec<f64>,
    gradients: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn gradients(&self, q: usize) -> &[[f64; 2]] {
        &self.gradients[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

/// Max column sum of a row-major `n x n` matrix.
fn norm_one(m: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| m[i * n + j].abs()).sum::<f64>())
        .fold(
            0.0,
            |acc: f64, s| if s.is_nan() { f64::NAN } else { acc.max(s) },
        )
}

/// Gauss-Jordan inversion of a row-major `n x n` matrix with full pivoting.
fn invert_full_pivot(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut lu = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                let v = lu[i * n + j].abs();
                if v > best {
                    (pr, pc, best) = (i, j, v);
                }
            }
        }
        if !(best > 0.0) {
            return None;
        }
        if pr != k {
            for j in 0..n {
                lu.swap(k * n + j, pr * n + j);
                inv.swap(k * n + j, pr * n + j);
            }
        }
        if pc != k {
            for i in 0..n {
                lu.swap(i * n + k, i * n + pc);
            }
            col_perm.swap(k, pc);
        }
        let pivot = lu[k * n + k];
        for j in 0..n {
            lu[k * n + j] /= pivot;
            inv[k * n + j] /= pivot;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = lu[i * n + k];
            if factor != 0.0 {
                for j in 0..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                    inv[i * n + j] -= factor * inv[k * n + j];
                }
            }
        }
    }
    // Column swaps of A permute the rows of its inverse.
    let mut out = vec![0.0; n * n];
    for (k, &orig) in col_perm.iter().enumerate() {
        out[orig * n..(orig + 1) * n].copy_from_slice(&inv[k * n..(k + 1) * n]);
    }
    Some(out)
}
