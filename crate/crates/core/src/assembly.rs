//! Assembly of the diffusion form, the convection/reaction remainder and load
//! vectors, plus elimination of homogeneous Dirichlet DOFs.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Diagonal, Point};
use crate::quadrature::QuadratureRule;
use crate::space::FeSpace;
use crate::sparse::CsrMatrix;

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

/// Coefficients and data of `-div(alpha grad u) + beta . grad u + gamma u = f`
/// on the unit square with `u = 0` on the boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: MatrixField,
    pub beta: VectorField,
    pub gamma: ScalarField,
    pub f: ScalarField,
    pub exact_u: Option<ScalarField>,
    pub exact_grad_u: Option<VectorField>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("has_exact_solution", &self.exact_u.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Constant coefficients `alpha * I`, `beta`, `gamma` with source `f`.
    pub fn constant(
        alpha: f64,
        beta: [f64; 2],
        gamma: f64,
        f: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(move |_| [[alpha, 0.0], [0.0, alpha]]),
            beta: Arc::new(move |_| beta),
            gamma: Arc::new(move |_| gamma),
            f: Arc::new(f),
            exact_u: None,
            exact_grad_u: None,
        }
    }

    pub fn with_exact(
        mut self,
        u: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad_u: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        self.exact_u = Some(Arc::new(u));
        self.exact_grad_u = Some(Arc::new(grad_u));
        self
    }

    /// The problem under the reflection `x -> 1 - x`.
    ///
    /// If `u` solves `self`, then `u(1 - x, y)` solves the mirrored problem.
    pub fn mirrored_x(&self) -> Self {
        fn flip(p: Point) -> Point {
            [1.0 - p[0], p[1]]
        }
        let alpha = self.alpha.clone();
        let beta = self.beta.clone();
        let gamma = self.gamma.clone();
        let f = self.f.clone();
        Self {
            alpha: Arc::new(move |p| {
                let [[a, b], [c, d]] = alpha(flip(p));
                [[a, -b], [-c, d]]
            }),
            beta: Arc::new(move |p| {
                let [bx, by] = beta(flip(p));
                [-bx, by]
            }),
            gamma: Arc::new(move |p| gamma(flip(p))),
            f: Arc::new(move |p| f(flip(p))),
            exact_u: self
                .exact_u
                .clone()
                .map(|u| -> ScalarField { Arc::new(move |p| u(flip(p))) }),
            exact_grad_u: self.exact_grad_u.clone().map(|g| -> VectorField {
                Arc::new(move |p| {
                    let [gx, gy] = g(flip(p));
                    [-gx, gy]
                })
            }),
        }
    }

    /// The problem to hand to the solvers so that the computation is
    /// equivalent to one on a mesh with the given diagonal direction.
    pub fn on_diagonal(&self, diagonal: Diagonal) -> Self {
        match diagonal {
            Diagonal::NegativeSlope => self.clone(),
            Diagonal::PositiveSlope => self.mirrored_x(),
        }
    }

    /// Checks that the symmetric part of `alpha` has eigenvalues in
    /// `[lower, upper]` on a `samples x samples` grid of the closed square.
    pub fn check_ellipticity(&self, lower: f64, upper: f64, samples: usize) -> Result<()> {
        let samples = samples.max(2);
        for j in 0..samples {
            for i in 0..samples {
                let p = [
                    i as f64 / (samples - 1) as f64,
                    j as f64 / (samples - 1) as f64,
                ];
                let [[a, b], [c, d]] = (self.alpha)(p);
                let off = 0.5 * (b + c);
                let mean = 0.5 * (a + d);
                let radius = (0.25 * (a - d) * (a - d) + off * off).sqrt();
                let (min_eig, max_eig) = (mean - radius, mean + radius);
                if !(lower > 0.0 && min_eig >= lower && max_eig <= upper) {
                    return Err(Error::Ellipticity {
                        x: p[0],
                        y: p[1],
                        min_eig,
                        max_eig,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Quadrature exactness used for matrices when every degree involved is at
/// most `max_degree`: constant-coefficient entries are then exact.
pub fn default_quadrature_degree(max_degree: usize) -> usize {
    2 * max_degree + 3
}

pub fn default_quadrature(max_degree: usize) -> QuadratureRule {
    QuadratureRule::collapsed_gauss(default_quadrature_degree(max_degree))
        .expect("positive quadrature degree")
}

/// Assembled operators on all DOFs of a space.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `A[i][j] = a(phi_j, phi_i)`
    pub stiffness: CsrMatrix,
    /// `N[i][j] = (beta . grad phi_j + gamma phi_j, phi_i)`
    pub nonsym: CsrMatrix,
    pub load: Vec<f64>,
    pub interior_dofs: Vec<usize>,
}

/// Operators restricted to interior DOFs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub stiffness: CsrMatrix,
    pub nonsym: CsrMatrix,
    pub load: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Parts {
    stiffness: bool,
    nonsym: bool,
    mass: bool,
}

struct Cell {
    det: f64,
    /// inverse Jacobian, row-major
    inv: [[f64; 2]; 2],
    origin: Point,
    jac: [[f64; 2]; 2],
}

fn cell_geometry(space: &FeSpace, t: usize) -> Result<Cell> {
    let [p0, p1, p2] = space.mesh().triangle_vertices(t);
    let jac = [
        [p1[0] - p0[0], p2[0] - p0[0]],
        [p1[1] - p0[1], p2[1] - p0[1]],
    ];
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if !(det > 0.0) {
        return Err(Error::DegenerateElement {
            cell: t,
            area: 0.5 * det,
        });
    }
    let inv = [
        [jac[1][1] / det, -jac[0][1] / det],
        [-jac[1][0] / det, jac[0][0] / det],
    ];
    Ok(Cell {
        det,
        inv,
        origin: p0,
        jac,
    })
}

impl Cell {
    fn to_physical(&self, r: Point) -> Point {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    /// `J^{-T} g`
    fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv[0][0] * g[0] + self.inv[1][0] * g[1],
            self.inv[0][1] * g[0] + self.inv[1][1] * g[1],
        ]
    }
}

/// Sparsity pattern of operators coupling DOFs that share a triangle.
pub fn sparsity_pattern(space: &FeSpace) -> CsrMatrix {
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); space.n_dofs()];
    for t in 0..space.mesh().n_triangles() {
        let dofs = space.cell_dofs(t);
        for &i in dofs {
            columns[i].extend_from_slice(dofs);
        }
    }
    CsrMatrix::from_pattern(space.n_dofs(), columns)
}

fn assemble_matrices(
    space: &FeSpace,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
    parts: Parts,
) -> Result<[Option<CsrMatrix>; 3]> {
    let pattern = sparsity_pattern(space);
    let mut stiff = parts.stiffness.then(|| pattern.clone());
    let mut nonsym = parts.nonsym.then(|| pattern.clone());
    let mut mass = parts.mass.then(|| pattern.clone());
    let tab = space.element().tabulate(quad);
    let nb = space.element().n_basis();
    let mut grads = vec![[0.0; 2]; nb];
    let mut k_loc = vec![0.0; nb * nb];
    let mut n_loc = vec![0.0; nb * nb];
    let mut m_loc = vec![0.0; nb * nb];

    for t in 0..space.mesh().n_triangles() {
        let cell = cell_geometry(space, t)?;
        k_loc.fill(0.0);
        n_loc.fill(0.0);
        m_loc.fill(0.0);
        for (q, (&r, &w)) in quad.points().iter().zip(quad.weights()).enumerate() {
            let x = cell.to_physical(r);
            let wdet = w * cell.det;
            let phi = tab.values(q);
            for (g, &rg) in grads.iter_mut().zip(tab.gradients(q)) {
                *g = cell.push_gradient(rg);
            }
            if parts.stiffness {
                let a = (spec.alpha)(x);
                for j in 0..nb {
                    let gj = grads[j];
                    let flux = [
                        a[0][0] * gj[0] + a[0][1] * gj[1],
                        a[1][0] * gj[0] + a[1][1] * gj[1],
                    ];
                    for i in 0..nb {
                        k_loc[i * nb + j] += wdet * (flux[0] * grads[i][0] + flux[1] * grads[i][1]);
                    }
                }
            }
            if parts.nonsym {
                let b = (spec.beta)(x);
                let c = (spec.gamma)(x);
                for j in 0..nb {
                    let trial = b[0] * grads[j][0] + b[1] * grads[j][1] + c * phi[j];
                    for i in 0..nb {
                        n_loc[i * nb + j] += wdet * trial * phi[i];
                    }
                }
            }
            if parts.mass {
                for j in 0..nb {
                    for i in 0..nb {
                        m_loc[i * nb + j] += wdet * phi[j] * phi[i];
                    }
                }
            }
        }
        let dofs = space.cell_dofs(t);
        for (target, local) in [
            (&mut stiff, &k_loc),
            (&mut nonsym, &n_loc),
            (&mut mass, &m_loc),
        ] {
            if let Some(mat) = target.as_mut() {
                for (i, &gi) in dofs.iter().enumerate() {
                    for (j, &gj) in dofs.iter().enumerate() {
                        mat.add_to_entry(gi, gj, local[i * nb + j]);
                    }
                }
            }
        }
    }
    Ok([stiff, nonsym, mass])
}

/// Matrix of `a(u, v) = (alpha grad u, grad v)`.
pub fn assemble_stiffness(
    space: &FeSpace,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<CsrMatrix> {
    let parts = Parts {
        stiffness: true,
        nonsym: false,
        mass: false,
    };
    let [a, _, _] = assemble_matrices(space, spec, quad, parts)?;
    Ok(a.expect("stiffness requested"))
}

/// Matrix of the remainder `N(u, v) = (beta . grad u + gamma u, v)`.
pub fn assemble_nonsym(
    space: &FeSpace,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<CsrMatrix> {
    let parts = Parts {
        stiffness: false,
        nonsym: true,
        mass: false,
    };
    let [_, n, _] = assemble_matrices(space, spec, quad, parts)?;
    Ok(n.expect("remainder requested"))
}

pub fn assemble_mass(space: &FeSpace, quad: &QuadratureRule) -> Result<CsrMatrix> {
    let spec = ProblemSpec::constant(1.0, [0.0; 2], 0.0, |_| 0.0);
    let parts = Parts {
        stiffness: false,
        nonsym: false,
        mass: true,
    };
    let [_, _, m] = assemble_matrices(space, &spec, quad, parts)?;
    Ok(m.expect("mass requested"))
}

/// `F[i] = (g, phi_i)`
pub fn assemble_load(
    space: &FeSpace,
    g: impl Fn(Point) -> f64,
    quad: &QuadratureRule,
) -> Result<Vec<f64>> {
    let tab = space.element().tabulate(quad);
    let mut load = vec![0.0; space.n_dofs()];
    for t in 0..space.mesh().n_triangles() {
        let cell = cell_geometry(space, t)?;
        let dofs = space.cell_dofs(t);
        for (q, (&r, &w)) in quad.points().iter().zip(quad.weights()).enumerate() {
            let gw = g(cell.to_physical(r)) * w * cell.det;
            for (&d, &phi) in dofs.iter().zip(tab.values(q)) {
                load[d] += gw * phi;
            }
        }
    }
    Ok(load)
}

/// Stiffness, remainder and load on `space` in one pass over the mesh.
pub fn assemble_system(
    space: &FeSpace,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<AssembledSystem> {
    let parts = Parts {
        stiffness: true,
        nonsym: true,
        mass: false,
    };
    let [a, n, _] = assemble_matrices(space, spec, quad, parts)?;
    let f = spec.f.clone();
    let load = assemble_load(space, move |p| f(p), quad)?;
    Ok(AssembledSystem {
        stiffness: a.expect("stiffness requested"),
        nonsym: n.expect("remainder requested"),
        load,
        interior_dofs: space.interior_dofs().to_vec(),
    })
}

impl AssembledSystem {
    /// Symmetric elimination of the boundary DOFs (`u = 0` there).
    pub fn apply_dirichlet(&self) -> ReducedSystem {
        let idx = &self.interior_dofs;
        ReducedSystem {
            stiffness: self.stiffness.submatrix(idx, idx),
            nonsym: self.nonsym.submatrix(idx, idx),
            load: idx.iter().map(|&i| self.load[i]).collect(),
        }
    }
}

impl ReducedSystem {
    pub fn size(&self) -> usize {
        self.load.len()
    }

    /// The full operator `A + N`.
    pub fn full_operator(&self) -> CsrMatrix {
        self.stiffness
            .add(&self.nonsym)
            .expect("operators share the interior index set")
    }

    /// `(A + N) u`
    pub fn apply_full(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.stiffness.mul_vec(u);
        for (o, n) in out.iter_mut().zip(self.nonsym.mul_vec(u)) {
            *o += n;
        }
        out
    }
}
