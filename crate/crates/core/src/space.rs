//! Conforming Lagrange spaces on structured meshes and the embeddings between them.
//!
//! Global DOFs are the points of the lattice with spacing `1 / (l M)`,
//! numbered row by row: the point `(I, J) / (l M)` has index `J (l M + 1) + I`.
//! Neighbouring triangles therefore share edge DOFs by construction.

use std::sync::Arc;

use crate::element::{ReferenceElement, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::mesh::{Half, Mesh, Point, GEOMETRY_TOLERANCE};
use crate::sparse::CsrMatrix;

/// `(l M + 1)^2`, boundary DOFs included.
pub fn dof_count(m: usize, degree: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::MeshSize {
            m,
            cap: crate::mesh::DEFAULT_MAX_SUBDIVISIONS,
        });
    }
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::Degree(degree));
    }
    let side = degree * m + 1;
    Ok(side * side)
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    element: &'static ReferenceElement,
    dof_coordinates: Vec<Point>,
    cell_dofs: Vec<usize>,
    boundary_dofs: Vec<usize>,
    interior_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        let element = ReferenceElement::cached(degree)?;
        let m = mesh.subdivisions();
        let n = degree * m;
        let side = n + 1;
        let nf = n as f64;

        let mut dof_coordinates = Vec::with_capacity(side * side);
        let mut boundary_dofs = Vec::with_capacity(4 * n);
        let mut interior_dofs = Vec::with_capacity(side * side);
        for j in 0..side {
            for i in 0..side {
                let idx = j * side + i;
                dof_coordinates.push([i as f64 / nf, j as f64 / nf]);
                if i == 0 || j == 0 || i == n || j == n {
                    boundary_dofs.push(idx);
                } else {
                    interior_dofs.push(idx);
                }
            }
        }

        let nb = element.n_basis();
        let mut cell_dofs = Vec::with_capacity(mesh.n_triangles() * nb);
        for t in 0..mesh.n_triangles() {
            let (cx, cy, half) = mesh.cell_of(t);
            for &[i, j] in element.node_lattice() {
                let (gi, gj) = match half {
                    Half::LowerLeft => (degree * cx + i, degree * cy + j),
                    Half::UpperRight => (degree * (cx + 1) - j, degree * cy + i + j),
                };
                cell_dofs.push(gj * side + gi);
            }
        }

        Ok(Self {
            mesh,
            element,
            dof_coordinates,
            cell_dofs,
            boundary_dofs,
            interior_dofs,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn shared_mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn element(&self) -> &'static ReferenceElement {
        self.element
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coordinates.len()
    }

    pub fn dof_coordinates(&self) -> &[Point] {
        &self.dof_coordinates
    }

    /// Global DOFs of triangle `t`, in reference-node order.
    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        let nb = self.element.n_basis();
        &self.cell_dofs[t * nb..(t + 1) * nb]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior_dofs
    }

    /// Lagrange interpolant of `g`: its values at the DOF coordinates.
    pub fn interpolate(&self, g: impl Fn(Point) -> f64) -> Vec<f64> {
        self.dof_coordinates.iter().map(|&p| g(p)).collect()
    }

    /// Value of the finite element function with coefficients `coeffs` at `p`.
    pub fn evaluate(&self, coeffs: &[f64], p: Point) -> Option<f64> {
        let (t, r) = self.mesh.locate(p)?;
        let mut values = vec![0.0; self.element.n_basis()];
        self.element.eval_values(r, &mut values);
        Some(
            self.cell_dofs(t)
                .iter()
                .zip(&values)
                .map(|(&d, v)| coeffs[d] * v)
                .sum(),
        )
    }

    /// Zero-extends a vector on the interior DOFs to all DOFs.
    pub fn extend_interior(&self, interior: &[f64]) -> Vec<f64> {
        assert_eq!(interior.len(), self.interior_dofs.len());
        let mut full = vec![0.0; self.n_dofs()];
        for (&d, &v) in self.interior_dofs.iter().zip(interior) {
            full[d] = v;
        }
        full
    }

    pub fn restrict_interior(&self, full: &[f64]) -> Vec<f64> {
        self.interior_dofs.iter().map(|&d| full[d]).collect()
    }
}

/// Exact embedding of a coarser space into a finer one.
///
/// `matrix[j][i]` is the value of source basis function `i` at target node `j`.
#[derive(Debug, Clone)]
pub struct Prolongation {
    source_degree: usize,
    target_degree: usize,
    source_subdivisions: usize,
    target_subdivisions: usize,
    matrix: CsrMatrix,
    interior: CsrMatrix,
}

const DROP_TOLERANCE: f64 = 1e-13;

impl Prolongation {
    /// Builds the embedding `source -> target`.
    ///
    /// Valid when the target mesh is a nested refinement of the source mesh
    /// (including the identity) and the target degree is at least the
    /// source degree.
    pub fn new(source: &FeSpace, target: &FeSpace) -> Result<Self> {
        let ms = source.mesh().subdivisions();
        let mt = target.mesh().subdivisions();
        if !mt.is_multiple_of(ms) {
            return Err(Error::IncompatibleSpaces(format!(
                "target mesh M={mt} is not a refinement of source mesh M={ms}"
            )));
        }
        if source.degree() > target.degree() {
            return Err(Error::IncompatibleSpaces(format!(
                "source degree {} exceeds target degree {}",
                source.degree(),
                target.degree()
            )));
        }

        let elem = source.element();
        let mut values = vec![0.0; elem.n_basis()];
        let mut visited = vec![false; target.n_dofs()];
        let mut entries = Vec::new();
        for t in 0..target.mesh().n_triangles() {
            let (st, _) = source
                .mesh()
                .locate(target.mesh().centroid(t))
                .expect("centroid inside the unit square");
            let src_dofs = source.cell_dofs(st);
            for &d in target.cell_dofs(t) {
                if visited[d] {
                    continue;
                }
                visited[d] = true;
                let r = source
                    .mesh()
                    .reference_coords(st, target.dof_coordinates()[d]);
                let tol = GEOMETRY_TOLERANCE;
                debug_assert!(r[0] >= -tol && r[1] >= -tol && r[0] + r[1] <= 1.0 + tol);
                elem.eval_values(r, &mut values);
                for (&s, &v) in src_dofs.iter().zip(&values) {
                    if v.abs() > DROP_TOLERANCE {
                        entries.push((d, s, v));
                    }
                }
            }
        }
        let matrix = CsrMatrix::from_triplets(target.n_dofs(), source.n_dofs(), entries);
        let interior = matrix.submatrix(target.interior_dofs(), source.interior_dofs());
        Ok(Self {
            source_degree: source.degree(),
            target_degree: target.degree(),
            source_subdivisions: ms,
            target_subdivisions: mt,
            matrix,
            interior,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Restriction to interior DOFs of both spaces.
    pub fn interior(&self) -> &CsrMatrix {
        &self.interior
    }

    pub fn source_degree(&self) -> usize {
        self.source_degree
    }

    pub fn target_degree(&self) -> usize {
        self.target_degree
    }

    pub fn source_subdivisions(&self) -> usize {
        self.source_subdivisions
    }

    pub fn target_subdivisions(&self) -> usize {
        self.target_subdivisions
    }

    pub fn apply(&self, coarse: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(coarse)
    }

    pub fn apply_transpose(&self, fine: &[f64]) -> Vec<f64> {
        self.matrix.tr_mul_vec(fine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(m: usize, l: usize) -> FeSpace {
        FeSpace::new(Arc::new(Mesh::structured(m).unwrap()), l).unwrap()
    }

    #[test]
    fn dof_counts_match_closed_form() {
        assert_eq!(space(9, 3).n_dofs(), 784);
        assert_eq!(space(12, 6).n_dofs(), 5329);
        assert_eq!(dof_count(9, 4).unwrap(), 1369);
        assert_eq!(dof_count(81, 3).unwrap(), 59536);
        assert_eq!(dof_count(10, 5).unwrap(), 2601);
        assert!(dof_count(0, 3).is_err());
        assert!(dof_count(3, 7).is_err());
    }

    #[test]
    fn unit_cell_is_all_boundary() {
        let s = space(1, 1);
        assert_eq!(s.n_dofs(), 4);
        assert_eq!(s.boundary_dofs().len(), 4);
        assert!(s.interior_dofs().is_empty());
    }

    #[test]
    fn boundary_count() {
        for (m, l) in [(3, 2), (9, 3), (4, 6)] {
            assert_eq!(space(m, l).boundary_dofs().len(), 4 * l * m);
        }
    }

    #[test]
    fn cell_dofs_sit_on_mapped_nodes() {
        let s = space(3, 4);
        for t in 0..s.mesh().n_triangles() {
            let verts = s.mesh().triangle_vertices(t);
            for (&d, &r) in s.cell_dofs(t).iter().zip(s.element().nodes()) {
                let p = crate::mesh::map_to_physical(&verts, r);
                let q = s.dof_coordinates()[d];
                assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interpolation_of_zero_and_linear() {
        let s = space(4, 3);
        assert!(s.interpolate(|_| 0.0).iter().all(|&v| v == 0.0));
        let c = s.interpolate(|[x, y]| x + y);
        for p in [[0.13, 0.71], [0.5, 0.25], [0.99, 0.01]] {
            assert!((s.evaluate(&c, p).unwrap() - (p[0] + p[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_six_reproduces_example_two_solution() {
        let s = space(9, 6);
        let g = |[x, y]: Point| x * (1.0 - x).powi(2) * y * (1.0 - y).powi(2);
        let c = s.interpolate(g);
        for k in 0..50 {
            let p = [
                (k as f64 * 0.137).fract(),
                (k as f64 * 0.291 + 0.05).fract(),
            ];
            assert!((s.evaluate(&c, p).unwrap() - g(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_prolongation() {
        let s = space(3, 2);
        let p = Prolongation::new(&s, &s).unwrap();
        assert_eq!(
            p.matrix()
                .max_abs_diff(&CsrMatrix::identity(s.n_dofs()))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn degree_embedding_interpolates_cubic() {
        let coarse = space(9, 3);
        let fine = FeSpace::new(coarse.shared_mesh().clone(), 6).unwrap();
        let p = Prolongation::new(&coarse, &fine).unwrap();
        let g = |[x, _]: Point| x * x * x;
        let lifted = p.apply(&coarse.interpolate(g));
        let direct = fine.interpolate(g);
        let err = lifted
            .iter()
            .zip(&direct)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn mesh_embedding_interpolates_quadratic() {
        let coarse = space(9, 3);
        let fine = FeSpace::new(Arc::new(coarse.mesh().refine_nested(9).unwrap()), 3).unwrap();
        let p = Prolongation::new(&coarse, &fine).unwrap();
        let g = |[x, y]: Point| x * x * y;
        let lifted = p.apply(&coarse.interpolate(g));
        let direct = fine.interpolate(g);
        let err = lifted
            .iter()
            .zip(&direct)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
        let nb = coarse.element().n_basis();
        for i in 0..fine.n_dofs() {
            assert!(p.matrix().row(i).0.len() <= nb);
        }
    }

    #[test]
    fn incompatible_pairs_rejected() {
        let a = space(3, 3);
        let b = space(4, 3);
        let c = space(3, 2);
        assert!(matches!(
            Prolongation::new(&a, &b),
            Err(Error::IncompatibleSpaces(_))
        ));
        assert!(matches!(
            Prolongation::new(&a, &c),
            Err(Error::IncompatibleSpaces(_))
        ));
    }

    #[test]
    fn constants_map_to_constants() {
        let coarse = space(2, 2);
        let fine = FeSpace::new(Arc::new(coarse.mesh().refine_nested(3).unwrap()), 5).unwrap();
        let p = Prolongation::new(&coarse, &fine).unwrap();
        let ones = p.apply(&vec![1.0; coarse.n_dofs()]);
        assert!(ones.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
