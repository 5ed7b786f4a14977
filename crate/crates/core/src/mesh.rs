//! Structured triangulations of the unit square.
//!
//! The square is cut into `M x M` cells and each cell into a lower-left and an
//! upper-right triangle along its slope -1 diagonal. Vertices are numbered
//! row by row (`index = j * (M + 1) + i` for the point `(i / M, j / M)`), and
//! cell `(cx, cy)` owns triangles `2 * (cy * M + cx)` (lower-left) and
//! `2 * (cy * M + cx) + 1` (upper-right).

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Default upper bound on the number of subdivisions per axis.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4096;

/// Tolerance used when deciding whether a point lies in a triangle.
pub const GEOMETRY_TOLERANCE: f64 = 1e-12;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub on_boundary: bool,
}

/// Which half of a square cell a triangle occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    LowerLeft,
    UpperRight,
}

/// Direction of the cell diagonals.
///
/// [`Mesh`] always cuts cells along slope -1. A slope +1 mesh is the mirror
/// image of it under `x -> 1 - x`, so a problem on a slope +1 mesh is solved
/// by solving the mirrored problem (see `ProblemSpec::on_diagonal`) on the
/// slope -1 mesh; all norms of the error are unchanged by the reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Diagonal {
    /// Diagonals from `(x, y + H)` to `(x + H, y)`.
    #[default]
    NegativeSlope,
    /// Diagonals from `(x, y)` to `(x + H, y + H)`.
    PositiveSlope,
}

impl std::str::FromStr for Diagonal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "-1" | "negative" | "neg" => Ok(Self::NegativeSlope),
            "+1" | "1" | "positive" | "pos" => Ok(Self::PositiveSlope),
            other => Err(format!(
                "unknown diagonal direction '{other}' (use -1 or +1)"
            )),
        }
    }
}

impl std::fmt::Display for Diagonal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::NegativeSlope => "-1",
            Self::PositiveSlope => "+1",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    subdivisions: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
}

impl Mesh {
    /// Uniform triangulation of `(0,1)^2` with `m` subdivisions per axis.
    pub fn structured(m: usize) -> Result<Self> {
        Self::structured_with_cap(m, DEFAULT_MAX_SUBDIVISIONS)
    }

    pub fn structured_with_cap(m: usize, cap: usize) -> Result<Self> {
        if m == 0 || m > cap {
            return Err(Error::MeshSize { m, cap });
        }
        let n = m + 1;
        let mf = m as f64;
        let mut vertices = Vec::with_capacity(n * n);
        let mut boundary_vertex = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                vertices.push([i as f64 / mf, j as f64 / mf]);
                boundary_vertex.push(i == 0 || j == 0 || i == m || j == m);
            }
        }
        let vid = |i: usize, j: usize| j * n + i;
        let mut triangles = Vec::with_capacity(2 * m * m);
        for cy in 0..m {
            for cx in 0..m {
                triangles.push([vid(cx, cy), vid(cx + 1, cy), vid(cx, cy + 1)]);
                triangles.push([vid(cx + 1, cy), vid(cx + 1, cy + 1), vid(cx, cy + 1)]);
            }
        }
        Ok(Self {
            subdivisions: m,
            vertices,
            triangles,
            boundary_vertex,
        })
    }

    /// Uniform refinement by a factor `r` per axis.
    ///
    /// Every triangle of `self` is the union of exactly `r^2` triangles of the
    /// result, all with the same diagonal orientation, so spaces of equal
    /// degree on the two meshes are nested.
    pub fn refine_nested(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Parameter(
                "refinement factor must be at least 1".into(),
            ));
        }
        let m = self.subdivisions.checked_mul(r).ok_or(Error::MeshSize {
            m: usize::MAX,
            cap: DEFAULT_MAX_SUBDIVISIONS,
        })?;
        Self::structured(m)
    }

    /// Number of subdivisions per axis, `M`.
    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    /// Mesh size `H = 1/M`.
    pub fn h(&self) -> f64 {
        1.0 / self.subdivisions as f64
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Cell coordinates and half of triangle `t`.
    pub fn cell_of(&self, t: usize) -> (usize, usize, Half) {
        let cell = t / 2;
        let half = if t.is_multiple_of(2) {
            Half::LowerLeft
        } else {
            Half::UpperRight
        };
        (cell % self.subdivisions, cell / self.subdivisions, half)
    }

    pub fn triangle_index(&self, cx: usize, cy: usize, half: Half) -> usize {
        2 * (cy * self.subdivisions + cx) + usize::from(half == Half::UpperRight)
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_vertices(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [p0, p1, p2] = self.triangle_vertices(t);
        [(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0]
    }

    /// Unique edges, sorted by vertex pair, derived from the triangle list.
    pub fn edges(&self) -> Vec<Edge> {
        let mut pairs: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [c, a]])
            .map(|[u, v]| if u < v { [u, v] } else { [v, u] })
            .collect();
        pairs.sort_unstable();
        // An edge seen once belongs to a single triangle, i.e. lies on the boundary.
        let mut edges = Vec::with_capacity(pairs.len() / 2 + self.subdivisions * 2);
        let mut i = 0;
        while i < pairs.len() {
            let mut j = i + 1;
            while j < pairs.len() && pairs[j] == pairs[i] {
                j += 1;
            }
            edges.push(Edge {
                vertices: pairs[i],
                on_boundary: j - i == 1,
            });
            i = j;
        }
        edges
    }

    /// Triangle containing `p`, together with its barycentric-style reference
    /// coordinates. Points on shared edges resolve to the lowest-index cell.
    pub fn locate(&self, p: Point) -> Option<(usize, Point)> {
        let tol = GEOMETRY_TOLERANCE;
        if p[0] < -tol || p[0] > 1.0 + tol || p[1] < -tol || p[1] > 1.0 + tol {
            return None;
        }
        let m = self.subdivisions;
        let mf = m as f64;
        let cx = ((p[0] * mf).floor().max(0.0) as usize).min(m - 1);
        let cy = ((p[1] * mf).floor().max(0.0) as usize).min(m - 1);
        let u = p[0] * mf - cx as f64;
        let v = p[1] * mf - cy as f64;
        if u + v <= 1.0 + tol {
            Some((self.triangle_index(cx, cy, Half::LowerLeft), [u, v]))
        } else {
            // upper-right triangle: v0 = (1,0), v1 - v0 = (0,1), v2 - v0 = (-1,1)
            Some((
                self.triangle_index(cx, cy, Half::UpperRight),
                [u + v - 1.0, 1.0 - u],
            ))
        }
    }

    /// Reference coordinates of `p` with respect to triangle `t`.
    pub fn reference_coords(&self, t: usize, p: Point) -> Point {
        let (cx, cy, half) = self.cell_of(t);
        let mf = self.subdivisions as f64;
        let u = p[0] * mf - cx as f64;
        let v = p[1] * mf - cy as f64;
        match half {
            Half::LowerLeft => [u, v],
            Half::UpperRight => [u + v - 1.0, 1.0 - u],
        }
    }

    /// Plain-text dump for debugging.
    pub fn to_text(&self) -> String {
        let mut out = String::from("vertices:\n");
        for [x, y] in &self.vertices {
            let _ = writeln!(out, "{x} {y}");
        }
        out.push_str("triangles:\n");
        for [a, b, c] in &self.triangles {
            let _ = writeln!(out, "{a} {b} {c}");
        }
        out
    }
}

/// Maps reference coordinates of triangle `t` to physical coordinates.
pub fn map_to_physical(vertices: &[Point; 3], r: Point) -> Point {
    let [p0, p1, p2] = vertices;
    [
        p0[0] + r[0] * (p1[0] - p0[0]) + r[1] * (p2[0] - p0[0]),
        p0[1] + r[0] * (p1[1] - p0[1]) + r[1] * (p2[1] - p0[1]),
    ]
}
