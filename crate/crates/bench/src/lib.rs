//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use twolevel_core::{FeSpace, Mesh};

/// Coarse and fine spaces of the two-level method on one `m x m` mesh.
pub fn two_level_spaces(m: usize, l: usize, s: usize) -> (FeSpace, FeSpace) {
    let mesh = Arc::new(Mesh::structured(m).expect("valid mesh size"));
    (
        FeSpace::new(mesh.clone(), l).expect("valid degree"),
        FeSpace::new(mesh, s).expect("valid degree"),
    )
}

/// Coarse and fine spaces of the two-grid method, the fine mesh refined `r` times.
pub fn two_grid_spaces(m: usize, l: usize, r: usize) -> (FeSpace, FeSpace) {
    let mesh = Arc::new(Mesh::structured(m).expect("valid mesh size"));
    let fine = Arc::new(mesh.refine_nested(r).expect("valid refinement"));
    (
        FeSpace::new(mesh, l).expect("valid degree"),
        FeSpace::new(fine, l).expect("valid degree"),
    )
}
