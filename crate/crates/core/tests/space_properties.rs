use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use twolevel_core::{dof_count, FeSpace, Mesh, Prolongation};

fn space(m: usize, l: usize) -> FeSpace {
    FeSpace::new(Arc::new(Mesh::structured(m).unwrap()), l).unwrap()
}

/// A polynomial of total degree `d` with fixed, generic coefficients.
fn poly(d: usize) -> impl Fn([f64; 2]) -> f64 + Copy {
    move |[x, y]: [f64; 2]| {
        let mut v = 0.3;
        for i in 0..=d {
            for j in 0..=(d - i) {
                v += (1.0 + (3 * i + j) as f64 * 0.17).sin() * x.powi(i as i32) * y.powi(j as i32);
            }
        }
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dof_count_matches_enumeration(m in 1usize..=12, l in 1usize..=6) {
        let s = space(m, l);
        prop_assert_eq!(s.n_dofs(), dof_count(m, l).unwrap());
        let mut seen = HashSet::new();
        for t in 0..s.mesh().n_triangles() {
            seen.extend(s.cell_dofs(t).iter().copied());
        }
        prop_assert_eq!(seen.len(), s.n_dofs());
        let coords: HashSet<(i64, i64)> = s
            .dof_coordinates()
            .iter()
            .map(|p| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64))
            .collect();
        prop_assert_eq!(coords.len(), s.n_dofs());
        prop_assert_eq!(s.boundary_dofs().len(), 4 * l * m);
        prop_assert_eq!(s.interior_dofs().len(), (l * m - 1) * (l * m - 1));
    }

    #[test]
    fn global_functions_are_continuous(m in 1usize..=5, l in 1usize..=6, seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let s = space(m, l);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let c: Vec<f64> = (0..s.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mesh = s.mesh();
        for edge in mesh.edges().iter().filter(|e| !e.on_boundary) {
            let [a, b] = edge.vertices.map(|v| mesh.vertices()[v]);
            let sharing: Vec<usize> = (0..mesh.n_triangles())
                .filter(|&t| mesh.triangles()[t].contains(&edge.vertices[0]) && mesh.triangles()[t].contains(&edge.vertices[1]))
                .collect();
            prop_assert_eq!(sharing.len(), 2);
            for q in [0.13, 0.5, 0.77] {
                let p = [a[0] + q * (b[0] - a[0]), a[1] + q * (b[1] - a[1])];
                let values: Vec<f64> = sharing.iter().map(|&t| {
                    let r = mesh.reference_coords(t, p);
                    let (phi, _) = s.element().eval_basis(r);
                    s.cell_dofs(t).iter().zip(&phi).map(|(&d, v)| c[d] * v).sum()
                }).collect();
                prop_assert!((values[0] - values[1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prolongation_is_exact_between_degrees(m in 1usize..=4, l in 1usize..=5, extra in 1usize..=3) {
        let s = (l + extra).min(6);
        prop_assume!(s > l);
        let (coarse, fine) = (space(m, l), space(m, s));
        let p = Prolongation::new(&coarse, &fine).unwrap();
        let g = poly(l);
        let embedded = p.apply(&coarse.interpolate(g));
        let direct = fine.interpolate(g);
        for (a, b) in embedded.iter().zip(&direct) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn prolongation_is_exact_between_meshes(m in 1usize..=3, r in 2usize..=3, l in 1usize..=4) {
        let mesh = Arc::new(Mesh::structured(m).unwrap());
        let coarse = FeSpace::new(mesh.clone(), l).unwrap();
        let fine = FeSpace::new(Arc::new(mesh.refine_nested(r).unwrap()), l).unwrap();
        let p = Prolongation::new(&coarse, &fine).unwrap();
        let g = poly(l);
        let embedded = p.apply(&coarse.interpolate(g));
        let direct = fine.interpolate(g);
        for (a, b) in embedded.iter().zip(&direct) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        // The embedding of a discrete function evaluates identically.
        let c = coarse.interpolate(poly(l + 1));
        let pc = p.apply(&c);
        for point in [[0.31, 0.42], [0.9, 0.05], [0.5, 0.5]] {
            prop_assert!((coarse.evaluate(&c, point).unwrap() - fine.evaluate(&pc, point).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn incompatible_spaces_are_rejected() {
    assert!(Prolongation::new(&space(2, 3), &space(2, 2)).is_err());
    assert!(Prolongation::new(&space(2, 2), &space(3, 2)).is_err());
}

#[test]
fn dof_counts_for_degrees_three_to_six() {
    let expected = [
        (9, [784, 1369, 2116, 3025]),
        (10, [961, 1681, 2601, 3721]),
        (11, [1156, 2025, 3136, 4489]),
        (12, [1369, 2401, 3721, 5329]),
    ];
    for (m, counts) in expected {
        for (l, n) in (3..=6).zip(counts) {
            assert_eq!(dof_count(m, l).unwrap(), n);
        }
    }
    assert_eq!(dof_count(121, 3).unwrap(), 132496);
    assert_eq!(dof_count(1, 1).unwrap(), 4);
}
