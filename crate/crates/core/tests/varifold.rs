use approx::assert_relative_eq;
use nalgebra::DVector;
use proptest::prelude::*;
use varifrac::geometry::{shapes, SimplexId};
use varifrac::varifold::{atom_bump_family, weak_identity_residual, DiscreteVarifold};

fn circle_residual(n: usize) -> f64 {
    let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(n, 1.0).unwrap(), 2).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    weak_identity_residual(&v, &a, &b, &atom_bump_family(&v, 4))
}

#[test]
fn circle_residual_converges_at_second_order() {
    let r: Vec<f64> = [32, 64, 128].iter().map(|&n| circle_residual(n)).collect();
    for w in r.windows(2) {
        assert!(w[0] / w[1] > 3.5, "{r:?}");
    }
}

#[test]
fn refined_circle_stays_on_the_circle() {
    let c = shapes::refine(&shapes::polygon_circle(16, 2.0).unwrap()).unwrap();
    assert_eq!(c.n_vertices(), 32);
    assert!(c.vertices().iter().all(|v| (v.norm() - 2.0).abs() < 1e-14));
    let sq = shapes::rectangle(2, 2, 1.0, 1.0, shapes::Diagonals::Uniform).unwrap();
    let fine = shapes::refine(&sq).unwrap();
    assert_eq!(fine.n_simplices(2), 32);
    let area: f64 = (0..32).map(|t| fine.simplex_measure(SimplexId::new(2, t)).unwrap().value()).sum();
    assert_relative_eq!(area, 1.0, epsilon = 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn masses_add_over_disjoint_unions(n in 3usize..20, m in 3usize..20, shift in 3.0..10.0f64) {
        let a = DiscreteVarifold::unit_density(&shapes::polygon_circle(n, 1.0).unwrap(), 2).unwrap();
        let b_mesh = shapes::polygon_circle(m, 0.5).unwrap().map_vertices(|x| x + DVector::from_vec(vec![shift, 0.0])).unwrap();
        let b = DiscreteVarifold::unit_density(&b_mesh, 2).unwrap();
        let u = a.union(&b).unwrap();
        prop_assert!((u.mass() - a.mass() - b.mass()).abs() < 1e-12);
    }

    #[test]
    fn half_planes_partition_the_mass(n in 3usize..64, c in -1.5..1.5f64) {
        let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(n, 1.0).unwrap(), 3).unwrap();
        let left = v.pushforward_measure(|x| x[0] < c);
        let right = v.pushforward_measure(|x| x[0] >= c);
        prop_assert!((left + right - v.mass()).abs() < 1e-12);
        prop_assert!(left >= 0.0 && right >= 0.0);
    }

    #[test]
    fn scaling_law(s in 0.2..5.0f64, n in 8usize..40) {
        let base = shapes::arc(1.0, 2.0, n).unwrap();
        let v1 = DiscreteVarifold::unit_density(&base, 2).unwrap();
        let v2 = DiscreteVarifold::unit_density(&base.map_vertices(|x| x * s).unwrap(), 2).unwrap();
        let (a1, b1) = v1.estimate_curvature().unwrap();
        let (a2, b2) = v2.estimate_curvature().unwrap();
        prop_assert!((v2.mass() - s * v1.mass()).abs() < 1e-12 * s * v1.mass());
        for (t1, t2) in a1.tensors.iter().zip(&a2.tensors) {
            prop_assert!((t2.norm() * s - t1.norm()).abs() < 1e-9 * (1.0 + t1.norm()));
        }
        // |dV| of a curve is a count of endpoints: scale invariant
        prop_assert!((b1.total_variation() - b2.total_variation()).abs() < 1e-12);
    }

    #[test]
    fn integer_density_multiplies_mass(theta in 1u32..5, n in 3usize..20) {
        let mesh = shapes::polygon_circle(n, 1.0).unwrap();
        let one = DiscreteVarifold::unit_density(&mesh, 1).unwrap();
        let many = DiscreteVarifold::from_complex(&mesh, &vec![theta; n], 1).unwrap();
        prop_assert!((many.mass() - theta as f64 * one.mass()).abs() < 1e-12 * theta as f64);
    }
}
