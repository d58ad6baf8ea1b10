use approx::assert_relative_eq;
use nalgebra::DVector;

use super::*;
use crate::geometry::shapes::{self, Diagonals};
use crate::geometry::{SimplexId, SimplicialComplex};

fn unit_square_3d() -> SimplicialComplex {
    let p = |x: f64, y: f64| DVector::from_vec(vec![x, y, 0.0]);
    SimplicialComplex::from_triangles(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)], vec![[0, 1, 2], [0, 2, 3]])
        .unwrap()
}

fn subdivided_segment(n: usize, len: f64) -> SimplicialComplex {
    let pts = (0..=n).map(|i| DVector::from_vec(vec![len * i as f64 / n as f64, 0.0])).collect();
    shapes::polyline(pts, false).unwrap()
}

fn rim_of(disk: &SimplicialComplex) -> SimplicialComplex {
    let ids: Vec<SimplexId> = disk.boundary_faces().into_iter().map(|e| SimplexId::new(1, e)).collect();
    disk.subcomplex(&ids).unwrap()
}

#[test]
fn segment_masses_scale_with_density() {
    let s = shapes::segment(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
    for th in 1..=3 {
        let v = DiscreteVarifold::from_complex(&s, &[th], 1).unwrap();
        assert_relative_eq!(v.mass(), th as f64, epsilon = 1e-15);
    }
    assert_eq!(DiscreteVarifold::empty(1, 2).mass(), 0.0);
}

#[test]
fn first_moment_of_the_unit_square() {
    let v = DiscreteVarifold::unit_density(&unit_square_3d(), 1).unwrap();
    let m1 = crate::sum::sum(v.atoms().iter().map(|a| a.weight * a.x[0]));
    assert_relative_eq!(m1, 0.5, epsilon = 1e-14);
}

#[test]
fn quadrature_order_is_respected() {
    let v = DiscreteVarifold::unit_density(&unit_square_3d(), 4).unwrap();
    // ∫ x^2 y^2 over the unit square
    let m = crate::sum::sum(v.atoms().iter().map(|a| a.weight * a.x[0].powi(2) * a.x[1].powi(2)));
    assert_relative_eq!(m, 1.0 / 9.0, epsilon = 1e-13);
}

#[test]
fn mixed_support_is_rejected() {
    let p = |x: f64, y: f64| DVector::from_vec(vec![x, y, 0.0]);
    let c = SimplicialComplex::new(
        3,
        vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(5.0, 5.0), p(6.0, 5.0)],
        vec![vec![], vec![vec![3, 4]], vec![vec![0, 1, 2]]],
    )
    .unwrap();
    assert!(matches!(
        DiscreteVarifold::unit_density(&c, 1),
        Err(crate::Error::DimensionError(_))
    ));
}

#[test]
fn inscribed_polygon_perimeter() {
    for n in [6usize, 64, 500] {
        let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(n, 1.5).unwrap(), 1).unwrap();
        let exact = n as f64 * 3.0 * (std::f64::consts::PI / n as f64).sin();
        assert_relative_eq!(v.mass(), exact, max_relative = 1e-13);
    }
}

#[test]
fn pushforward_of_half_segment() {
    let v = DiscreteVarifold::unit_density(&subdivided_segment(10, 1.0), 1).unwrap();
    assert_relative_eq!(v.pushforward_measure(|x| x[0] < 0.5), 0.5, epsilon = 1e-14);
    assert_relative_eq!(v.pushforward_measure(|_| true), v.mass());
    assert_eq!(v.pushforward_measure(|_| false), 0.0);
}

#[test]
fn straight_segment_has_zero_curvature_and_unit_endpoints() {
    let v = DiscreteVarifold::unit_density(&subdivided_segment(7, 2.0), 2).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    assert!(a.max_norm() <= 1e-10);
    assert_eq!(b.atoms.len(), 2);
    assert_relative_eq!(b.total_variation(), 2.0, epsilon = 1e-12);
    // b = +τ at the start, -τ at the end
    let start = b.atoms.iter().find(|x| x.x[0] == 0.0).unwrap();
    assert_relative_eq!(start.b[0], 1.0, epsilon = 1e-15);
    let r = weak_identity_residual(&v, &a, &b, &linear_family(2));
    assert!(r <= 1e-10, "residual {r}");
}

#[test]
fn single_edge_is_flagged_isolated() {
    let v = DiscreteVarifold::unit_density(&shapes::segment(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1).unwrap();
    let (a, _) = v.estimate_curvature().unwrap();
    assert_eq!(a.n_isolated(), 1);
    assert_eq!(a.max_norm(), 0.0);
}

#[test]
fn polygonal_circle_curvature() {
    let r = 1.0;
    let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(256, r).unwrap(), 1).unwrap();
    let (a, _) = v.estimate_curvature().unwrap();
    for (atom, t) in v.atoms().iter().zip(&a.tensors) {
        let h = t.mean_curvature();
        assert!((h.norm() - 1.0 / r).abs() <= 0.02 / r);
        assert!((t.norm() - 2f64.sqrt() / r).abs() <= 0.03 * 2f64.sqrt() / r);
        // inward pointing
        assert!(h.dot(&atom.x) < 0.0);
    }
}

#[test]
fn icosphere_mean_curvature() {
    let r = 2.0;
    let v = DiscreteVarifold::unit_density(&shapes::icosphere(r, 3).unwrap(), 1).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    assert!(b.atoms.is_empty());
    for t in &a.tensors {
        let h = t.mean_curvature().norm();
        assert!((h - 2.0 / r).abs() <= 0.05 * 2.0 / r, "H = {h}");
    }
}

#[test]
fn flat_disk_is_flat_with_conormal_boundary() {
    let disk = shapes::disk(1.0, 3, 24).unwrap();
    let v = DiscreteVarifold::unit_density(&disk, 1).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    assert!(a.max_norm() <= 1e-10);
    let rim_length = DiscreteVarifold::unit_density(&rim_of(&disk), 1).unwrap().mass();
    assert_relative_eq!(b.total_variation(), rim_length, max_relative = 1e-12);
    for atom in &b.atoms {
        assert!(atom.b.dot(&atom.x) < 0.0, "conormal not inward");
    }
    let r = weak_identity_residual(&v, &a, &b, &linear_family(3));
    assert!(r <= 1e-10, "residual {r}");
}

#[test]
fn forcing_zero_curvature_on_a_circle_breaks_the_identity() {
    let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(128, 1.0).unwrap(), 1).unwrap();
    let (_, b) = v.estimate_curvature().unwrap();
    let zero = CurvatureField::zeros(&v);
    let centers = [DVector::from_vec(vec![1.0, 0.0])];
    let family: Vec<_> = bump_family(2, &centers, 0.8).into_iter().take(3).collect();
    assert!(weak_identity_residual(&v, &zero, &b, &family) >= 0.1);
}

#[test]
fn circle_residual_is_small() {
    let v = DiscreteVarifold::unit_density(&shapes::polygon_circle(128, 1.0).unwrap(), 2).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    let centers = [DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, -1.0])];
    let r = weak_identity_residual(&v, &a, &b, &bump_family(2, &centers, 0.8));
    assert!(r < 5e-3, "residual {r}");
}

#[test]
fn scale_covariance() {
    let base = shapes::icosphere(1.0, 2).unwrap();
    let lam = 2.0;
    let big = base.map_vertices(|x| x * lam).unwrap();
    let v1 = DiscreteVarifold::unit_density(&base, 1).unwrap();
    let v2 = DiscreteVarifold::unit_density(&big, 1).unwrap();
    assert_relative_eq!(v2.mass(), lam * lam * v1.mass(), max_relative = 1e-12);
    let (a1, _) = v1.estimate_curvature().unwrap();
    let (a2, _) = v2.estimate_curvature().unwrap();
    for (t1, t2) in a1.tensors.iter().zip(&a2.tensors) {
        assert_relative_eq!(t2.norm(), t1.norm() / lam, max_relative = 1e-10);
    }
    let p = 3.0;
    assert_relative_eq!(
        a2.integral_norm_pow(&v2, p),
        lam.powf(2.0 - p) * a1.integral_norm_pow(&v1, p),
        max_relative = 1e-8
    );
}

#[test]
fn disk_with_rim_is_stratified() {
    let disk = shapes::disk(1.0, 4, 32).unwrap();
    let rim = rim_of(&disk);
    let mut fam = StratifiedFamily::new(3);
    fam.insert(Stratum::new(DiscreteVarifold::unit_density(&disk, 1).unwrap(), 2.0).unwrap()).unwrap();
    fam.insert(Stratum::new(DiscreteVarifold::unit_density(&rim, 1).unwrap(), 2.0).unwrap()).unwrap();
    assert!(fam.check(1e-9).stratified);

    let mut halved = fam.clone();
    let s1 = halved.strata.get_mut(&1).unwrap();
    s1.varifold = s1.varifold.scale_weights(0.5);
    assert!(!halved.check(1e-6).stratified);

    let mut missing = fam.clone();
    missing.strata.remove(&1);
    let report = missing.check(1e-6);
    assert!(!report.stratified);
    assert!(report.checks[0].lower_stratum_missing);
}

#[test]
fn dominance_examples() {
    let long = DiscreteVarifold::unit_density(&subdivided_segment(8, 1.0), 1).unwrap();
    let short = DiscreteVarifold::unit_density(&subdivided_segment(4, 0.5), 1).unwrap();
    assert!(dominates(&long, &long, 0.25, 1e-12));
    assert!(dominates(&DiscreteVarifold::empty(1, 2), &long, 0.25, 0.0));
    assert!(!dominates(&long, &short, 0.25, 1e-9));
    assert!(dominates(&short, &long, 0.25, 1e-9));
}

#[test]
fn union_adds_mass() {
    let a = DiscreteVarifold::unit_density(&shapes::polygon_circle(10, 1.0).unwrap(), 1).unwrap();
    let b = DiscreteVarifold::unit_density(&subdivided_segment(3, 4.0), 1).unwrap();
    assert_relative_eq!(a.union(&b).unwrap().mass(), a.mass() + b.mass(), epsilon = 1e-14);
}

#[test]
fn dump_round_trip() {
    let v = DiscreteVarifold::unit_density(&shapes::arc(1.0, 1.0, 6).unwrap(), 1).unwrap();
    let (a, b) = v.estimate_curvature().unwrap();
    let text = serde_json::to_string(&VarifoldDump::new(&v, Some(&a), Some(&b))).unwrap();
    assert!(text.contains("\"pi\"") && text.contains("\"dV\"") && text.contains("\"A\""));
    let back: VarifoldDump = serde_json::from_str(&text).unwrap();
    let v2 = back.to_varifold().unwrap();
    assert_relative_eq!(v2.mass(), v.mass(), epsilon = 1e-14);
    let a2 = back.curvature().unwrap().unwrap();
    let b2 = back.boundary().unwrap().unwrap();
    assert_eq!(a2.tensors, a.tensors);
    assert_relative_eq!(b2.total_variation(), b.total_variation(), epsilon = 1e-14);
}

#[test]
fn rectangle_meshes_are_not_varifold_supports() {
    // a full-dimensional complex carries no tangent planes
    let m = shapes::rectangle(2, 2, 1.0, 1.0, Diagonals::Uniform).unwrap();
    assert!(DiscreteVarifold::unit_density(&m, 1).is_err());
}

