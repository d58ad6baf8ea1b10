use approx::assert_relative_eq;
use nalgebra::{DMatrix, Rotation2, Rotation3, Vector3};
use proptest::prelude::*;
use varifrac::energy::{
    bulk_energy, hypothesis_check, sample_states, varifold_energy, BulkEnergyDensity, EnergyCoefficients,
    GrowthViolator, HypothesisConfig, NeoHookean, OrientationViolator,
};
use varifrac::geometry::shapes;
use varifrac::varifold::{DiscreteVarifold, StratifiedFamily, Stratum};


fn arc_family(n: usize) -> StratifiedFamily {
    let v = DiscreteVarifold::unit_density(&shapes::arc(1.0, 1.5, n).unwrap(), 1).unwrap();
    let mut fam = StratifiedFamily::new(2);
    fam.insert(Stratum::new(v, 2.0).unwrap()).unwrap();
    fam
}

#[test]
fn arc_energy_terms() {
    // radius-one arc: |A| = sqrt(2) away from the ends, length 1.5, two endpoints
    let fam = arc_family(120);
    let c = EnergyCoefficients::uniform(2, 1.0, 1.0, 2.0, 1.0);
    let e = varifold_energy(&fam, &c).unwrap();
    assert_relative_eq!(e.surface[0], 1.5, max_relative = 1e-3);
    assert_relative_eq!(e.corner, 2.0, epsilon = 1e-12);
    assert_relative_eq!(e.curvature[0], 2.0 * 1.5, max_relative = 0.05);
    assert_relative_eq!(e.total, e.curvature[0] + e.surface[0] + e.corner, epsilon = 1e-14);
}

#[test]
fn shipped_density_passes_the_hypotheses() {
    for d in [2, 3] {
        let nh = NeoHookean::from_lame(d, 1.0, 1.5).unwrap();
        let samples = sample_states(d, 2000, 5.0, 3);
        let rep = hypothesis_check(&nh, &samples, &HypothesisConfig { c1: nh.growth_constant(), ..Default::default() });
        assert!(rep.all_passed(), "{rep:?}");
    }
}

#[test]
fn violators_fail_their_hypothesis() {
    let nh = NeoHookean::from_lame(3, 1.0, 1.5).unwrap();
    let samples = sample_states(3, 2000, 5.0, 4);
    let cfg = HypothesisConfig { c1: nh.growth_constant(), ..Default::default() };
    let g = GrowthViolator { inner: nh.clone(), factor: 1.0, r: 2.5 };
    let rep = hypothesis_check(&g, &samples, &cfg);
    assert!(!rep.h3.passed && rep.h4.passed);
    let o = OrientationViolator { inner: nh };
    let rep = hypothesis_check(&o, &samples, &cfg);
    assert!(!rep.h4.passed && rep.h4.worst > 0.0);
}

#[test]
fn bulk_energy_of_a_uniform_stretch() {
    let m = shapes::rectangle(3, 3, 2.0, 1.0, shapes::Diagonals::Alternating).unwrap();
    let u = varifrac::currents::DeformationField::from_fn(m, |x| x * 1.1).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 1.0).unwrap();
    let f = DMatrix::identity(2, 2) * 1.1;
    assert_relative_eq!(bulk_energy(&u, &nh), 2.0 * nh.stored(&f), max_relative = 1e-13);
    let flipped = u.clone();
    let inv = varifrac::currents::DeformationField::new(
        flipped.mesh().clone(),
        flipped.values().iter().map(|x| nalgebra::DVector::from_vec(vec![x[0], -x[1]])).collect(),
    )
    .unwrap();
    assert_eq!(bulk_energy(&inv, &nh), f64::INFINITY);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stored_energy_is_frame_indifferent(a in -3.0..3.0f64, b in -3.0..3.0f64, parts in prop::array::uniform9(-0.4..0.4f64)) {
        let nh = NeoHookean::from_lame(3, 1.0, 2.0).unwrap();
        let f = DMatrix::identity(3, 3) + DMatrix::from_row_slice(3, 3, &parts);
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), a) * Rotation3::from_axis_angle(&Vector3::x_axis(), b);
        let rm = DMatrix::from_fn(3, 3, |i, j| r.matrix()[(i, j)]);
        let (e0, e1) = (nh.stored(&f), nh.stored(&(&rm * &f)));
        prop_assert!((e0 - e1).abs() <= 1e-12 * (1.0 + e0.abs()) || (!e0.is_finite() && !e1.is_finite()));
    }

    #[test]
    fn crack_energy_grows_with_its_coefficients(alpha in 0.0..2.0f64, beta in 0.01..2.0f64, gamma in 0.0..2.0f64, bump in 0.01..1.0f64) {
        let fam = arc_family(24);
        let base = varifold_energy(&fam, &EnergyCoefficients::uniform(2, alpha, beta, 2.0, gamma)).unwrap().total;
        for c in [
            EnergyCoefficients::uniform(2, alpha + bump, beta, 2.0, gamma),
            EnergyCoefficients::uniform(2, alpha, beta + bump, 2.0, gamma),
            EnergyCoefficients::uniform(2, alpha, beta, 2.0, gamma + bump),
        ] {
            prop_assert!(varifold_energy(&fam, &c).unwrap().total > base);
        }
    }

    #[test]
    fn two_dimensional_rotations_leave_the_density_unchanged(t in 0.0..6.3f64, s in 0.5..2.0f64) {
        let nh = NeoHookean::from_lame(2, 0.7, 1.3).unwrap();
        let f = DMatrix::from_row_slice(2, 2, &[s, 0.2, 0.0, 1.0 / s]);
        let r = Rotation2::new(t);
        let rm = DMatrix::from_fn(2, 2, |i, j| r.matrix()[(i, j)]);
        prop_assert!((nh.stored(&f) - nh.stored(&(rm * &f))).abs() < 1e-12);
    }
}
