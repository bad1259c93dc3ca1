use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use hypiso::ball::MobiusMap;
use hypiso::families::{
    catenoid, flat_disk, geodesic_cap, mobius_image, spherical_cap, union, Submanifold,
};
use hypiso::measure::{euclidean_volume, monotonicity_curve};
use hypiso::verify::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn z_axis() -> DVector<f64> {
    DVector::from_vec(vec![0.0, 0.0, 1.0])
}

fn cap(theta: f64) -> Submanifold {
    geodesic_cap(2, 3, theta, z_axis()).unwrap()
}

fn two_disks() -> Submanifold {
    let a = flat_disk(2, 3, None).unwrap();
    let b = flat_disk(
        2,
        3,
        Some(DVector::from_vec(vec![1.0, 0.0, 1.0]).normalize()),
    )
    .unwrap();
    union(&[a, b]).unwrap()
}

#[test]
fn linear_inequality_on_cap_disk_and_catenoid() {
    let v = check_linear_isoperimetric(&cap(FRAC_PI_6)).unwrap();
    assert!((v.lhs - PI / 3.0).abs() < 1e-9 && (v.rhs - PI / 2.0).abs() < 1e-9);
    assert!(v.pass && (v.slack - PI / 6.0).abs() < 1e-9);

    let v = check_linear_isoperimetric(&flat_disk(2, 3, None).unwrap()).unwrap();
    assert!(v.pass && v.slack.abs() < 1e-10);

    let v = check_linear_isoperimetric(&catenoid(0.5, 3).unwrap()).unwrap();
    assert!(v.pass && v.slack > 0.05, "{v:?}");
}

#[test]
fn linear_slack_decreases_to_zero_along_caps() {
    // absolute slack π s(1-s)/(1+s), s = sin θ, vanishes at both ends;
    // the relative slack (1-s)/(1+s) is the monotone one
    let verdicts: Vec<InequalityVerdict> = (1..=20)
        .map(|i| check_linear_isoperimetric(&cap(FRAC_PI_2 * i as f64 / 20.0)).unwrap())
        .collect();
    for (i, v) in verdicts.iter().enumerate() {
        let s = (FRAC_PI_2 * (i + 1) as f64 / 20.0).sin();
        assert!((v.slack - PI * s * (1.0 - s) / (1.0 + s)).abs() < 1e-9);
    }
    let relative: Vec<f64> = verdicts.iter().map(|v| v.slack / v.rhs).collect();
    assert!(relative.windows(2).all(|w| w[0] > w[1]), "{relative:?}");
    assert!(verdicts[19].slack.abs() < 1e-8);
}

#[test]
fn classical_inequality_cases() {
    let v = check_classical_isoperimetric(&flat_disk(2, 3, None).unwrap()).unwrap();
    assert!(v.pass && !v.not_applicable);
    assert!((v.lhs - 4.0 * PI * PI).abs() < 1e-8 && (v.rhs - 4.0 * PI * PI).abs() < 1e-8);

    // the cap's boundary circle is shorter than a great circle
    let v = check_classical_isoperimetric(&cap(FRAC_PI_6)).unwrap();
    assert!(v.not_applicable && v.acceptable());

    // an image through the origin is again a flat disk
    let disk = flat_disk(2, 3, None).unwrap();
    let rotated = mobius_image(
        &disk,
        &MobiusMap::translate(DVector::from_vec(vec![0.4, -0.3, 0.0])).unwrap(),
    )
    .unwrap();
    assert!(rotated.contains_origin);
    let v = check_classical_isoperimetric(&rotated).unwrap();
    assert!(v.pass && !v.not_applicable, "{v:?}");
}

#[test]
fn reverse_inequality_on_caps() {
    let v = check_reverse_totally_geodesic(&cap(FRAC_PI_6)).unwrap();
    // 2² ω₂ (π/3) = 4π²/3 against π²
    assert!((v.lhs - 4.0 * PI * PI / 3.0).abs() < 1e-8 && (v.rhs - PI * PI).abs() < 1e-8);
    assert!(v.pass);
    let v = check_reverse_totally_geodesic(&cap(FRAC_PI_2)).unwrap();
    assert!(v.pass && v.slack.abs() < 1e-8);
    assert!(check_reverse_totally_geodesic(&catenoid(0.5, 3).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn reverse_inequality_on_random_caps(theta in 1e-2f64..FRAC_PI_2, k3 in any::<bool>()) {
        let (k, n) = if k3 { (3, 4) } else { (2, 3) };
        let axis = DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 });
        let sigma = geodesic_cap(k, n, theta, axis).unwrap();
        prop_assert!(check_reverse_totally_geodesic(&sigma).unwrap().pass);
        prop_assert!(check_linear_isoperimetric(&sigma).unwrap().pass);
    }

    #[test]
    fn rotations_leave_volume_unchanged(entries in prop::collection::vec(-1.0f64..1.0, 9)) {
        let m = DMatrix::from_vec(3, 3, entries);
        prop_assume!(m.determinant().abs() > 1e-2);
        let q = MobiusMap::rotation_only(m.qr().q()).unwrap();
        let sigma = cap(FRAC_PI_4);
        let a = euclidean_volume(&sigma, 1.0).unwrap().vol_euclidean;
        let b = euclidean_volume(&mobius_image(&sigma, &q).unwrap(), 1.0).unwrap().vol_euclidean;
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn monotonicity_verdicts() {
    let curve = monotonicity_curve(&flat_disk(2, 3, None).unwrap(), 30).unwrap();
    assert!(check_monotonicity(&curve).pass);
    let mut corrupted = curve.clone();
    corrupted.ratios[20] -= 1e-3;
    let v = check_monotonicity(&corrupted);
    assert!(!v.pass && v.notes.contains("largest decrease"));
    assert!((v.lhs - 1e-3).abs() < 1e-9);
    let curve = monotonicity_curve(&cap(FRAC_PI_4), 30).unwrap();
    assert!(check_monotonicity(&curve).pass);
}

#[test]
fn volume_lower_bound_cases() {
    let v = check_volume_lower_bound(&flat_disk(2, 3, None).unwrap()).unwrap();
    assert!(v.pass && v.slack.abs() < 1e-10);
    let v = check_volume_lower_bound(&two_disks()).unwrap();
    assert!(v.pass && (v.rhs - 2.0 * PI).abs() < 1e-9);
    let v = check_volume_lower_bound(&cap(FRAC_PI_4)).unwrap();
    assert!(v.not_applicable);
}

#[test]
fn laplacian_equality_on_disk() {
    let report = check_laplacian_lemma(&flat_disk(2, 3, None).unwrap(), 60, 3).unwrap();
    assert!(report.passed());
    assert_eq!(report.unit_gradient_samples, 60);
    assert!(report.max_equality_residual < 1e-5);
}

#[test]
fn laplacian_strict_near_cap_pole() {
    let sigma = cap(FRAC_PI_4);
    // polar chart about the pole: α = 0.05 is a few degrees off it
    let s = laplacian_sample(&sigma, 0, &[0.05, 1.0]).unwrap();
    assert!(s.grad_rho < 0.5, "{}", s.grad_rho);
    // the gap predicted from Δρ = coth ρ (k - |∇ρ|²) with k = 2
    let c = s.rho.cosh();
    let predicted = 2.0 * (c - 1.0) * (1.0 - s.grad_rho * s.grad_rho) / (1.0 + c).powi(2);
    assert!(s.excess() < -1e-3);
    assert!(
        (s.excess() + predicted).abs() < 1e-6,
        "{} vs {}",
        s.excess(),
        -predicted
    );
    let report = check_laplacian_lemma(&sigma, 60, 4).unwrap();
    assert!(report.passed() && report.unit_gradient_samples == 0);
}

#[test]
fn laplacian_identity_on_catenoid() {
    let report = check_laplacian_lemma(&catenoid(0.5, 3).unwrap(), 60, 5).unwrap();
    assert!(
        report.max_identity_residual < 1e-4,
        "{}",
        report.max_identity_residual
    );
    assert!(report.passed());
}

fn small_config() -> MobiusConfig {
    MobiusConfig {
        restarts: 6,
        ..MobiusConfig::default()
    }
}

#[test]
fn mobius_volume_of_great_circle_is_attained_at_identity() {
    let disk = flat_disk(2, 3, None).unwrap();
    let res = mobius_volume(&disk, MobiusTarget::IdealBoundary, &small_config()).unwrap();
    assert!((res.value - 2.0 * PI).abs() < 1e-4);
    assert!(res.converged);
    assert!(res.value >= res.identity_value - 1e-12);
    assert!(res.maximizer.translation().norm() < 0.05);
    assert!(res
        .history
        .windows(2)
        .all(|w| w[1].best_so_far >= w[0].best_so_far));
    assert!(res
        .history
        .iter()
        .all(|s| s.translation.iter().map(|x| x * x).sum::<f64>() < 1.0));
}

#[test]
fn mobius_volume_of_cap_and_its_boundary() {
    let sigma = cap(FRAC_PI_4);
    let config = small_config();
    let boundary = mobius_volume(&sigma, MobiusTarget::IdealBoundary, &config).unwrap();
    assert!(
        (boundary.value - 2.0 * PI).abs() < 1e-4,
        "{}",
        boundary.value
    );
    // the maximizer carries the rim onto a great circle
    let image = mobius_image(&sigma, &boundary.maximizer).unwrap();
    let rim = euclidean_volume(&image, 1.0).unwrap().vol_ideal_boundary;
    assert!((rim - boundary.value).abs() < 1e-9);

    let interior = mobius_volume(&sigma, MobiusTarget::Submanifold, &config).unwrap();
    assert!((interior.value - PI).abs() < 1e-4, "{}", interior.value);
    assert!(
        (interior.identity_value - hypiso::families::cap_volume_closed_form(2, FRAC_PI_4)).abs()
            < 1e-8
    );

    let v = mobius_isoperimetric_verdict(2, &interior, &boundary, &config);
    assert!(v.pass);
    assert!(v.slack.abs() / v.rhs < 1e-4);
    assert!(v.notes.contains("lower bounds"));
}

#[test]
fn boundary_bounds_with_density() {
    let v = check_mobius_boundary_bound(&flat_disk(2, 3, None).unwrap(), &small_config()).unwrap();
    assert!(v.pass && v.slack.abs() < 1e-4);

    let pair = two_disks();
    let dens = candidate_densities(&pair).unwrap();
    let (theta, _) = max_density(&dens);
    assert!((theta - 2.0).abs() < 1e-5);
    let v = check_mobius_density_bound(&pair, &small_config()).unwrap();
    assert!((v.lhs - 4.0 * PI).abs() < 1e-4);
    assert!(v.rhs >= 4.0 * PI - 1e-4 && v.pass, "{v:?}");
    assert!(v.notes.contains("candidate points"));
}

#[test]
fn mobius_isoperimetric_on_catenoid_has_room() {
    let config = MobiusConfig {
        restarts: 3,
        max_evaluations: 60,
        ..MobiusConfig::default()
    };
    let v = check_mobius_isoperimetric(&catenoid(0.5, 3).unwrap(), &config).unwrap();
    assert!(v.pass && v.slack > 0.0, "{v:?}");
}

#[test]
fn non_orthogonal_sphere_violates_linear_bound() {
    let sigma = spherical_cap(2, 3, 0.6, 0.5, z_axis()).unwrap();
    assert!(!sigma.totally_geodesic);
    let v = check_linear_isoperimetric(&sigma).unwrap();
    assert!(!v.pass && !v.not_applicable && v.slack < -1.0, "{v:?}");
}

#[test]
fn verdicts_serialize_with_documented_fields() {
    let v = check_linear_isoperimetric(&cap(FRAC_PI_6)).unwrap();
    let json = serde_json::to_value(&v).unwrap();
    for key in [
        "theorem_id",
        "lhs",
        "rhs",
        "slack",
        "pass",
        "tolerance",
        "not_applicable",
        "notes",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["theorem_id"], "LinearIsop");
}
