use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use hypiso::ball::{BallPoint, MobiusMap};
use hypiso::families::{
    cap_ideal_volume_closed_form, cap_volume_closed_form, catenoid, flat_disk, geodesic_cap,
    mobius_image, union,
};
use hypiso::measure::{
    boundary_form_cells, clip_boundary_volume, coarea_check, conversion_identity_cells, density,
    euclidean_volume, ideal_boundary_volume, monotonicity_curve, truncated_volume,
    unit_ball_volume,
};
use nalgebra::DVector;

fn e3() -> DVector<f64> {
    DVector::from_vec(vec![0.0, 0.0, 1.0])
}

#[test]
fn cap_volumes_match_closed_forms() {
    for i in 1..=20 {
        let theta = FRAC_PI_2 * i as f64 / 20.0;
        for k in [2usize, 3] {
            let cap = geodesic_cap(
                k,
                k + 1,
                theta,
                DVector::from_fn(k + 1, |j, _| if j == k { 1.0 } else { 0.0 }),
            )
            .unwrap();
            let rep = euclidean_volume(&cap, 1.0).unwrap();
            let vol = cap_volume_closed_form(k, theta);
            let bd = cap_ideal_volume_closed_form(k, theta);
            assert!(
                (rep.vol_euclidean / vol - 1.0).abs() < 1e-7,
                "k={k} θ={theta}: {} vs {vol}",
                rep.vol_euclidean
            );
            assert!((rep.vol_ideal_boundary / bd - 1.0).abs() < 1e-7);
        }
    }
}

#[test]
fn cap_at_pi_over_six() {
    let cap = geodesic_cap(2, 3, FRAC_PI_6, e3()).unwrap();
    let rep = euclidean_volume(&cap, 1.0).unwrap();
    assert!((rep.vol_euclidean - PI / 3.0).abs() < 1e-9);
    assert!((ideal_boundary_volume(&cap).unwrap() - PI).abs() < 1e-9);
}

#[test]
fn truncated_volume_approaches_the_full_volume() {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    let full = euclidean_volume(&cap, 1.0).unwrap().vol_euclidean;
    let mut last = 0.0;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let v = truncated_volume(&cap, 1.0 - eps).unwrap();
        assert!(v >= last && v <= full + 1e-12);
        last = v;
    }
    assert!(full - last < 1e-4);
}

#[test]
fn catenoid_volume_and_boundary() {
    let cat = catenoid(0.5, 3).unwrap();
    let rep = euclidean_volume(&cat, 1.0).unwrap();
    assert!(rep.vol_euclidean > 0.0 && rep.conversion_residual < 1e-9);
    let bd = ideal_boundary_volume(&cat).unwrap();
    assert!(bd < 4.0 * PI);
    // the extrapolated and the direct volume agree
    let tail = euclidean_volume(&cat, 1.0 - 1e-6).unwrap();
    assert!(
        (tail.vol_euclidean - rep.vol_euclidean).abs() < 1e-8,
        "{} vs {}",
        tail.vol_euclidean,
        rep.vol_euclidean
    );
}

#[test]
fn disk_monotonicity_curve_is_flat() {
    let d = flat_disk(2, 3, None).unwrap();
    let curve = monotonicity_curve(&d, 100).unwrap();
    for m in &curve.ratios {
        assert!((m - PI).abs() < 1e-8, "{m}");
    }
}

#[test]
fn cap_monotonicity_curve_is_nondecreasing() {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    let curve = monotonicity_curve(&cap, 100).unwrap();
    for w in curve.ratios.windows(2) {
        assert!(w[1] - w[0] >= -1e-8, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn densities() {
    let d = flat_disk(2, 3, None).unwrap();
    let est = density(&d, &BallPoint::origin(3)).unwrap();
    assert!((est.value - 1.0).abs() < 1e-6);

    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    let pole = cap.candidate_density_points[0].clone();
    let est = density(&cap, &pole).unwrap();
    assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);

    let tilted = flat_disk(2, 3, Some(DVector::from_vec(vec![1.0, 0.0, 0.0]))).unwrap();
    let both = union(&[d, tilted]).unwrap();
    let origin = both
        .candidate_density_points
        .iter()
        .find(|p| p.radius() < 1e-8)
        .unwrap()
        .clone();
    let est = density(&both, &origin).unwrap();
    assert!((est.value - 2.0).abs() < 1e-6, "{}", est.value);
    let vol = euclidean_volume(&both, 1.0).unwrap().vol_euclidean;
    assert!((vol - 2.0 * unit_ball_volume(2)).abs() < 1e-7);
}

#[test]
fn conversion_identity_holds_cellwise() {
    let cap = geodesic_cap(2, 3, 0.9, e3()).unwrap();
    let g = MobiusMap::translate(DVector::from_vec(vec![0.2, -0.1, 0.3])).unwrap();
    for sigma in [
        cap.clone(),
        mobius_image(&cap, &g).unwrap(),
        catenoid(0.5, 3).unwrap(),
    ] {
        for cell in conversion_identity_cells(&sigma, 3) {
            assert!(cell.relative_gap() < 1e-9, "{cell:?}");
        }
    }
}

#[test]
fn boundary_form_identity_holds_cellwise() {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    for r in [0.5, 0.9] {
        for cell in boundary_form_cells(&cap, r, 4).unwrap() {
            assert!(cell.relative_gap() < 1e-9, "{cell:?}");
        }
    }
}

#[test]
fn truncated_volume_is_bounded_by_its_cone() {
    // minimality gives Vol(Σ ∩ B_r) ≤ (r/k) Vol(∂(Σ ∩ B_r))
    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    for r in [0.5, 0.8, 0.95] {
        let v = truncated_volume(&cap, r).unwrap();
        let b = clip_boundary_volume(&cap, r).unwrap();
        assert!(v <= r / 2.0 * b + 1e-12);
    }
    let disk = flat_disk(2, 3, None).unwrap();
    assert!((clip_boundary_volume(&disk, 0.5).unwrap() - PI).abs() < 1e-10);
}

#[test]
fn coarea_identity() {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, e3()).unwrap();
    let check = coarea_check(&cap, 1.5, 1e-2).unwrap();
    assert!(
        (check.derivative - check.boundary_integral).abs() < 1e-6,
        "{check:?}"
    );
}
