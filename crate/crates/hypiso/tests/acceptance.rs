//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::time::Instant;

use hypiso::ball::{conformal_factor, hyperbolic_distance, BallPoint, MobiusMap};
use hypiso::families::{
    cap_ideal_volume_closed_form, cap_volume_closed_form, catenoid, flat_disk, geodesic_cap,
    mobius_image, spherical_cap, union, Submanifold,
};
use hypiso::measure::{
    boundary_form_cells, coarea_check, conversion_identity_cells, density, euclidean_volume,
    monotonicity_curve, unit_ball_volume,
};
use hypiso::verify::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = (bool, String);

fn axis(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 })
}

fn cap(k: usize, theta: f64) -> Submanifold {
    geodesic_cap(k, k + 1, theta, axis(k + 1)).unwrap()
}

fn disk() -> Submanifold {
    flat_disk(2, 3, None).unwrap()
}

fn sweep_thetas() -> Vec<f64> {
    (1..=50).map(|i| FRAC_PI_2 * i as f64 / 50.0).collect()
}

fn disk_images() -> Vec<Submanifold> {
    (1..=5)
        .map(|i| {
            let a = DVector::from_vec(vec![0.1, -0.2, 0.15 * i as f64]);
            mobius_image(&disk(), &MobiusMap::translate(a).unwrap()).unwrap()
        })
        .collect()
}

const NECKS: [f64; 3] = [0.3, 0.5, 1.0];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cap_closed_forms() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let start = Instant::now();
        let rep = euclidean_volume(&cap(2, theta), 1.0).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        // carrier sphere of radius tan θ seen under half-angle π/2 - θ:
        // 2π tan²θ (1 - sin θ) = 2π s²/(1 + s); π/3 and π at θ = π/6
        let s = theta.sin();
        let vol = 2.0 * PI * s * s / (1.0 + s);
        let bd = 2.0 * PI * theta.sin();
        let err = rel(rep.vol_euclidean, vol).max(rel(rep.vol_ideal_boundary, bd));
        ok &= (rel(cap_volume_closed_form(2, theta), vol) < 1e-14)
            && (rel(cap_ideal_volume_closed_form(2, theta), bd) < 1e-14);
        worst = worst.max(err);
    }
    let sixth = euclidean_volume(&cap(2, FRAC_PI_6), 1.0).unwrap();
    ok &= rel(sixth.vol_euclidean, PI / 3.0) < 1e-7 && rel(sixth.vol_ideal_boundary, PI) < 1e-7;
    ok &= worst < 1e-7 && slowest < 5.0;
    (
        ok,
        format!("max relative error {worst:.2e}, slowest θ {slowest:.2}s"),
    )
}

fn linear_inequality() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    let mut count = 0;
    let mut end_slack: f64 = 0.0;
    for k in [2, 3] {
        for theta in sweep_thetas() {
            let v = check_linear_isoperimetric(&cap(k, theta)).unwrap();
            failures += usize::from(!v.pass);
            count += 1;
            if theta == FRAC_PI_2 {
                end_slack = end_slack.max(v.slack.abs());
            }
        }
    }
    for sigma in disk_images() {
        failures += usize::from(!check_linear_isoperimetric(&sigma).unwrap().pass);
        count += 1;
    }
    for neck in NECKS {
        failures += usize::from(
            !check_linear_isoperimetric(&catenoid(neck, 3).unwrap())
                .unwrap()
                .pass,
        );
        count += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures == 0 && end_slack < 1e-8 && secs < 180.0;
    (
        ok,
        format!("{failures}/{count} violations, |slack| at π/2 {end_slack:.2e}, {secs:.1}s"),
    )
}

fn reverse_inequality() -> Outcome {
    let mut failures = 0;
    let mut end_gap: f64 = 0.0;
    for k in [2, 3] {
        for theta in sweep_thetas() {
            let v = check_reverse_totally_geodesic(&cap(k, theta)).unwrap();
            failures += usize::from(!v.pass);
            if theta == FRAC_PI_2 {
                end_gap = end_gap.max(v.slack.abs());
            }
        }
    }
    (
        failures == 0 && end_gap < 1e-7,
        format!("{failures}/100 violations, equality gap at π/2 {end_gap:.2e}"),
    )
}

fn monotonicity() -> Outcome {
    let image = &disk_images()[2];
    let families = [
        ("disk", disk()),
        ("cap π/6", cap(2, FRAC_PI_6)),
        ("cap π/4", cap(2, FRAC_PI_4)),
        ("cap π/3", cap(2, FRAC_PI_3)),
        ("möbius image", image.clone()),
        ("catenoid", catenoid(0.5, 3).unwrap()),
    ];
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut disk_gap: f64 = 0.0;
    for (name, sigma) in &families {
        let curve = monotonicity_curve(sigma, 100).unwrap();
        ok &= curve.ratios.len() == 100;
        let slack = curve
            .ratios
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        worst = worst.min(slack);
        if *name == "disk" {
            disk_gap = curve
                .ratios
                .iter()
                .map(|m| (m - PI).abs())
                .fold(0.0, f64::max);
        }
    }
    ok &= worst >= -1e-8 && disk_gap < 1e-8;
    (
        ok,
        format!(
            "min slack {worst:.2e} over {} curves, disk vs ω₂ {disk_gap:.2e}",
            families.len()
        ),
    )
}

fn volume_lower_bound() -> Outcome {
    let v = check_volume_lower_bound(&disk()).unwrap();
    let disk_gap = (v.rhs - v.lhs).abs();
    let mut ok = v.pass && disk_gap <= 1e-7;
    for sigma in disk_images() {
        ok &= check_volume_lower_bound(&sigma).unwrap().acceptable();
    }

    let tilted = DVector::from_vec(vec![1.0, 0.0, 1.0]).normalize();
    let pair = union(&[disk(), flat_disk(2, 3, Some(tilted)).unwrap()]).unwrap();
    let vol = euclidean_volume(&pair, 1.0).unwrap().vol_euclidean;
    let vol_gap = (vol - 2.0 * unit_ball_volume(2)).abs();
    let theta = density(&pair, &BallPoint::origin(3)).unwrap().value;
    ok &= check_volume_lower_bound(&pair).unwrap().pass
        && vol_gap < 1e-7
        && (theta - 2.0).abs() < 1e-5;
    (
        ok,
        format!(
            "disk gap {disk_gap:.2e}, union volume gap {vol_gap:.2e}, density at origin {theta:.8}"
        ),
    )
}

fn laplacian() -> Outcome {
    let families = [
        ("disk", disk()),
        ("cap", cap(2, FRAC_PI_4)),
        ("möbius image", disk_images()[1].clone()),
        ("catenoid", catenoid(0.5, 3).unwrap()),
    ];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut disk_detail = String::new();
    for (seed, (name, sigma)) in families.iter().enumerate() {
        let report = check_laplacian_lemma(sigma, 100, seed as u64).unwrap();
        ok &= report.samples.len() == 100
            && report.max_identity_residual < 1e-4
            && report.verdict.pass;
        worst = worst.max(report.max_identity_residual);
        if *name == "disk" {
            let grad = report
                .samples
                .iter()
                .map(|s| (s.grad_rho - 1.0).abs())
                .fold(0.0, f64::max);
            ok &= grad < 1e-6
                && report.max_equality_residual < 1e-5
                && report.unit_gradient_samples == 100;
            disk_detail = format!(
                "disk ||∇ρ|-1| {grad:.2e}, equality residual {:.2e}",
                report.max_equality_residual
            );
        }
    }
    (
        ok,
        format!("max identity residual {worst:.2e}, {disk_detail}"),
    )
}

fn mobius_volumes() -> Outcome {
    let config = MobiusConfig::default();
    let mut ok = config.restarts == 16 && config.max_evaluations == 200;
    let mut slowest: f64 = 0.0;
    let mut run = |sigma: &Submanifold, target| {
        let start = Instant::now();
        let res = mobius_volume(sigma, target, &config).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        res
    };
    let disk_bd = run(&disk(), MobiusTarget::IdealBoundary);
    let disk_in = run(&disk(), MobiusTarget::Submanifold);
    let cap_bd = run(&cap(2, FRAC_PI_4), MobiusTarget::IdealBoundary);
    let cap_in = run(&cap(2, FRAC_PI_4), MobiusTarget::Submanifold);
    let gaps = [
        (disk_bd.value - 2.0 * PI).abs(),
        (cap_bd.value - 2.0 * PI).abs(),
        (cap_in.value - PI).abs(),
    ];
    ok &= gaps.iter().all(|g| *g < 1e-4);
    let mut iso: f64 = 0.0;
    for (interior, boundary) in [(&disk_in, &disk_bd), (&cap_in, &cap_bd)] {
        let v = mobius_isoperimetric_verdict(2, interior, boundary, &config);
        ok &= v.pass;
        iso = iso.max(v.slack.abs() / v.rhs);
    }
    ok &= iso < 1e-4 && slowest < 120.0;
    (
        ok,
        format!(
            "gaps {:.1e}/{:.1e}/{:.1e}, isoperimetric relative gap {iso:.1e}, slowest target {slowest:.1}s",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn non_orthogonal_control() -> Outcome {
    let sigma = spherical_cap(2, 3, 0.6, 0.5, axis(3)).unwrap();
    let v = check_linear_isoperimetric(&sigma).unwrap();
    (
        !v.pass && !v.not_applicable,
        format!("linear slack {:.4}", v.slack),
    )
}

fn ball_vec(n: usize) -> impl Strategy<Value = DVector<f64>> {
    (prop::collection::vec(-1.0f64..1.0, n), 0.0f64..0.9).prop_filter_map(
        "zero direction",
        move |(v, r)| {
            let v = DVector::from_vec(v);
            let norm = v.norm();
            (norm > 1e-3).then(|| v * (r / norm))
        },
    )
}

fn mobius(n: usize) -> impl Strategy<Value = MobiusMap> {
    let q = prop::collection::vec(-1.0f64..1.0, n * n).prop_filter_map("singular", move |v| {
        let m = DMatrix::from_vec(n, n, v);
        (m.determinant().abs() > 1e-2).then(|| m.qr().q())
    });
    (q, ball_vec(n)).prop_map(|(q, a)| MobiusMap::new(q, a).unwrap())
}

fn mobius_properties() -> std::result::Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(mobius(3), ball_vec(3), ball_vec(3)), |(g, x, y)| {
            let (px, py) = (
                BallPoint::new(x.clone()).unwrap(),
                BallPoint::new(y).unwrap(),
            );
            let d = hyperbolic_distance(&px, &py);
            let dg = hyperbolic_distance(&g.apply(&px).unwrap(), &g.apply(&py).unwrap());
            prop_assert!((d - dg).abs() / d.max(1.0) < 1e-10);
            let gx = g.apply(&px).unwrap();
            let j = g.jacobian(&x);
            let scale = conformal_factor(&gx) / conformal_factor(&px);
            prop_assert!(
                (j.transpose() * &j * (scale * scale) - DMatrix::identity(3, 3)).amax() < 1e-10
            );
            let back = g.inverse().unwrap().apply(&gx).unwrap();
            prop_assert!(hyperbolic_distance(&back, &px) < 1e-10);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn identities() -> Outcome {
    let base = cap(2, 0.9);
    let g = MobiusMap::translate(DVector::from_vec(vec![0.2, -0.1, 0.3])).unwrap();
    let mut cells = 0;
    let mut worst: f64 = 0.0;
    for sigma in [
        base.clone(),
        mobius_image(&base, &g).unwrap(),
        catenoid(0.5, 3).unwrap(),
    ] {
        for cell in conversion_identity_cells(&sigma, 3) {
            worst = worst.max(cell.relative_gap());
            cells += 1;
        }
    }
    let mut boundary: f64 = 0.0;
    for sigma in [cap(2, FRAC_PI_4), mobius_image(&base, &g).unwrap()] {
        for r in [0.5, 0.9] {
            for cell in boundary_form_cells(&sigma, r, 4).unwrap() {
                boundary = boundary.max(cell.relative_gap());
            }
        }
    }
    let mut coarea: f64 = 0.0;
    for (sigma, rho) in [(cap(2, FRAC_PI_4), 1.5), (disk(), 1.0)] {
        let check = coarea_check(&sigma, rho, 1e-2).unwrap();
        coarea = coarea.max((check.derivative - check.boundary_integral).abs());
    }
    let props = mobius_properties();
    let ok = worst < 1e-9 && boundary < 1e-9 && coarea < 1e-6 && props.is_ok();
    let props = match props {
        Ok(()) => "1000 Möbius cases ok".to_string(),
        Err(e) => format!("Möbius property failed: {e}"),
    };
    (ok, format!("{cells} cells max gap {worst:.1e}, boundary form gap {boundary:.1e}, coarea gap {coarea:.1e}, {props}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("cap closed forms", cap_closed_forms),
        ("linear inequality", linear_inequality),
        ("reverse inequality", reverse_inequality),
        ("monotonicity", monotonicity),
        ("volume lower bound", volume_lower_bound),
        ("laplacian lemmas", laplacian),
        ("mobius volumes", mobius_volumes),
        ("non-orthogonal control", non_orthogonal_control),
        ("conversion identities", identities),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        failed += usize::from(!ok);
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {status} {name}: {detail} [{:.1}s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
