//! Isoperimetric verdicts across families, plus a round sphere piece that
//! does not meet the unit sphere orthogonally and so violates the linear bound.

use std::f64::consts::FRAC_PI_6;

use hypiso::ball::MobiusMap;
use hypiso::families::{catenoid, flat_disk, geodesic_cap, mobius_image, spherical_cap};
use hypiso::verify::{
    classical_isoperimetric_verdict, linear_isoperimetric_verdict, measure,
    reverse_totally_geodesic_verdict, volume_lower_bound_verdict, InequalityVerdict,
};
use nalgebra::DVector;

fn show(v: &InequalityVerdict) {
    let status = if v.not_applicable {
        "n/a"
    } else if v.pass {
        "pass"
    } else {
        "FAIL"
    };
    println!(
        "    {:<16?} {:>4}  lhs {:.10}  rhs {:.10}  slack {:+.3e}",
        v.theorem_id, status, v.lhs, v.rhs, v.slack
    );
}

fn main() -> hypiso::Result<()> {
    let z = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let disk = flat_disk(2, 3, None)?;
    let shifted = mobius_image(
        &disk,
        &MobiusMap::translate(DVector::from_vec(vec![0.1, 0.2, 0.3]))?,
    )?;
    let families = vec![
        disk,
        geodesic_cap(2, 3, FRAC_PI_6, z.clone())?,
        shifted,
        catenoid(0.5, 3)?,
        // center distance 0.6, radius 0.5: crosses the unit sphere at a sharp angle
        spherical_cap(2, 3, 0.6, 0.5, z)?,
    ];
    for sigma in &families {
        let m = measure(sigma, 1.0)?;
        println!(
            "{}  Vol {:.10}  Vol∂ {:.10}",
            sigma.label,
            m.vol(),
            m.boundary()
        );
        show(&linear_isoperimetric_verdict(&m));
        show(&classical_isoperimetric_verdict(&m));
        if sigma.totally_geodesic {
            show(&reverse_totally_geodesic_verdict(&m));
        }
        show(&volume_lower_bound_verdict(sigma, &m));
    }
    Ok(())
}
