//! The ratio `Vol_R(Σ ∩ B_r) / r^k` for a disk, a cap and a catenoid, and the
//! density at the cap's pole.

use std::f64::consts::FRAC_PI_4;

use hypiso::families::{catenoid, flat_disk, geodesic_cap};
use hypiso::measure::{density, monotonicity_curve};
use hypiso::verify::check_monotonicity;
use nalgebra::DVector;

fn main() -> hypiso::Result<()> {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, DVector::from_vec(vec![0.0, 0.0, 1.0]))?;
    for sigma in [flat_disk(2, 3, None)?, cap.clone(), catenoid(0.5, 3)?] {
        let curve = monotonicity_curve(&sigma, 25)?;
        let verdict = check_monotonicity(&curve);
        let first = curve.ratios[0];
        let last = *curve.ratios.last().unwrap();
        println!(
            "{:<32} ratio {:.10} at r={:.0e} → {:.10} at r≈1; largest drop {:.2e}; pass {}",
            sigma.label, first, curve.radii[0], last, verdict.lhs, verdict.pass
        );
    }
    let pole = &cap.candidate_density_points[0];
    let d = density(&cap, pole)?;
    println!(
        "density at the cap pole: {:.10} (fit residual {:.1e})",
        d.value, d.extrapolation_error
    );

    let mut csv = Vec::new();
    monotonicity_curve(&cap, 10)?.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
