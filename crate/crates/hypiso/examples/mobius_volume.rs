//! Möbius volume of a geodesic cap and of its ideal boundary circle.
//!
//! Both are Möbius-equivalent to the flat disk and the great circle, so the
//! optimizer should report `π` and `2π`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use hypiso::families::geodesic_cap;
use hypiso::verify::{mobius_volume, MobiusConfig, MobiusTarget};
use nalgebra::DVector;

fn main() -> hypiso::Result<()> {
    let cap = geodesic_cap(2, 3, FRAC_PI_4, DVector::from_vec(vec![0.0, 0.0, 1.0]))?;
    let config = MobiusConfig::default();
    for (target, expected) in [
        (MobiusTarget::IdealBoundary, 2.0 * PI),
        (MobiusTarget::Submanifold, PI),
    ] {
        let start = Instant::now();
        let res = mobius_volume(&cap, target, &config)?;
        println!(
            "{target:?}: value {:.10} (expected {expected:.10}), identity {:.6}, {} evaluations, converged {}, {:.1} s",
            res.value,
            res.identity_value,
            res.evaluations,
            res.converged,
            start.elapsed().as_secs_f64()
        );
        println!(
            "  maximizer translation {:?}",
            res.maximizer.translation().as_slice()
        );
    }
    Ok(())
}
