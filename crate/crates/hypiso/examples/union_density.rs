//! Two flat disks crossing at the origin: the union has density 2 there, so
//! the Möbius volume of its ideal boundary must reach `2 · 2π`.

use hypiso::families::{flat_disk, union};
use hypiso::verify::{candidate_densities, check_mobius_density_bound, MobiusConfig};
use nalgebra::DVector;

fn main() -> hypiso::Result<()> {
    let a = flat_disk(2, 3, None)?;
    let b = flat_disk(
        2,
        3,
        Some(DVector::from_vec(vec![1.0, 0.0, 1.0]).normalize()),
    )?;
    let pair = union(&[a, b])?;
    for d in candidate_densities(&pair)? {
        println!("density at {:?}: {:.10}", d.point, d.value);
    }
    let config = MobiusConfig {
        restarts: 4,
        ..MobiusConfig::default()
    };
    let v = check_mobius_density_bound(&pair, &config)?;
    println!(
        "k ω_k max Θ = {:.10}, Vol_M(∂∞Σ) ≥ {:.10}: pass {}",
        v.lhs, v.rhs, v.pass
    );
    println!("{}", v.notes);
    Ok(())
}
