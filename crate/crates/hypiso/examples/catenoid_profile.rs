//! Spherical catenoids in B³: the generating curve in Fermi coordinates about
//! a geodesic, its conserved quantity, and the two ideal boundary circles.

use hypiso::families::{catenoid_with, CatenoidOptions};
use hypiso::measure::euclidean_volume;

fn main() -> hypiso::Result<()> {
    for neck in [0.3, 0.5, 1.0] {
        let (sigma, profile) = catenoid_with(neck, 3, &CatenoidOptions::default())?;
        let report = euclidean_volume(&sigma, 1.0)?;
        println!("σ₀ = {neck}");
        println!(
            "  first integral K = {:.15}, drift {:.2e}",
            profile.first_integral(),
            profile.first_integral_drift()
        );
        println!("  Euler–Lagrange residual {:.2e}", profile.residual());
        println!(
            "  t∞ = {:.12}; ideal circles of radius {:.12} at heights ±{:.12}",
            profile.t_infinity(),
            profile.ideal_radius(),
            profile.ideal_height()
        );
        println!(
            "  ideal-circle fit residual {:.2e}, asymptote residual {:.2e}",
            profile.ideal_fit_residual(),
            profile.asymptote_residual()
        );
        println!(
            "  Vol = {:.12}, Vol∂ = {:.12}, Vol∂/2 - Vol = {:.6e}",
            report.vol_euclidean,
            report.vol_ideal_boundary,
            report.vol_ideal_boundary / 2.0 - report.vol_euclidean
        );
    }
    Ok(())
}
