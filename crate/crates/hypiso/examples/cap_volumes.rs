//! Euclidean volumes of geodesic caps and their ideal boundaries against the
//! closed forms `k ω_k tan^k θ ∫ sin^{k-1}` and `k ω_k sin^{k-1} θ`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use hypiso::families::{cap_ideal_volume_closed_form, cap_volume_closed_form, geodesic_cap};
use hypiso::measure::euclidean_volume;
use nalgebra::DVector;

fn main() -> hypiso::Result<()> {
    for (k, n) in [(2, 3), (3, 4)] {
        let axis = DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 });
        for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let cap = geodesic_cap(k, n, theta, axis.clone())?;
            let report = euclidean_volume(&cap, 1.0)?;
            let (vol, ideal) = (
                cap_volume_closed_form(k, theta),
                cap_ideal_volume_closed_form(k, theta),
            );
            println!(
                "k={k} θ={theta:.6}  Vol {:.12} (closed {:.12}, rel {:.1e})  Vol∂ {:.12} (closed {:.12}, rel {:.1e})",
                report.vol_euclidean,
                vol,
                (report.vol_euclidean / vol - 1.0).abs(),
                report.vol_ideal_boundary,
                ideal,
                (report.vol_ideal_boundary / ideal - 1.0).abs(),
            );
        }
    }
    Ok(())
}
