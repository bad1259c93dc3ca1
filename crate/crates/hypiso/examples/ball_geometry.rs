//! Distances, conformal factors and the Möbius group of the Poincaré ball.

use hypiso::ball::{
    conformal_factor, hyperbolic_distance, radius_to_rho, rho_to_radius, BallPoint, MobiusMap,
};
use nalgebra::DVector;

fn main() -> hypiso::Result<()> {
    let x = BallPoint::from_slice(&[0.5, 0.0, 0.0])?;
    let y = BallPoint::from_slice(&[-0.2, 0.6, 0.1])?;
    println!(
        "ρ(0.5) = {:.15} (ln 3 = {:.15})",
        radius_to_rho(0.5)?,
        3f64.ln()
    );
    println!(
        "radius at ρ = 10: 1 - r = {:.6e}",
        1.0 - rho_to_radius(10.0)?
    );
    println!("λ(x) = {:.15}", conformal_factor(&x));
    println!("d(x, y) = {:.15}", hyperbolic_distance(&x, &y));

    // Möbius maps of the ball are hyperbolic isometries
    let g = MobiusMap::translate(DVector::from_vec(vec![0.3, -0.4, 0.2]))?;
    let (gx, gy) = (g.apply(&x)?, g.apply(&y)?);
    println!("d(gx, gy) = {:.15}", hyperbolic_distance(&gx, &gy));

    let back = g.inverse()?.apply(&gx)?;
    println!(
        "|g⁻¹(g x) - x| = {:.3e}",
        (back.coords() - x.coords()).norm()
    );

    let h = MobiusMap::translate(DVector::from_vec(vec![0.0, 0.1, -0.7]))?;
    let composed = g.compose(&h)?;
    let lhs = composed.apply(&x)?;
    let rhs = g.apply(&h.apply(&x)?)?;
    println!(
        "|(g∘h)(x) - g(h(x))| = {:.3e}",
        (lhs.coords() - rhs.coords()).norm()
    );
    println!("canonical rotation of g∘h:\n{:.6}", composed.rotation());
    Ok(())
}
