//! Poincaré ball geometry.
//!
//! Points of the open unit ball `Bⁿ` carry the hyperbolic metric
//! `ds_H = 2/(1-|x|²) ds_R`. The isometry group is represented by
//! [`MobiusMap`], stored as a rotation composed after a Möbius translation
//! `x ↦ Q·τ_a(x)`.

use nalgebra::{DMatrix, DVector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `f64` strictly below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Tolerance on `| |u| - 1 |` for points of the sphere at infinity.
pub const IDEAL_TOL: f64 = 1e-12;

/// `1 - |x|²` evaluated as `(1-|x|)(1+|x|)`.
#[inline]
pub fn one_minus_sq(norm: f64) -> f64 {
    (1.0 - norm) * (1.0 + norm)
}

/// Hyperbolic distance from the origin of a point at Euclidean radius `r`.
pub fn radius_to_rho(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(r.ln_1p() - (-r).ln_1p())
}

/// Euclidean radius of a point at hyperbolic distance `rho` from the origin.
pub fn rho_to_radius(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::domain(format!(
            "hyperbolic radius {rho} is negative"
        )));
    }
    Ok((0.5 * rho).tanh().min(BELOW_ONE))
}

/// `1 - r` for the point at hyperbolic distance `rho`, without cancellation.
pub fn rho_to_boundary_gap(rho: f64) -> f64 {
    2.0 / (1.0 + rho.exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint(DVector<f64>);

impl BallPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain("ball dimension must be at least 2"));
        }
        let r = coords.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(Error::domain(format!(
                "point with |x| = {r} is not in the open ball"
            )));
        }
        Ok(BallPoint(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn origin(n: usize) -> Self {
        BallPoint(DVector::zeros(n))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Euclidean distance from the origin.
    pub fn radius(&self) -> f64 {
        self.0.norm()
    }

    /// Hyperbolic distance from the origin.
    pub fn rho(&self) -> f64 {
        let r = self.radius();
        r.ln_1p() - (-r).ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint(DVector<f64>);

impl IdealPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        let r = coords.norm();
        if coords.len() < 2 || (r - 1.0).abs() > IDEAL_TOL {
            return Err(Error::domain(format!(
                "|u| = {r} is not on the unit sphere"
            )));
        }
        Ok(IdealPoint(coords))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Length conformal factor `2/(1-|x|²)` of the ball model at `x`.
pub fn conformal_factor(x: &BallPoint) -> f64 {
    conformal_factor_of_radius(x.radius())
}

/// Conformal factor at Euclidean radius `r < 1`.
#[inline]
pub fn conformal_factor_of_radius(r: f64) -> f64 {
    2.0 / one_minus_sq(r)
}

/// Hyperbolic distance, via `d = 2 asinh(|x-y| / sqrt((1-|x|²)(1-|y|²)))`.
pub fn hyperbolic_distance(x: &BallPoint, y: &BallPoint) -> f64 {
    let gap = (x.coords() - y.coords()).norm();
    let denom = (one_minus_sq(x.radius()) * one_minus_sq(y.radius())).sqrt();
    2.0 * (gap / denom).asinh()
}

/// Möbius addition `a ⊕ x`, the translation carrying 0 to `a`.
pub fn mobius_add(a: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let ax = a.dot(x);
    let aa = a.norm_squared();
    let xx = x.norm_squared();
    let num_a = 1.0 + 2.0 * ax + xx;
    let num_x = one_minus_sq(aa.sqrt());
    let den = 1.0 + 2.0 * ax + aa * xx;
    (a * num_a + x * num_x) / den
}

/// Derivative of `x ↦ a ⊕ x`.
fn mobius_add_jacobian(a: &DVector<f64>, x: &DVector<f64>) -> DMatrix<f64> {
    let n = a.len();
    let ax = a.dot(x);
    let aa = a.norm_squared();
    let xx = x.norm_squared();
    let num = a * (1.0 + 2.0 * ax + xx) + x * one_minus_sq(aa.sqrt());
    let den = 1.0 + 2.0 * ax + aa * xx;
    let dnum =
        a * (a * 2.0 + x * 2.0).transpose() + DMatrix::identity(n, n) * one_minus_sq(aa.sqrt());
    let dden = (a * 2.0 + x * (2.0 * aa)).transpose();
    dnum / den - num * dden / (den * den)
}

fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    (q.transpose() * q - DMatrix::identity(n, n)).amax()
}

fn polar_orthogonalize(q: DMatrix<f64>) -> DMatrix<f64> {
    let svd = q.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    u * v_t
}

/// Serialized form of a [`MobiusMap`]: rotation rows and translation vector.
#[derive(Serialize, Deserialize)]
struct MobiusMapDoc {
    rotation: Vec<Vec<f64>>,
    translation: Vec<f64>,
}

impl From<MobiusMap> for MobiusMapDoc {
    fn from(g: MobiusMap) -> Self {
        let n = g.dim();
        MobiusMapDoc {
            rotation: (0..n)
                .map(|i| g.rotation.row(i).iter().copied().collect())
                .collect(),
            translation: g.translation.iter().copied().collect(),
        }
    }
}

impl TryFrom<MobiusMapDoc> for MobiusMap {
    type Error = Error;

    fn try_from(doc: MobiusMapDoc) -> Result<Self> {
        let n = doc.translation.len();
        if doc.rotation.len() != n || doc.rotation.iter().any(|r| r.len() != n) {
            return Err(Error::domain(
                "rotation must be a square matrix matching the translation",
            ));
        }
        let rotation = DMatrix::from_fn(n, n, |i, j| doc.rotation[i][j]);
        MobiusMap::new(rotation, DVector::from_vec(doc.translation))
    }
}

/// An isometry of the ball, `x ↦ rotation · (translation ⊕ x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MobiusMapDoc", try_from = "MobiusMapDoc")]
pub struct MobiusMap {
    rotation: DMatrix<f64>,
    translation: DVector<f64>,
}

impl MobiusMap {
    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = translation.len();
        if n < 2 || rotation.nrows() != n || rotation.ncols() != n {
            return Err(Error::domain(
                "rotation and translation dimensions disagree",
            ));
        }
        if translation.norm() >= 1.0 {
            return Err(Error::domain(format!(
                "translation parameter |a| = {} must be < 1",
                translation.norm()
            )));
        }
        let defect = orthogonality_defect(&rotation);
        if !defect.is_finite() || defect > 1e-6 {
            return Err(Error::domain(format!(
                "rotation is not orthogonal (defect {defect:e})"
            )));
        }
        let rotation = if defect > 1e-12 {
            polar_orthogonalize(rotation)
        } else {
            rotation
        };
        Ok(MobiusMap {
            rotation,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        MobiusMap {
            rotation: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
        }
    }

    /// The translation `τ_a` with `τ_a(0) = a`.
    pub fn translate(a: DVector<f64>) -> Result<Self> {
        let n = a.len();
        Self::new(DMatrix::identity(n, n), a)
    }

    pub fn rotation_only(q: DMatrix<f64>) -> Result<Self> {
        let n = q.nrows();
        Self::new(q, DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    /// Image of the origin.
    pub fn image_of_origin(&self) -> DVector<f64> {
        &self.rotation * &self.translation
    }

    /// Raw action on a vector of the closed ball; no validity checks.
    pub fn map_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rotation * mobius_add(&self.translation, x)
    }

    /// Raw action of the inverse map.
    pub fn unmap_vec(&self, y: &DVector<f64>) -> DVector<f64> {
        mobius_add(&(-&self.translation), &(self.rotation.transpose() * y))
    }

    /// Jacobian of the action at `x`.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        &self.rotation * mobius_add_jacobian(&self.translation, x)
    }

    pub fn apply<P: BallModelPoint>(&self, p: &P) -> Result<P> {
        p.transformed(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        let translation = -self.image_of_origin();
        let shift = -&translation;
        Self::canonical(self.dim(), translation, |x| {
            self.unmap_vec(&mobius_add(&shift, x))
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::domain("cannot compose maps of different dimension"));
        }
        let n = self.dim();
        let zero = DVector::zeros(n);
        let pre_zero = other.unmap_vec(&self.unmap_vec(&zero));
        let translation = -pre_zero;
        let shift = -&translation;
        Self::canonical(n, translation, |x| {
            self.map_vec(&other.map_vec(&mobius_add(&shift, x)))
        })
    }

    /// Builds `(Q, a)` for a map `F` given `a = -F⁻¹(0)` and the action
    /// `x ↦ F(τ_{-a}(x))`, which fixes the origin and is therefore linear.
    fn canonical<F>(n: usize, translation: DVector<f64>, linear_part: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        if !translation.iter().all(|v| v.is_finite()) || translation.norm() >= 1.0 {
            return Err(Error::conditioning(
                "composed translation left the open ball",
            ));
        }
        let mut q = DMatrix::zeros(n, n);
        for i in 0..n {
            let col = linear_part(&DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }));
            q.set_column(i, &col);
        }
        let defect = orthogonality_defect(&q);
        if !defect.is_finite() || defect > 1e-4 {
            return Err(Error::conditioning(format!(
                "canonical rotation lost orthogonality (defect {defect:e})"
            )));
        }
        if defect > 1e-10 {
            q = polar_orthogonalize(q);
        }
        Ok(MobiusMap {
            rotation: q,
            translation,
        })
    }
}

/// Points on which Möbius maps act: interior points and ideal points.
pub trait BallModelPoint: Sized {
    fn transformed(&self, g: &MobiusMap) -> Result<Self>;
}

impl BallModelPoint for BallPoint {
    fn transformed(&self, g: &MobiusMap) -> Result<Self> {
        if g.dim() != self.dim() {
            return Err(Error::domain("map and point dimensions disagree"));
        }
        let y = g.map_vec(self.coords());
        let r = y.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(Error::conditioning(format!(
                "interior point mapped to |y| = {r}"
            )));
        }
        Ok(BallPoint(y))
    }
}

impl BallModelPoint for IdealPoint {
    fn transformed(&self, g: &MobiusMap) -> Result<Self> {
        if g.dim() != self.dim() {
            return Err(Error::domain("map and point dimensions disagree"));
        }
        let y = g.map_vec(self.coords());
        let r = y.norm();
        if !r.is_finite() || (r - 1.0).abs() > 1e-10 {
            return Err(Error::conditioning(format!(
                "ideal point mapped to |y| = {r}"
            )));
        }
        Ok(IdealPoint(y / r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball_vec(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> DVector<f64> {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let r = rng.gen_range(0.0..max_r);
        v.normalize() * r
    }

    #[test]
    fn radial_conversions() {
        assert_eq!(radius_to_rho(0.0).unwrap(), 0.0);
        assert!((radius_to_rho(0.5).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((rho_to_radius(3f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(rho_to_radius(0.0).unwrap(), 0.0);
        let far = rho_to_radius(20.0).unwrap();
        assert!(far > 1.0 - 1e-8 && far < 1.0);
        assert!(rho_to_radius(1e3).unwrap() < 1.0);
    }

    #[test]
    fn radial_domain_errors() {
        assert!(matches!(radius_to_rho(1.0), Err(Error::Domain(_))));
        assert!(matches!(radius_to_rho(-0.1), Err(Error::Domain(_))));
        assert!(matches!(rho_to_radius(-1.0), Err(Error::Domain(_))));
        assert!(BallPoint::from_slice(&[1.0, 0.0]).is_err());
        assert!(MobiusMap::translate(DVector::from_vec(vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn round_trip_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r: f64 = rng.gen_range(0.0..1.0 - 1e-6);
            let back = rho_to_radius(radius_to_rho(r).unwrap()).unwrap();
            assert!((back - r).abs() < 1e-14, "{r} -> {back}");
        }
    }

    #[test]
    fn conformal_factor_values() {
        assert_eq!(conformal_factor(&BallPoint::origin(3)), 2.0);
        let x = BallPoint::from_slice(&[0.3, 0.4, 0.0]).unwrap();
        assert!((conformal_factor(&x) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn distance_radial_law() {
        let o = BallPoint::origin(3);
        let x = BallPoint::from_slice(&[0.5, 0.0, 0.0]).unwrap();
        assert!((hyperbolic_distance(&o, &x) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(hyperbolic_distance(&x, &x), 0.0);
    }

    #[test]
    fn translation_moves_origin_and_preserves_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = random_ball_vec(&mut rng, 3, 0.99);
            let g = MobiusMap::translate(a.clone()).unwrap();
            assert!((g.map_vec(&DVector::zeros(3)) - &a).norm() < 1e-15);
            let u = random_ball_vec(&mut rng, 3, 1.0).normalize();
            assert!((g.map_vec(&u).norm() - 1.0).abs() < 1e-12);
        }
        let id = MobiusMap::translate(DVector::zeros(3)).unwrap();
        let x = DVector::from_vec(vec![0.1, -0.2, 0.3]);
        assert_eq!(id.map_vec(&x), x);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_ball_vec(&mut rng, 3, 0.9);
            let q = nalgebra::Rotation3::from_euler_angles(0.3, -0.2, 1.1);
            let g = MobiusMap::new(DMatrix::from_iterator(3, 3, q.matrix().iter().copied()), a)
                .unwrap();
            let x = random_ball_vec(&mut rng, 3, 0.9);
            let jac = g.jacobian(&x);
            let h = 1e-6;
            for j in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let col = (g.map_vec(&xp) - g.map_vec(&xm)) / (2.0 * h);
                assert!((col - jac.column(j)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn gyration_of_opposite_translations_is_a_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = random_ball_vec(&mut rng, 4, 0.95);
            let g = MobiusMap::translate(a.clone()).unwrap();
            let h = MobiusMap::translate(-a).unwrap();
            let c = g.compose(&h).unwrap();
            assert!(c.translation().norm() < 1e-10);
        }
    }

    #[test]
    fn ideal_points_stay_ideal() {
        let g = MobiusMap::translate(DVector::from_vec(vec![0.0, 0.6, 0.0])).unwrap();
        let u = IdealPoint::new(DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let v = g.apply(&u).unwrap();
        assert!((v.coords().norm() - 1.0).abs() < 1e-15);
        assert!(IdealPoint::new(DVector::from_vec(vec![0.5, 0.0])).is_err());
    }
}
