use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::sphere::{angle_ranges, hypersphere, orthonormal_complement};
use super::{Chart, ChartMap, ParamBox, PointChart, Submanifold};
use crate::ball::BallPoint;
use crate::error::{Error, Result};
use crate::measure::quadrature::{adaptive_gk, QuadTol};
use crate::measure::unit_ball_volume;

/// Piece of the round sphere `|x - center| = radius` in the affine span of
/// `axis` and `frame`, in polar coordinates about the point nearest the
/// origin: `x = center + radius (-cos α · axis + sin α · ω)`.
#[derive(Debug)]
struct SphereCapChart {
    center: DVector<f64>,
    radius: f64,
    axis: DVector<f64>,
    frame: Vec<DVector<f64>>,
}

impl SphereCapChart {
    fn omega(&self, angles: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.axis.len();
        if self.frame.len() == 1 {
            return (self.frame[0].clone(), DMatrix::zeros(n, 0));
        }
        let (w, dw) = hypersphere(angles);
        let mut out = DVector::zeros(n);
        let mut dout = DMatrix::zeros(n, angles.len());
        for (i, e) in self.frame.iter().enumerate() {
            out += e * w[i];
            for l in 0..angles.len() {
                let mut col = dout.column_mut(l);
                col += e * dw[(i, l)];
            }
        }
        (out, dout)
    }

    fn point_at(&self, alpha: f64, omega: &DVector<f64>) -> DVector<f64> {
        &self.center + (&self.axis * (-alpha.cos()) + omega * alpha.sin()) * self.radius
    }
}

impl ChartMap for SphereCapChart {
    fn ambient_dim(&self) -> usize {
        self.axis.len()
    }

    fn param_dim(&self) -> usize {
        self.frame.len()
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        let (w, _) = self.omega(&u[1..]);
        self.point_at(u[0], &w)
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let alpha = u[0];
        let (w, dw) = self.omega(&u[1..]);
        let k = self.frame.len();
        let mut jac = DMatrix::zeros(self.axis.len(), k);
        jac.set_column(
            0,
            &((&self.axis * alpha.sin() + &w * alpha.cos()) * self.radius),
        );
        for l in 0..k - 1 {
            jac.set_column(l + 1, &(dw.column(l) * (self.radius * alpha.sin())));
        }
        jac
    }
}

/// The `(k-1)`-sphere at polar angle `alpha` of a [`SphereCapChart`].
#[derive(Debug)]
struct SphereCapRim {
    cap: Arc<SphereCapChart>,
    alpha: f64,
    normalize: bool,
}

impl ChartMap for SphereCapRim {
    fn ambient_dim(&self) -> usize {
        self.cap.axis.len()
    }

    fn param_dim(&self) -> usize {
        self.cap.frame.len() - 1
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        let (w, _) = self.cap.omega(u);
        let x = self.cap.point_at(self.alpha, &w);
        if self.normalize {
            let r = x.norm();
            x / r
        } else {
            x
        }
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let (_, dw) = self.cap.omega(u);
        // renormalization only removes rounding, so it does not enter the derivative
        dw * (self.cap.radius * self.alpha.sin())
    }
}

/// Flat disk `x = t ω` in the span of `frame`.
#[derive(Debug)]
struct DiskChart {
    frame: Vec<DVector<f64>>,
}

impl DiskChart {
    fn omega(&self, angles: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.frame[0].len();
        if self.frame.len() == 1 {
            return (self.frame[0].clone(), DMatrix::zeros(n, 0));
        }
        let (w, dw) = hypersphere(angles);
        let mut out = DVector::zeros(n);
        let mut dout = DMatrix::zeros(n, angles.len());
        for (i, e) in self.frame.iter().enumerate() {
            out += e * w[i];
            for l in 0..angles.len() {
                let mut col = dout.column_mut(l);
                col += e * dw[(i, l)];
            }
        }
        (out, dout)
    }
}

impl ChartMap for DiskChart {
    fn ambient_dim(&self) -> usize {
        self.frame[0].len()
    }

    fn param_dim(&self) -> usize {
        self.frame.len()
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        self.omega(&u[1..]).0 * u[0]
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let (w, dw) = self.omega(&u[1..]);
        let k = self.frame.len();
        let mut jac = DMatrix::zeros(w.len(), k);
        jac.set_column(0, &w);
        for l in 0..k - 1 {
            jac.set_column(l + 1, &(dw.column(l) * u[0]));
        }
        jac
    }
}

/// Unit `(k-1)`-sphere in the span of `frame`, the ideal boundary of a flat disk.
#[derive(Debug)]
struct GreatSphereChart {
    disk: DiskChart,
}

impl ChartMap for GreatSphereChart {
    fn ambient_dim(&self) -> usize {
        self.disk.ambient_dim()
    }

    fn param_dim(&self) -> usize {
        self.disk.frame.len() - 1
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        self.disk.omega(u).0
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        self.disk.omega(u).1
    }
}

fn unit_axis(axis: &DVector<f64>, n: usize) -> Result<DVector<f64>> {
    if axis.len() != n {
        return Err(Error::domain(format!(
            "axis has dimension {}, expected {n}",
            axis.len()
        )));
    }
    let nrm = axis.norm();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "axis must be a unit vector, |axis| = {nrm}"
        )));
    }
    Ok(axis / nrm)
}

fn polar_domain(k: usize, alpha_max: f64) -> ParamBox {
    if k == 1 {
        return ParamBox::new(vec![-alpha_max], vec![alpha_max]);
    }
    let mut lo = vec![0.0];
    let mut hi = vec![alpha_max];
    for (a, b) in angle_ranges(k) {
        lo.push(a);
        hi.push(b);
    }
    ParamBox::new(lo, hi)
}

fn rim_domain(k: usize) -> ParamBox {
    let (lo, hi) = angle_ranges(k).into_iter().unzip();
    ParamBox::new(lo, hi)
}

/// A totally geodesic `k`-submanifold: the part inside the ball of the
/// `k`-sphere centred at `sec θ · axis` with radius `tan θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCap {
    pub k: usize,
    pub n: usize,
    /// Angle at the origin between the axis and any ideal boundary point.
    pub theta: f64,
    pub axis: DVector<f64>,
}

impl GeodesicCap {
    pub fn new(k: usize, n: usize, theta: f64, axis: DVector<f64>) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::domain(format!("cap angle {theta} outside (0, π/2]")));
        }
        if k < 1 || k >= n {
            return Err(Error::domain(format!(
                "geodesic caps need 1 ≤ k < n, got k = {k}, n = {n}"
            )));
        }
        let axis = unit_axis(&axis, n)?;
        Ok(GeodesicCap { k, n, theta, axis })
    }

    pub fn is_flat(&self) -> bool {
        self.theta == FRAC_PI_2
    }

    /// Euclidean centre of the carrier sphere (`None` for the flat disk).
    pub fn carrier_center(&self) -> Option<DVector<f64>> {
        (!self.is_flat()).then(|| &self.axis / self.theta.cos())
    }

    pub fn carrier_radius(&self) -> Option<f64> {
        (!self.is_flat()).then(|| self.theta.tan())
    }

    /// Point of the cap nearest the origin, at distance `sec θ - tan θ`.
    pub fn pole(&self) -> DVector<f64> {
        let (s, c) = self.theta.sin_cos();
        // sec θ - tan θ = cos θ / (1 + sin θ)
        &self.axis * (c / (1.0 + s))
    }

    pub fn to_submanifold(&self) -> Result<Submanifold> {
        let frame = orthonormal_complement(std::slice::from_ref(&self.axis), self.n, self.k)?;
        if self.is_flat() {
            return Ok(disk_from_frame(
                self.k,
                self.n,
                frame,
                format!("cap(k={}, θ=π/2)", self.k),
            ));
        }
        let chart = Arc::new(SphereCapChart {
            center: self.carrier_center().unwrap(),
            radius: self.carrier_radius().unwrap(),
            axis: self.axis.clone(),
            frame,
        });
        let alpha_max = FRAC_PI_2 - self.theta;
        let ideal = rim_charts(&chart, self.k, alpha_max, true);
        Ok(Submanifold {
            k: self.k,
            n: self.n,
            interior_charts: vec![Chart::new(polar_domain(self.k, alpha_max), chart, true)],
            ideal_charts: ideal,
            contains_origin: false,
            totally_geodesic: true,
            candidate_density_points: vec![BallPoint::new(self.pole())?],
            label: format!("cap(k={}, θ={})", self.k, self.theta),
        })
    }
}

fn rim_charts(chart: &Arc<SphereCapChart>, k: usize, alpha: f64, normalize: bool) -> Vec<Chart> {
    if k == 1 {
        return [-alpha, alpha]
            .iter()
            .map(|a| {
                let mut p = chart.eval(&[*a]);
                if normalize {
                    p /= p.norm();
                }
                Chart::new(ParamBox::new(vec![], vec![]), Arc::new(PointChart(p)), true)
            })
            .collect();
    }
    vec![Chart::new(
        rim_domain(k),
        Arc::new(SphereCapRim {
            cap: chart.clone(),
            alpha,
            normalize,
        }),
        true,
    )]
}

pub fn geodesic_cap(k: usize, n: usize, theta: f64, axis: DVector<f64>) -> Result<Submanifold> {
    GeodesicCap::new(k, n, theta, axis)?.to_submanifold()
}

fn disk_from_frame(k: usize, n: usize, frame: Vec<DVector<f64>>, label: String) -> Submanifold {
    let disk = DiskChart {
        frame: frame.clone(),
    };
    let domain = if k == 1 {
        ParamBox::new(vec![-1.0], vec![1.0])
    } else {
        let mut lo = vec![0.0];
        let mut hi = vec![1.0];
        for (a, b) in angle_ranges(k) {
            lo.push(a);
            hi.push(b);
        }
        ParamBox::new(lo, hi)
    };
    let ideal = if k == 1 {
        vec![
            Chart::new(
                ParamBox::new(vec![], vec![]),
                Arc::new(PointChart(-&frame[0])),
                true,
            ),
            Chart::new(
                ParamBox::new(vec![], vec![]),
                Arc::new(PointChart(frame[0].clone())),
                true,
            ),
        ]
    } else {
        vec![Chart::new(
            rim_domain(k),
            Arc::new(GreatSphereChart {
                disk: DiskChart { frame },
            }),
            true,
        )]
    };
    Submanifold {
        k,
        n,
        interior_charts: vec![Chart::new(domain, Arc::new(disk), true)],
        ideal_charts: ideal,
        contains_origin: true,
        totally_geodesic: true,
        candidate_density_points: vec![BallPoint::origin(n)],
        label,
    }
}

/// Unit `k`-disk through the origin. With `normal = None` it spans the first
/// `k` coordinate axes; otherwise it spans `k` directions orthogonal to `normal`.
pub fn flat_disk(k: usize, n: usize, normal: Option<DVector<f64>>) -> Result<Submanifold> {
    if k < 1 || k > n || n < 2 {
        return Err(Error::domain(format!(
            "flat disk needs 1 ≤ k ≤ n, got k = {k}, n = {n}"
        )));
    }
    let frame = match normal {
        None => (0..k)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect(),
        Some(v) => {
            if k == n {
                return Err(Error::domain("a full-dimensional disk has no normal"));
            }
            let v = unit_axis(&v, n)?;
            orthonormal_complement(std::slice::from_ref(&v), n, k)?
        }
    };
    Ok(disk_from_frame(k, n, frame, format!("disk(k={k})")))
}

/// Part inside the ball of an arbitrary round `k`-sphere centred on `axis`.
/// Minimal only when the sphere meets the unit sphere orthogonally
/// (`center_dist² = 1 + radius²`); otherwise useful as a negative control.
pub fn spherical_cap(
    k: usize,
    n: usize,
    center_dist: f64,
    radius: f64,
    axis: DVector<f64>,
) -> Result<Submanifold> {
    if k < 1 || k >= n {
        return Err(Error::domain(format!(
            "spherical caps need 1 ≤ k < n, got k = {k}, n = {n}"
        )));
    }
    if !(center_dist > 0.0 && radius > 0.0) {
        return Err(Error::domain("center distance and radius must be positive"));
    }
    if !((center_dist - radius).abs() < 1.0 && center_dist + radius > 1.0) {
        return Err(Error::domain("sphere does not cross the unit sphere"));
    }
    let axis = unit_axis(&axis, n)?;
    let frame = orthonormal_complement(std::slice::from_ref(&axis), n, k)?;
    let cos_rim =
        (center_dist * center_dist + radius * radius - 1.0) / (2.0 * center_dist * radius);
    let alpha_max = cos_rim.clamp(-1.0, 1.0).acos();
    let orthogonal = (center_dist * center_dist - radius * radius - 1.0).abs() < 1e-12;
    let pole = &axis * (center_dist - radius);
    let chart = Arc::new(SphereCapChart {
        center: &axis * center_dist,
        radius,
        axis,
        frame,
    });
    Ok(Submanifold {
        k,
        n,
        interior_charts: vec![Chart::new(polar_domain(k, alpha_max), chart.clone(), true)],
        ideal_charts: rim_charts(&chart, k, alpha_max, true),
        contains_origin: (center_dist - radius).abs() < 1e-12,
        totally_geodesic: orthogonal,
        candidate_density_points: vec![BallPoint::new(pole)?],
        label: format!("sphere-cap(c={center_dist}, R={radius})"),
    })
}

/// `k ω_k sin^{k-1} θ`, the ideal boundary volume of a geodesic cap.
pub fn cap_ideal_volume_closed_form(k: usize, theta: f64) -> f64 {
    k as f64 * unit_ball_volume(k) * theta.sin().powi(k as i32 - 1)
}

/// `k ω_k tan^k θ ∫_0^{π/2-θ} sin^{k-1} φ dφ`, the Euclidean volume of a geodesic cap.
pub fn cap_volume_closed_form(k: usize, theta: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        return unit_ball_volume(k);
    }
    let s = theta.sin();
    if k == 2 {
        return 2.0 * std::f64::consts::PI * s * s / (1.0 + s);
    }
    let upper = FRAC_PI_2 - theta;
    let integral = adaptive_gk(
        |phi| phi.sin().powi(k as i32 - 1),
        0.0,
        upper,
        QuadTol::new(0.0, 1e-13),
    );
    k as f64 * unit_ball_volume(k) * theta.tan().powi(k as i32) * integral.value
}
