//! Euclidean volumes of submanifolds of the ball and of their ideal
//! boundaries, truncated volumes `Vol_R(Σ ∩ B_r)`, the monotonicity ratio and
//! densities.
//!
//! Every volume integral carries two integrands: the Euclidean one
//! `sqrt det(JᵀJ)` and the hyperbolic volume element weighted by
//! `(1 + cosh ρ)^{-k}`. They agree pointwise, so a disagreement of the totals
//! signals a broken chart or lost precision near the sphere at infinity.

pub mod quadrature;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{conformal_factor_of_radius, radius_to_rho, BallPoint, MobiusMap};
use crate::error::{Error, Result};
use crate::families::{gram_determinant, mobius_image, Chart, ParamBox, Submanifold};
use quadrature::{integrate_box, negative_intervals, Clip, MultiEstimate, QuadTol};

/// Euclidean volume of the unit `k`-ball, `π^{k/2} / Γ(k/2 + 1)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / k as f64 * unit_ball_volume(k - 2),
    }
}

/// Offsets `1 - r` of the two truncation radii used for tail extrapolation.
pub const DEFAULT_TAIL_GAPS: (f64, f64) = (1e-5, 1e-6);

/// Largest accepted tail, as a fraction of the extrapolated volume.
pub const MAX_TAIL_FRACTION: f64 = 0.01;

/// Tolerated relative disagreement between the Euclidean and hyperbolic routes.
pub const CONVERSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub vol_euclidean: f64,
    pub vol_ideal_boundary: f64,
    pub truncation_radius: f64,
    pub tail_estimate: f64,
    pub quadrature_error: f64,
    /// Relative gap between the Euclidean and hyperbolic-route totals.
    pub conversion_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCurve {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl MonotonicityCurve {
    pub fn new(radii: Vec<f64>, ratios: Vec<f64>) -> Result<Self> {
        if radii.len() != ratios.len() {
            return Err(Error::domain("radii and ratios differ in length"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("radii must be strictly increasing"));
        }
        Ok(MonotonicityCurve { radii, ratios })
    }

    /// Two-column CSV with header `r,ratio`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "ratio"])?;
        for (r, m) in self.radii.iter().zip(&self.ratios) {
            w.write_record([format!("{r:.16e}"), format!("{m:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub point: Vec<f64>,
    pub value: f64,
    pub radii_used: Vec<f64>,
    pub extrapolation_error: f64,
}

/// `1 + cosh ρ` at Euclidean radius `r`, through the hyperbolic distance.
fn one_plus_cosh_rho(r: f64) -> f64 {
    match radius_to_rho(r) {
        Ok(rho) => 1.0 + rho.cosh(),
        Err(_) => f64::INFINITY,
    }
}

/// Euclidean and converted hyperbolic volume elements of a chart at `u`.
fn volume_elements(chart: &Chart, k: usize, u: &[f64]) -> Vec<f64> {
    let x = chart.eval(u);
    let jac = chart.jacobian(u);
    let gram = jac.transpose() * &jac;
    let euclid = gram.determinant().max(0.0).sqrt();
    let r = x.norm();
    if r >= 1.0 {
        return vec![euclid, euclid];
    }
    let lambda = conformal_factor_of_radius(r);
    let hyper = (gram * (lambda * lambda)).determinant().max(0.0).sqrt();
    vec![euclid, hyper / one_plus_cosh_rho(r).powi(k as i32)]
}

fn integrate_chart(chart: &Chart, k: usize, radius: Option<f64>, tol: QuadTol) -> MultiEstimate {
    let integrand = (2usize, |u: &[f64]| volume_elements(chart, k, u));
    let point = |u: &[f64]| chart.eval(u);
    let clip = radius.map(|r| Clip {
        point: &point,
        radius: r,
    });
    integrate_box(&integrand, &chart.domain, clip.as_ref(), tol)
}

/// Sum over charts of `(euclidean, hyperbolic-route, error)` for the part inside `B_radius`.
fn clipped_totals(sigma: &Submanifold, radius: Option<f64>, tol: QuadTol) -> (f64, f64, f64) {
    let parts: Vec<MultiEstimate> = sigma
        .interior_charts
        .par_iter()
        .map(|c| integrate_chart(c, sigma.k, radius, tol))
        .collect();
    parts.iter().fold((0.0, 0.0, 0.0), |acc, e| {
        (
            acc.0 + e.values[0],
            acc.1 + e.values[1],
            acc.2 + e.errors[0],
        )
    })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `Vol_R(Σ ∩ B_r)` with its quadrature error.
pub fn truncated_volume_estimate(sigma: &Submanifold, r: f64, tol: QuadTol) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!(
            "truncation radius {r} outside (0, 1)"
        )));
    }
    let scaled = QuadTol::new(tol.abs * r.powi(sigma.k as i32), tol.rel);
    let (euclid, hyper, err) = clipped_totals(sigma, Some(r), scaled);
    check_finite(euclid, hyper)?;
    if relative_gap(euclid, hyper) > CONVERSION_TOL && (euclid - hyper).abs() > 10.0 * scaled.abs {
        return Err(Error::Chart(format!(
            "volume routes disagree inside B_{r}: {euclid} vs {hyper}"
        )));
    }
    Ok((euclid, err))
}

/// `Vol_R(Σ ∩ B_r)` for `0 < r < 1`.
pub fn truncated_volume(sigma: &Submanifold, r: f64) -> Result<f64> {
    truncated_volume_estimate(sigma, r, QuadTol::default()).map(|v| v.0)
}

fn check_finite(euclid: f64, hyper: f64) -> Result<()> {
    if euclid.is_finite() && hyper.is_finite() {
        Ok(())
    } else {
        Err(Error::Chart("non-finite Gram determinant".into()))
    }
}

/// Euclidean volume of `Σ` with its ideal boundary volume.
///
/// With `truncation_radius = 1` and charts that reach the sphere at infinity
/// the chart domains are integrated directly. Otherwise the volume is
/// extrapolated linearly in `1 - r` from the truncation radius and a second
/// radius ten times further from the sphere.
pub fn euclidean_volume(sigma: &Submanifold, truncation_radius: f64) -> Result<VolumeReport> {
    euclidean_volume_with(sigma, truncation_radius, QuadTol::default())
}

pub fn euclidean_volume_with(
    sigma: &Submanifold,
    truncation_radius: f64,
    tol: QuadTol,
) -> Result<VolumeReport> {
    if !(truncation_radius > 0.0 && truncation_radius <= 1.0) {
        return Err(Error::domain(format!(
            "truncation radius {truncation_radius} outside (0, 1]"
        )));
    }
    let vol_ideal_boundary = if sigma.ideal_charts.is_empty() {
        0.0
    } else {
        ideal_boundary_estimate(sigma, tol)?.0
    };
    let direct = truncation_radius >= 1.0 && sigma.interior_charts.iter().all(|c| c.covers_tail);
    if direct {
        let (euclid, hyper, err) = clipped_totals(sigma, None, tol);
        check_finite(euclid, hyper)?;
        let conversion_residual = relative_gap(euclid, hyper);
        if conversion_residual > CONVERSION_TOL {
            return Err(Error::Chart(format!(
                "volume routes disagree: {euclid} vs {hyper}"
            )));
        }
        return Ok(VolumeReport {
            vol_euclidean: euclid,
            vol_ideal_boundary,
            truncation_radius: 1.0,
            tail_estimate: 0.0,
            quadrature_error: err,
            conversion_residual,
        });
    }
    let near_gap = if truncation_radius < 1.0 {
        1.0 - truncation_radius
    } else {
        DEFAULT_TAIL_GAPS.1
    };
    let far_gap = 10.0 * near_gap;
    if far_gap >= 1.0 {
        return Err(Error::domain(
            "truncation radius too small for tail extrapolation",
        ));
    }
    let scaled = tol;
    let (far_e, far_h, far_err) = clipped_totals(sigma, Some(1.0 - far_gap), scaled);
    let (near_e, near_h, near_err) = clipped_totals(sigma, Some(1.0 - near_gap), scaled);
    check_finite(near_e, near_h)?;
    let extrapolate = |far: f64, near: f64| near + (near - far) * near_gap / (far_gap - near_gap);
    let euclid = extrapolate(far_e, near_e);
    let hyper = extrapolate(far_h, near_h);
    let conversion_residual = relative_gap(euclid, hyper);
    if conversion_residual > CONVERSION_TOL {
        return Err(Error::Chart(format!(
            "volume routes disagree: {euclid} vs {hyper}"
        )));
    }
    let tail = (euclid - near_e).abs();
    if tail > MAX_TAIL_FRACTION * euclid {
        return Err(Error::Truncation(format!(
            "tail {tail:e} exceeds {MAX_TAIL_FRACTION} of the volume {euclid}"
        )));
    }
    Ok(VolumeReport {
        vol_euclidean: euclid,
        vol_ideal_boundary,
        truncation_radius: 1.0 - near_gap,
        tail_estimate: tail,
        // the linear extrapolation leaves an error of order tail · (1 - r_far)
        quadrature_error: far_err + near_err + tail * far_gap,
        conversion_residual,
    })
}

/// `Vol_R(∂_∞Σ)` with its quadrature error.
pub fn ideal_boundary_estimate(sigma: &Submanifold, tol: QuadTol) -> Result<(f64, f64)> {
    if sigma.ideal_charts.is_empty() {
        return Err(Error::domain("submanifold has no ideal boundary charts"));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for chart in &sigma.ideal_charts {
        let integrand = (1usize, |u: &[f64]| {
            vec![gram_determinant(&chart.jacobian(u)).max(0.0).sqrt()]
        });
        let est = integrate_box(&integrand, &chart.domain, None, tol);
        value += est.values[0];
        error += est.errors[0];
    }
    if !value.is_finite() {
        return Err(Error::Chart("non-finite ideal boundary volume".into()));
    }
    Ok((value, error))
}

/// Euclidean volume integrated straight over the chart domains, skipping the
/// hyperbolic cross-check. Used for the many evaluations of an optimizer.
pub(crate) fn direct_volume_estimate(sigma: &Submanifold, tol: QuadTol) -> Result<(f64, f64)> {
    if !sigma.interior_charts.iter().all(|c| c.covers_tail) {
        let report = euclidean_volume_with(sigma, 1.0, tol)?;
        return Ok((report.vol_euclidean, report.quadrature_error));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for chart in &sigma.interior_charts {
        let integrand = (1usize, |u: &[f64]| {
            vec![gram_determinant(&chart.jacobian(u)).max(0.0).sqrt()]
        });
        let est = integrate_box(&integrand, &chart.domain, None, tol);
        value += est.values[0];
        error += est.errors[0];
    }
    if !value.is_finite() {
        return Err(Error::Chart("non-finite Gram determinant".into()));
    }
    Ok((value, error))
}

/// `(k-1)`-dimensional Euclidean volume of the ideal boundary.
pub fn ideal_boundary_volume(sigma: &Submanifold) -> Result<f64> {
    ideal_boundary_estimate(sigma, QuadTol::default()).map(|v| v.0)
}

/// Chebyshev–Lobatto radii on `[lo, hi]`, increasing.
pub fn chebyshev_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                mid - half * (std::f64::consts::PI * i as f64 / (count - 1) as f64).cos()
            }
        })
        .collect()
}

/// Radius range of the monotonicity curve.
pub const MONOTONICITY_RANGE: (f64, f64) = (1e-3, 1.0 - 1e-6);

/// `m(r) = Vol_R(Σ ∩ B_r) / r^k` on Chebyshev-spaced radii.
pub fn monotonicity_curve(sigma: &Submanifold, grid_size: usize) -> Result<MonotonicityCurve> {
    if grid_size < 10 {
        return Err(Error::domain(format!("grid size {grid_size} below 10")));
    }
    let radii = chebyshev_radii(MONOTONICITY_RANGE.0, MONOTONICITY_RANGE.1, grid_size);
    let ratios = radii
        .par_iter()
        .map(|&r| truncated_volume(sigma, r).map(|v| v / r.powi(sigma.k as i32)))
        .collect::<Result<Vec<f64>>>()?;
    MonotonicityCurve::new(radii, ratios)
}

/// Radii at which the recentred volume ratio is sampled for densities.
pub const DENSITY_RADII: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Density `Θ(Σ, p)`: `Σ` is moved by the isometry taking `p` to the origin,
/// where Euclidean and hyperbolic balls coincide, and `m(r)/ω_k` is
/// extrapolated to `r = 0` by a least-squares line in `r²`.
pub fn density(sigma: &Submanifold, p: &BallPoint) -> Result<DensityEstimate> {
    if p.dim() != sigma.n {
        return Err(Error::domain(
            "point dimension differs from the ambient dimension",
        ));
    }
    if sigma.locate(p.coords(), 1e-8).is_none() {
        return Err(Error::domain("point does not lie on the submanifold"));
    }
    let recenter = MobiusMap::translate(-p.coords())?;
    let moved = mobius_image(sigma, &recenter)?;
    let omega = unit_ball_volume(sigma.k);
    let tol = QuadTol::new(1e-16, 1e-12);
    let mut samples = Vec::with_capacity(DENSITY_RADII.len());
    let mut quad_err: f64 = 0.0;
    for &r in &DENSITY_RADII {
        let (v, e) = truncated_volume_estimate(&moved, r, tol)?;
        let scale = omega * r.powi(sigma.k as i32);
        samples.push((r * r, v / scale));
        quad_err = quad_err.max(e / scale);
    }
    let (intercept, slope) = least_squares_line(&samples);
    let residual = samples
        .iter()
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(DensityEstimate {
        point: p.coords().iter().copied().collect(),
        value: intercept,
        radii_used: DENSITY_RADII.to_vec(),
        extrapolation_error: residual + quad_err,
    })
}

fn least_squares_line(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// `|∇_Σ ρ|²` for the hyperbolic distance from the origin: the squared length
/// of the tangential part of the radial unit vector.
pub fn grad_rho_sq(x: &DVector<f64>, jac: &DMatrix<f64>) -> f64 {
    let r = x.norm();
    if r == 0.0 {
        return 1.0;
    }
    let radial = x / r;
    let gram = jac.transpose() * jac;
    let rhs = jac.transpose() * &radial;
    match gram.cholesky() {
        Some(ch) => rhs.dot(&ch.solve(&rhs)).clamp(0.0, 1.0),
        None => f64::NAN,
    }
}

/// Per-cell comparison of two routes to the same integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub chart: usize,
    pub direct: f64,
    pub converted: f64,
}

impl CellComparison {
    pub fn relative_gap(&self) -> f64 {
        relative_gap(self.direct, self.converted)
    }
}

fn grid_cells(domain: &ParamBox, per_dim: usize) -> Vec<ParamBox> {
    let k = domain.dim();
    let total = per_dim.pow(k as u32);
    (0..total)
        .map(|idx| {
            let mut rem = idx;
            let mut lo = Vec::with_capacity(k);
            let mut hi = Vec::with_capacity(k);
            for i in 0..k {
                let j = rem % per_dim;
                rem /= per_dim;
                let w = domain.width(i) / per_dim as f64;
                lo.push(domain.lo[i] + j as f64 * w);
                hi.push(domain.lo[i] + (j + 1) as f64 * w);
            }
            ParamBox::new(lo, hi)
        })
        .collect()
}

/// `∫ dV_R` against `∫ ((1-r²)/2)^k dV_H` on a grid of chart cells.
pub fn conversion_identity_cells(sigma: &Submanifold, per_dim: usize) -> Vec<CellComparison> {
    let tol = QuadTol::new(1e-15, 1e-12);
    let mut out = Vec::new();
    for (ci, chart) in sigma.interior_charts.iter().enumerate() {
        for cell in grid_cells(&chart.domain, per_dim) {
            let integrand = (2usize, |u: &[f64]| {
                let x = chart.eval(u);
                let jac = chart.jacobian(u);
                let gram = jac.transpose() * &jac;
                let r = x.norm();
                let lambda = conformal_factor_of_radius(r);
                let hyper = (gram.clone() * (lambda * lambda))
                    .determinant()
                    .max(0.0)
                    .sqrt();
                let weight = (crate::ball::one_minus_sq(r) / 2.0).powi(sigma.k as i32);
                vec![gram.determinant().max(0.0).sqrt(), weight * hyper]
            });
            let est = integrate_box(&integrand, &cell, None, tol);
            out.push(CellComparison {
                chart: ci,
                direct: est.values[0],
                converted: est.values[1],
            });
        }
    }
    out
}

/// A point of `∂Σ_r = Σ ∩ {|x| = r}` inside one chart together with the
/// tangent frame of the level set.
struct LevelPoint {
    x: DVector<f64>,
    tangent: DMatrix<f64>,
    jac: DMatrix<f64>,
}

/// Level-set points of `|x| = r` on the dimension-0 slice through `v`.
fn level_points(chart: &Chart, v: &[f64], r: f64) -> Vec<LevelPoint> {
    let k = chart.dim();
    let mut u: Vec<f64> = std::iter::once(0.0).chain(v.iter().copied()).collect();
    let intervals = negative_intervals(
        |t| {
            u[0] = t;
            chart.eval(&u).norm() - r
        },
        chart.domain.lo[0],
        chart.domain.hi[0],
    );
    let mut roots = Vec::new();
    for (a, b) in intervals {
        for t in [a, b] {
            if t > chart.domain.lo[0] && t < chart.domain.hi[0] {
                roots.push(t);
            }
        }
    }
    roots
        .into_iter()
        .map(|t| {
            u[0] = t;
            let x = chart.eval(&u);
            let jac = chart.jacobian(&u);
            let radial_rate = x.dot(&jac.column(0));
            let mut tangent = DMatrix::zeros(x.len(), k - 1);
            for j in 1..k {
                let du0 = -x.dot(&jac.column(j)) / radial_rate;
                tangent.set_column(j - 1, &(jac.column(j) + jac.column(0) * du0));
            }
            LevelPoint { x, tangent, jac }
        })
        .collect()
}

/// Integrates `f` over the level set `Σ ∩ {|x| = r}` of every chart, slicing
/// along parameter dimension 0. Requires `k ≥ 2`.
fn level_set_integral<F>(
    sigma: &Submanifold,
    r: f64,
    components: usize,
    per_dim: usize,
    f: F,
) -> Vec<Vec<f64>>
where
    F: Fn(&LevelPoint) -> Vec<f64> + Sync,
{
    let tol = QuadTol::new(1e-15, 1e-12);
    let mut cells = Vec::new();
    for chart in &sigma.interior_charts {
        let rest = ParamBox::new(chart.domain.lo[1..].to_vec(), chart.domain.hi[1..].to_vec());
        for cell in grid_cells(&rest, per_dim) {
            let integrand = (components, |v: &[f64]| {
                let mut acc = vec![0.0; components];
                for lp in level_points(chart, v, r) {
                    for (a, b) in acc.iter_mut().zip(f(&lp)) {
                        *a += b;
                    }
                }
                acc
            });
            cells.push(integrate_box(&integrand, &cell, None, tol).values);
        }
    }
    cells
}

/// Boundary volume form on `∂Σ_r`: the induced hyperbolic `dσ_H` against
/// `(sinh ρ / r)^{k-1} dσ_R`, per cell of the level-set parametrization.
pub fn boundary_form_cells(
    sigma: &Submanifold,
    r: f64,
    per_dim: usize,
) -> Result<Vec<CellComparison>> {
    if sigma.k < 2 {
        return Err(Error::domain("boundary forms need k ≥ 2"));
    }
    let rho = radius_to_rho(r)?;
    let factor = (rho.sinh() / r).powi(sigma.k as i32 - 1);
    let cells = level_set_integral(sigma, r, 2, per_dim, |lp| {
        let gram = lp.tangent.transpose() * &lp.tangent;
        let lambda = conformal_factor_of_radius(lp.x.norm());
        let hyper = (gram.clone() * (lambda * lambda))
            .determinant()
            .max(0.0)
            .sqrt();
        vec![hyper, factor * gram.determinant().max(0.0).sqrt()]
    });
    Ok(cells
        .into_iter()
        .map(|v| CellComparison {
            chart: 0,
            direct: v[0],
            converted: v[1],
        })
        .collect())
}

/// `Vol_R(∂Σ_r)`, the Euclidean volume of the clip boundary.
pub fn clip_boundary_volume(sigma: &Submanifold, r: f64) -> Result<f64> {
    if sigma.k < 2 {
        return Err(Error::domain("clip boundary volume needs k ≥ 2"));
    }
    let cells = level_set_integral(sigma, r, 1, 4, |lp| {
        let gram = lp.tangent.transpose() * &lp.tangent;
        vec![gram.determinant().max(0.0).sqrt()]
    });
    Ok(cells.iter().map(|v| v[0]).sum())
}

/// Both sides of the coarea identity
/// `d/dρ ∫_{Σ∩B_ρ} w |∇_Σρ|² dV_H = ∫_{∂(Σ∩B_ρ)} w |∇_Σρ| dσ_H`, `w = (1 + cosh ρ)^{-k}`.
/// The derivative uses a five-point stencil of step `h` in `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaCheck {
    pub rho: f64,
    pub derivative: f64,
    pub boundary_integral: f64,
}

pub fn coarea_check(sigma: &Submanifold, rho: f64, h: f64) -> Result<CoareaCheck> {
    if sigma.k < 2 {
        return Err(Error::domain("coarea check needs k ≥ 2"));
    }
    if !(rho > 2.0 * h) {
        return Err(Error::domain("ρ must exceed twice the stencil step"));
    }
    let k = sigma.k as i32;
    let tol = QuadTol::new(1e-16, 1e-13);
    let weighted = |rr: f64| -> Result<f64> {
        let r = crate::ball::rho_to_radius(rr)?;
        let mut total = 0.0;
        for chart in &sigma.interior_charts {
            let integrand = (1usize, |u: &[f64]| {
                let x = chart.eval(u);
                let jac = chart.jacobian(u);
                let gram = jac.transpose() * &jac;
                let lambda = conformal_factor_of_radius(x.norm());
                let dv_h = (gram * (lambda * lambda)).determinant().max(0.0).sqrt();
                let g2 = grad_rho_sq(&x, &jac);
                let g2 = if g2.is_finite() { g2 } else { 0.0 };
                vec![g2 * dv_h / one_plus_cosh_rho(x.norm()).powi(k)]
            });
            let point = |u: &[f64]| chart.eval(u);
            let clip = Clip {
                point: &point,
                radius: r,
            };
            total += integrate_box(&integrand, &chart.domain, Some(&clip), tol).values[0];
        }
        Ok(total)
    };
    let derivative = (-weighted(rho + 2.0 * h)? + 8.0 * weighted(rho + h)?
        - 8.0 * weighted(rho - h)?
        + weighted(rho - 2.0 * h)?)
        / (12.0 * h);
    let r = crate::ball::rho_to_radius(rho)?;
    let w = 1.0 / (1.0 + rho.cosh()).powi(k);
    let cells = level_set_integral(sigma, r, 1, 4, |lp| {
        let gram = lp.tangent.transpose() * &lp.tangent;
        let lambda = conformal_factor_of_radius(lp.x.norm());
        let sigma_h = (gram * (lambda * lambda)).determinant().max(0.0).sqrt();
        let g = grad_rho_sq(&lp.x, &lp.jac).sqrt();
        vec![w * g * sigma_h]
    });
    Ok(CoareaCheck {
        rho,
        derivative,
        boundary_integral: cells.iter().map(|v| v[0]).sum(),
    })
}
