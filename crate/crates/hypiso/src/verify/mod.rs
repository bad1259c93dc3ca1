//! Verdicts for the isoperimetric, monotonicity, Laplacian and Möbius-volume
//! inequalities satisfied by complete proper minimal submanifolds of the ball.
//!
//! Every verdict records both sides of the comparison and a slack oriented so
//! that a nonnegative slack means the inequality holds. Tolerances come from
//! the measured quadrature or optimizer error, never from a bare constant, so
//! that equality cases do not fail on discretization noise.

mod laplacian;
mod mobius_volume;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::Submanifold;
use crate::measure::{
    density, euclidean_volume, ideal_boundary_estimate, unit_ball_volume, DensityEstimate,
    MonotonicityCurve, VolumeReport,
};

pub use laplacian::{
    check_laplacian_lemma, laplacian_sample, laplacian_samples, LaplacianReport, LaplacianSample,
    EQUALITY_TOL, LAPLACIAN_STEP, LAPLACIAN_TOL, UNIT_GRADIENT_TOL,
};
pub use mobius_volume::{
    mobius_volume, MobiusConfig, MobiusTarget, MobiusVolumeResult, OptimizerStep,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// `Vol(Σ) ≤ Vol(∂_∞Σ) / k`.
    LinearIsop,
    /// `kᵏ ω_k Vol(Σ)^{k-1} ≤ Vol(∂_∞Σ)ᵏ` when `Vol(∂_∞Σ) ≥ k ω_k`.
    ClassicalIsop,
    /// The reverse of `ClassicalIsop` for totally geodesic caps.
    ReverseTG,
    /// `Vol(Σ ∩ B_r) / rᵏ` is nondecreasing.
    Monotonicity,
    /// `Vol(Σ) ≥ ω_k` when Σ passes through the origin.
    VolumeLowerBound,
    /// `Vol_M(∂_∞Σ) ≥ k ω_k`.
    MobiusBoundary,
    /// `Vol_M(∂_∞Σ) ≥ k ω_k max_p Θ(Σ, p)`.
    MobiusDensity,
    /// `kᵏ ω_k Vol_M(Σ)^{k-1} ≤ Vol_M(∂_∞Σ)ᵏ`.
    MobiusIsop,
    /// `Δ_Σ (1 + cosh ρ)^{1-k} ≤ -k(k-1) (1 + cosh ρ)^{-k}` with its equality case.
    LaplacianLemma,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::LinearIsop,
        TheoremId::ClassicalIsop,
        TheoremId::ReverseTG,
        TheoremId::Monotonicity,
        TheoremId::VolumeLowerBound,
        TheoremId::MobiusBoundary,
        TheoremId::MobiusDensity,
        TheoremId::MobiusIsop,
        TheoremId::LaplacianLemma,
    ];
}

/// Outcome of one comparison. `pass` is always `slack ≥ -tolerance`; when the
/// hypothesis of the inequality fails the verdict is marked `not_applicable`
/// and should not count as a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub theorem_id: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub not_applicable: bool,
    pub notes: String,
}

impl InequalityVerdict {
    /// Verdict for `lhs ≤ rhs`.
    pub fn at_most(
        theorem_id: TheoremId,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let slack = rhs - lhs;
        InequalityVerdict {
            theorem_id,
            lhs,
            rhs,
            slack,
            pass: slack >= -tolerance,
            tolerance,
            not_applicable: false,
            notes: notes.into(),
        }
    }

    /// Verdict for `lhs ≥ rhs`.
    pub fn at_least(
        theorem_id: TheoremId,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let mut v = Self::at_most(theorem_id, rhs, lhs, tolerance, notes);
        std::mem::swap(&mut v.lhs, &mut v.rhs);
        v
    }

    fn mark_not_applicable(mut self, why: &str) -> Self {
        self.not_applicable = true;
        self.notes = if self.notes.is_empty() {
            why.to_string()
        } else {
            format!("{why}; {}", self.notes)
        };
        self
    }

    /// True unless the verdict is an applicable failure.
    pub fn acceptable(&self) -> bool {
        self.not_applicable || self.pass
    }
}

/// Floor added to every tolerance, relative to the compared magnitudes.
pub const RELATIVE_FLOOR: f64 = 1e-12;

/// Ten times the propagated error plus a relative floor.
pub fn verdict_tolerance(error: f64, scale: f64) -> f64 {
    10.0 * error + RELATIVE_FLOOR * scale.abs()
}

/// Volumes of `Σ` and `∂_∞Σ` with their quadrature errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurements {
    pub k: usize,
    pub volume: VolumeReport,
    pub ideal_error: f64,
}

impl Measurements {
    pub fn vol(&self) -> f64 {
        self.volume.vol_euclidean
    }

    pub fn vol_error(&self) -> f64 {
        self.volume.quadrature_error
    }

    pub fn boundary(&self) -> f64 {
        self.volume.vol_ideal_boundary
    }
}

pub fn measure(sigma: &Submanifold, truncation_radius: f64) -> Result<Measurements> {
    let volume = euclidean_volume(sigma, truncation_radius)?;
    let ideal_error = if sigma.ideal_charts.is_empty() {
        0.0
    } else {
        ideal_boundary_estimate(sigma, Default::default())?.1
    };
    Ok(Measurements {
        k: sigma.k,
        volume,
        ideal_error,
    })
}

pub fn check_linear_isoperimetric(sigma: &Submanifold) -> Result<InequalityVerdict> {
    Ok(linear_isoperimetric_verdict(&measure(sigma, 1.0)?))
}

pub fn linear_isoperimetric_verdict(m: &Measurements) -> InequalityVerdict {
    let k = m.k as f64;
    let lhs = m.vol();
    let rhs = m.boundary() / k;
    let tol = verdict_tolerance(m.vol_error() + m.ideal_error / k, lhs.max(rhs));
    InequalityVerdict::at_most(TheoremId::LinearIsop, lhs, rhs, tol, "")
}

/// `(lhs, rhs, propagated error)` of `kᵏ ω_k V^{k-1}` against `Bᵏ`.
fn classical_sides(m: &Measurements) -> (f64, f64, f64) {
    let k = m.k as i32;
    let c = (m.k as f64).powi(k) * unit_ball_volume(m.k);
    let (v, b) = (m.vol(), m.boundary());
    let lhs = c * v.powi(k - 1);
    let rhs = b.powi(k);
    let err = c * (k - 1) as f64 * v.powi((k - 2).max(0)) * m.vol_error()
        + k as f64 * b.powi(k - 1) * m.ideal_error;
    (lhs, rhs, err)
}

pub fn check_classical_isoperimetric(sigma: &Submanifold) -> Result<InequalityVerdict> {
    Ok(classical_isoperimetric_verdict(&measure(sigma, 1.0)?))
}

pub fn classical_isoperimetric_verdict(m: &Measurements) -> InequalityVerdict {
    let (lhs, rhs, err) = classical_sides(m);
    let tol = verdict_tolerance(err, lhs.max(rhs));
    let verdict = InequalityVerdict::at_most(TheoremId::ClassicalIsop, lhs, rhs, tol, "");
    let sphere = m.k as f64 * unit_ball_volume(m.k);
    let hyp_tol = verdict_tolerance(m.ideal_error, sphere);
    if m.boundary() < sphere - hyp_tol {
        verdict.mark_not_applicable("ideal boundary smaller than the unit sphere")
    } else {
        verdict
    }
}

pub fn check_reverse_totally_geodesic(sigma: &Submanifold) -> Result<InequalityVerdict> {
    if !sigma.totally_geodesic {
        return Err(Error::domain(
            "reverse inequality needs a totally geodesic submanifold",
        ));
    }
    Ok(reverse_totally_geodesic_verdict(&measure(sigma, 1.0)?))
}

pub fn reverse_totally_geodesic_verdict(m: &Measurements) -> InequalityVerdict {
    let (lhs, rhs, err) = classical_sides(m);
    let tol = verdict_tolerance(err, lhs.max(rhs));
    InequalityVerdict::at_least(TheoremId::ReverseTG, lhs, rhs, tol, "")
}

/// Tolerance on decreases of the monotonicity ratio.
pub const MONOTONICITY_TOL: f64 = 1e-8;

pub fn check_monotonicity(curve: &MonotonicityCurve) -> InequalityVerdict {
    let (mut worst, mut at) = (f64::NEG_INFINITY, 0);
    for (i, w) in curve.ratios.windows(2).enumerate() {
        if w[0] - w[1] > worst {
            worst = w[0] - w[1];
            at = i;
        }
    }
    if curve.ratios.len() < 2 {
        worst = 0.0;
    }
    let notes = if curve.ratios.len() >= 2 {
        format!(
            "largest decrease between r = {:.6e} and r = {:.6e}",
            curve.radii[at],
            curve.radii[at + 1]
        )
    } else {
        String::new()
    };
    InequalityVerdict::at_most(TheoremId::Monotonicity, worst, 0.0, MONOTONICITY_TOL, notes)
}

pub fn check_volume_lower_bound(sigma: &Submanifold) -> Result<InequalityVerdict> {
    Ok(volume_lower_bound_verdict(sigma, &measure(sigma, 1.0)?))
}

pub fn volume_lower_bound_verdict(sigma: &Submanifold, m: &Measurements) -> InequalityVerdict {
    let omega = unit_ball_volume(m.k);
    let tol = verdict_tolerance(m.vol_error(), omega.max(m.vol()));
    let verdict = InequalityVerdict::at_most(TheoremId::VolumeLowerBound, omega, m.vol(), tol, "");
    if sigma.contains_origin {
        verdict
    } else {
        verdict.mark_not_applicable("submanifold does not pass through the origin")
    }
}

/// Densities at the candidate points of `Σ`.
pub fn candidate_densities(sigma: &Submanifold) -> Result<Vec<DensityEstimate>> {
    sigma
        .candidate_density_points
        .iter()
        .map(|p| density(sigma, p))
        .collect()
}

/// Largest density over the candidates with its error; at least one.
pub fn max_density(densities: &[DensityEstimate]) -> (f64, f64) {
    densities
        .iter()
        .map(|d| (d.value, d.extrapolation_error))
        .fold((1.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

/// `Vol_M(∂_∞Σ) ≥ k ω_k`. The optimizer only bounds the supremum from below,
/// so a failing comparison is retried with four times as many restarts.
pub fn check_mobius_boundary_bound(
    sigma: &Submanifold,
    config: &MobiusConfig,
) -> Result<InequalityVerdict> {
    let (verdict, _) = mobius_lower_bound(sigma, config, 1.0, 0.0, TheoremId::MobiusBoundary)?;
    Ok(verdict)
}

/// `Vol_M(∂_∞Σ) ≥ k ω_k max_p Θ(Σ, p)` over the candidate density points.
pub fn check_mobius_density_bound(
    sigma: &Submanifold,
    config: &MobiusConfig,
) -> Result<InequalityVerdict> {
    let dens = candidate_densities(sigma)?;
    let (theta, theta_err) = max_density(&dens);
    let (verdict, _) =
        mobius_lower_bound(sigma, config, theta, theta_err, TheoremId::MobiusDensity)?;
    Ok(verdict)
}

/// Shared body of the two boundary bounds, also returning the optimizer result.
pub fn mobius_lower_bound(
    sigma: &Submanifold,
    config: &MobiusConfig,
    theta: f64,
    theta_err: f64,
    id: TheoremId,
) -> Result<(InequalityVerdict, MobiusVolumeResult)> {
    let result = mobius_volume(sigma, MobiusTarget::IdealBoundary, config)?;
    escalate_boundary_bound(sigma, config, result, theta, theta_err, id)
}

/// Verdict from an existing boundary optimization, rerun with four times the
/// restarts if it fails.
pub fn escalate_boundary_bound(
    sigma: &Submanifold,
    config: &MobiusConfig,
    result: MobiusVolumeResult,
    theta: f64,
    theta_err: f64,
    id: TheoremId,
) -> Result<(InequalityVerdict, MobiusVolumeResult)> {
    let verdict = boundary_bound_verdict(sigma.k, &result, config, theta, theta_err, id);
    if verdict.pass {
        return Ok((verdict, result));
    }
    let escalated = MobiusConfig {
        restarts: 4 * config.restarts,
        ..config.clone()
    };
    let result = mobius_volume(sigma, MobiusTarget::IdealBoundary, &escalated)?;
    let mut verdict = boundary_bound_verdict(sigma.k, &result, &escalated, theta, theta_err, id);
    verdict.notes = format!(
        "escalated to {} restarts; {}",
        escalated.restarts, verdict.notes
    );
    Ok((verdict, result))
}

pub fn boundary_bound_verdict(
    k: usize,
    result: &MobiusVolumeResult,
    config: &MobiusConfig,
    theta: f64,
    theta_err: f64,
    id: TheoremId,
) -> InequalityVerdict {
    let sphere = k as f64 * unit_ball_volume(k);
    let lhs = sphere * theta;
    let rhs = result.value;
    let err = config.tolerance * rhs.abs() + sphere * theta_err + result.quadrature_error;
    let mut notes = String::from("Vol_M is a lower bound from the optimizer");
    if id == TheoremId::MobiusDensity {
        notes.push_str(&format!(
            "; density {theta:.9} is the maximum over candidate points only"
        ));
    }
    if !result.converged {
        notes.push_str("; optimizer did not converge");
    }
    InequalityVerdict::at_most(id, lhs, rhs, verdict_tolerance(err, lhs.max(rhs)), notes)
}

/// `kᵏ ω_k Vol_M(Σ)^{k-1} ≤ Vol_M(∂_∞Σ)ᵏ` from two optimizer results.
pub fn mobius_isoperimetric_verdict(
    k: usize,
    interior: &MobiusVolumeResult,
    boundary: &MobiusVolumeResult,
    config: &MobiusConfig,
) -> InequalityVerdict {
    let c = (k as f64).powi(k as i32) * unit_ball_volume(k);
    let lhs = c * interior.value.powi(k as i32 - 1);
    let rhs = boundary.value.powi(k as i32);
    let rel = config.tolerance * (k as f64 - 1.0).max(1.0) + config.tolerance * k as f64;
    let tol = 10.0 * rel * lhs.max(rhs) + RELATIVE_FLOOR * lhs.max(rhs);
    let mut notes = String::from(
        "both Möbius volumes are optimizer lower bounds; the left side may be underestimated",
    );
    if !(interior.converged && boundary.converged) {
        notes.push_str("; optimizer did not converge");
    }
    InequalityVerdict::at_most(TheoremId::MobiusIsop, lhs, rhs, tol, notes)
}

pub fn check_mobius_isoperimetric(
    sigma: &Submanifold,
    config: &MobiusConfig,
) -> Result<InequalityVerdict> {
    let interior = mobius_volume(sigma, MobiusTarget::Submanifold, config)?;
    let boundary = mobius_volume(sigma, MobiusTarget::IdealBoundary, config)?;
    Ok(mobius_isoperimetric_verdict(
        sigma.k, &interior, &boundary, config,
    ))
}
