//! Intrinsic Laplacians of radial functions on chart samples.
//!
//! On a chart `u ↦ x(u)` the induced hyperbolic metric is `g = λ² JᵀJ` with
//! `λ = 2 / (1 - |x|²)`, and `Δf = g^{-1/2} ∂_i (g^{1/2} g^{ij} ∂_j f)`. The
//! gradient `∂_j ρ = λ (x/|x|)·J_j` is exact; only the outer divergence is a
//! central difference.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{InequalityVerdict, TheoremId};
use crate::ball::conformal_factor_of_radius;
use crate::error::{Error, Result};
use crate::families::{Chart, Submanifold};

/// Step of the central difference for the divergence.
pub const LAPLACIAN_STEP: f64 = 1e-4;

/// Tolerance for the inequality and for the distance-function identity.
pub const LAPLACIAN_TOL: f64 = 1e-4;

/// Tolerance for the equality case.
pub const EQUALITY_TOL: f64 = 1e-5;

/// Samples with `||∇ρ| - 1|` below this are expected to realize equality.
pub const UNIT_GRADIENT_TOL: f64 = 1e-6;

/// Fraction of each parameter range kept clear at the chart edges.
const EDGE_MARGIN: f64 = 0.05;

/// Least distance from a chart edge, in stencil steps. Charts that degenerate
/// at an edge (polar origins, the far end of a catenoid) vary on the scale of
/// the distance to that edge, so the stencil must be much smaller.
const EDGE_CLEARANCE_STEPS: f64 = 100.0;

/// Radius window for samples: `ρ` is not smooth at the origin, and the
/// stencil loses accuracy as the conformal factor blows up.
const RADIUS_WINDOW: (f64, f64) = (0.05, 0.999);

const MAX_DRAWS_PER_SAMPLE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianSample {
    pub chart: usize,
    pub param: Vec<f64>,
    pub rho: f64,
    pub grad_rho: f64,
    pub laplacian_rho: f64,
    pub laplacian_f: f64,
    /// `-k(k-1) (1 + cosh ρ)^{-k}`.
    pub bound: f64,
    /// `|Δρ - coth ρ (k - |∇ρ|²)|`.
    pub identity_residual: f64,
}

impl LaplacianSample {
    /// `Δf - bound`, nonpositive when the inequality holds.
    pub fn excess(&self) -> f64 {
        self.laplacian_f - self.bound
    }

    pub fn has_unit_gradient(&self) -> bool {
        (self.grad_rho - 1.0).abs() < UNIT_GRADIENT_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianReport {
    pub samples: Vec<LaplacianSample>,
    /// Inequality verdict: `lhs = max(Δf - bound)`, `rhs = 0`.
    pub verdict: InequalityVerdict,
    pub max_identity_residual: f64,
    /// Largest `|Δf - bound|` over samples with unit gradient; zero if there are none.
    pub max_equality_residual: f64,
    pub unit_gradient_samples: usize,
    /// Samples without unit gradient whose measured gap is nevertheless
    /// indistinguishable from zero.
    pub spurious_equalities: usize,
}

impl LaplacianReport {
    pub fn identity_holds(&self) -> bool {
        self.max_identity_residual < LAPLACIAN_TOL
    }

    pub fn equality_case_holds(&self) -> bool {
        self.max_equality_residual < EQUALITY_TOL && self.spurious_equalities == 0
    }

    /// The inequality, the identity for `Δρ`, and the equality characterization all hold.
    pub fn passed(&self) -> bool {
        self.verdict.pass && self.identity_holds() && self.equality_case_holds()
    }
}

/// Induced-metric data at a chart point; `flux` is `√det g · g^{ij} ∂_j ρ`.
struct Local {
    sqrt_det: f64,
    flux: DVector<f64>,
    grad_sq: f64,
    x: DVector<f64>,
}

fn local(chart: &Chart, u: &[f64]) -> Option<Local> {
    let x = chart.eval(u);
    let r = x.norm();
    if !(r > 0.0 && r < 1.0) {
        return None;
    }
    let jac: DMatrix<f64> = chart.jacobian(u);
    let lambda = conformal_factor_of_radius(r);
    let k = jac.ncols() as i32;
    let euclid = jac.transpose() * &jac;
    let det = euclid.determinant();
    if !(det > 0.0) {
        return None;
    }
    let sqrt_det = lambda.powi(k) * det.sqrt();
    let drho = jac.transpose() * (&x * (lambda / r));
    let inv = euclid.cholesky()?;
    let raised = inv.solve(&drho) / (lambda * lambda);
    let grad_sq = drho.dot(&raised);
    Some(Local {
        sqrt_det,
        flux: raised * sqrt_det,
        grad_sq,
        x,
    })
}

fn rho_of_radius(r: f64) -> f64 {
    r.ln_1p() - (-r).ln_1p()
}

/// `F'(ρ)` for `F = (1 + cosh ρ)^{1-k}`.
fn weight_derivative(k: f64, rho: f64) -> f64 {
    (1.0 - k) * rho.sinh() * (1.0 + rho.cosh()).powf(-k)
}

/// `(Δρ, Δf, |∇ρ|, ρ)` at `u`, both Laplacians by the same divergence stencil.
fn laplacians(chart: &Chart, u: &[f64], h: f64) -> Option<(f64, f64, f64, f64)> {
    let k = u.len() as f64;
    let centre = local(chart, u)?;
    let (mut div_rho, mut div_f) = (0.0, 0.0);
    let mut v = u.to_vec();
    for i in 0..u.len() {
        v[i] = u[i] + h;
        let plus = local(chart, &v)?;
        v[i] = u[i] - h;
        let minus = local(chart, &v)?;
        v[i] = u[i];
        div_rho += (plus.flux[i] - minus.flux[i]) / (2.0 * h);
        let wp = weight_derivative(k, rho_of_radius(plus.x.norm()));
        let wm = weight_derivative(k, rho_of_radius(minus.x.norm()));
        div_f += (wp * plus.flux[i] - wm * minus.flux[i]) / (2.0 * h);
    }
    let rho = rho_of_radius(centre.x.norm());
    Some((
        div_rho / centre.sqrt_det,
        div_f / centre.sqrt_det,
        centre.grad_sq.max(0.0).sqrt(),
        rho,
    ))
}

/// Evaluate the lemma quantities at one chart point.
pub fn laplacian_sample(sigma: &Submanifold, chart: usize, u: &[f64]) -> Option<LaplacianSample> {
    let c = sigma.interior_charts.get(chart)?;
    let (lap_rho, laplacian_f, grad, rho) = laplacians(c, u, LAPLACIAN_STEP)?;
    let k = sigma.k as f64;
    let bound = -k * (k - 1.0) * (1.0 + rho.cosh()).powf(-k);
    let identity_residual = (lap_rho - (k - grad * grad) / rho.tanh()).abs();
    Some(LaplacianSample {
        chart,
        param: u.to_vec(),
        rho,
        grad_rho: grad,
        laplacian_rho: lap_rho,
        laplacian_f,
        bound,
        identity_residual,
    })
}

/// Draw `sample_count` chart points away from chart edges, the origin, and
/// the sphere at infinity; rejected draws are resampled.
pub fn laplacian_samples(
    sigma: &Submanifold,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<LaplacianSample>> {
    let clearance = |w: f64| (EDGE_MARGIN * w).max(EDGE_CLEARANCE_STEPS * LAPLACIAN_STEP);
    let charts: Vec<usize> = (0..sigma.interior_charts.len())
        .filter(|&i| {
            let dom = &sigma.interior_charts[i].domain;
            dom.dim() > 0 && (0..dom.dim()).all(|j| 2.0 * clearance(dom.width(j)) < dom.width(j))
        })
        .collect();
    if charts.is_empty() {
        return Err(Error::domain("no interior chart is wide enough to sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(sample_count);
    let mut draws = 0;
    while out.len() < sample_count {
        draws += 1;
        if draws > MAX_DRAWS_PER_SAMPLE * sample_count.max(1) {
            return Err(Error::Convergence(format!(
                "only {} of {sample_count} admissible Laplacian samples found",
                out.len()
            )));
        }
        let ci = charts[rng.gen_range(0..charts.len())];
        let dom = &sigma.interior_charts[ci].domain;
        let u: Vec<f64> = (0..dom.dim())
            .map(|i| {
                let (w, c) = (dom.width(i), clearance(dom.width(i)));
                dom.lo[i] + c + (w - 2.0 * c) * rng.gen::<f64>()
            })
            .collect();
        let r = sigma.interior_charts[ci].eval(&u).norm();
        if !(r > RADIUS_WINDOW.0 && r < RADIUS_WINDOW.1) {
            continue;
        }
        if let Some(s) = laplacian_sample(sigma, ci, &u) {
            if s.laplacian_f.is_finite() && s.identity_residual.is_finite() {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// The Laplacian comparison on random samples, with the identity for `Δρ`
/// and the equality characterization checked alongside.
pub fn check_laplacian_lemma(
    sigma: &Submanifold,
    sample_count: usize,
    seed: u64,
) -> Result<LaplacianReport> {
    let samples = laplacian_samples(sigma, sample_count, seed)?;
    Ok(summarize(sigma.k, samples))
}

fn summarize(k: usize, samples: Vec<LaplacianSample>) -> LaplacianReport {
    let k = k as f64;
    let excess = samples
        .iter()
        .map(|s| s.excess())
        .fold(f64::NEG_INFINITY, f64::max);
    let max_identity_residual = samples
        .iter()
        .map(|s| s.identity_residual)
        .fold(0.0, f64::max);
    let unit: Vec<&LaplacianSample> = samples.iter().filter(|s| s.has_unit_gradient()).collect();
    let max_equality_residual = unit.iter().map(|s| s.excess().abs()).fold(0.0, f64::max);
    // Away from unit gradient the gap is k(k-1)(c-1)(1-|∇ρ|²)/(1+c)^k > 0;
    // only count samples where that gap is resolvable yet not observed.
    let spurious_equalities = samples
        .iter()
        .filter(|s| !s.has_unit_gradient())
        .filter(|s| {
            let c = s.rho.cosh();
            let predicted =
                k * (k - 1.0) * (c - 1.0) * (1.0 - s.grad_rho * s.grad_rho) / (1.0 + c).powf(k);
            predicted > EQUALITY_TOL && -s.excess() < EQUALITY_TOL
        })
        .count();
    let lhs = if samples.is_empty() { 0.0 } else { excess };
    let verdict = InequalityVerdict::at_most(
        TheoremId::LaplacianLemma,
        lhs,
        0.0,
        LAPLACIAN_TOL,
        format!(
            "{} samples, {} with unit gradient; identity residual {:.3e}; equality residual {:.3e}",
            samples.len(),
            unit.len(),
            max_identity_residual,
            max_equality_residual
        ),
    );
    LaplacianReport {
        verdict,
        max_identity_residual,
        max_equality_residual,
        unit_gradient_samples: unit.len(),
        spurious_equalities,
        samples,
    }
}
