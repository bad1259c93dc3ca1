//! Lower bounds for the Möbius volume `sup_g Vol_R(g(Σ))` by multi-start
//! Nelder–Mead over translations.
//!
//! Rotations preserve Euclidean volume exactly, so the search runs over the
//! translation part `a ∈ Bⁿ` only, written as `a = tanh(|w|/2) ŵ` with `w`
//! unconstrained. Restart 0 starts at the identity so the result never falls
//! below `Vol_R(Σ)`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::MobiusMap;
use crate::error::{Error, Result};
use crate::families::{mobius_image_charts, Submanifold};
use crate::measure::quadrature::QuadTol;
use crate::measure::{direct_volume_estimate, ideal_boundary_estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobiusTarget {
    Submanifold,
    #[serde(rename = "boundary", alias = "ideal-boundary")]
    IdealBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobiusConfig {
    pub restarts: usize,
    pub max_evaluations: usize,
    /// Relative spread of the simplex values at which a restart stops.
    pub tolerance: f64,
    pub seed: u64,
    /// Restart starting points other than the identity are uniform in this cube of `w`.
    pub start_radius: f64,
    /// Edge length of the initial simplex in `w`.
    pub initial_step: f64,
}

impl Default for MobiusConfig {
    fn default() -> Self {
        MobiusConfig {
            restarts: 16,
            max_evaluations: 200,
            tolerance: 1e-6,
            seed: 0,
            start_radius: 1.5,
            initial_step: 0.5,
        }
    }
}

impl MobiusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_evaluations < 2 {
            return Err(Error::Config(
                "optimizer needs at least one restart and two evaluations".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.start_radius >= 0.0 && self.initial_step > 0.0) {
            return Err(Error::Config(
                "optimizer tolerance, start radius and step must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Relative agreement needed between restarts for a converged result.
pub const RESTART_SPREAD: f64 = 1e-3;

/// Translations with `|w|` above this are rejected; `|a| = tanh 4 ≈ 0.9993`.
const MAX_W: f64 = 8.0;

/// Accuracy of the volume integrals inside the search.
const SEARCH_TOL: QuadTol = QuadTol {
    abs: 1e-13,
    rel: 1e-9,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerStep {
    pub restart: usize,
    pub translation: Vec<f64>,
    /// `None` when the evaluation failed or left the search region.
    pub volume: Option<f64>,
    /// Best volume over all earlier steps in this history, restarts in order.
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusVolumeResult {
    pub target: MobiusTarget,
    pub value: f64,
    pub maximizer: MobiusMap,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Volume of the untransformed input.
    pub identity_value: f64,
    /// Quadrature error of `value`.
    pub quadrature_error: f64,
    /// Number of restarts whose best value is within `RESTART_SPREAD` of the best.
    pub agreeing_restarts: usize,
    pub history: Vec<OptimizerStep>,
}

fn translation_of(w: &[f64]) -> DVector<f64> {
    let v = DVector::from_column_slice(w);
    let norm = v.norm();
    if norm == 0.0 {
        return v;
    }
    v * ((norm / 2.0).tanh() / norm)
}

fn target_volume(
    sigma: &Submanifold,
    target: MobiusTarget,
    g: &MobiusMap,
    tol: QuadTol,
) -> Result<(f64, f64)> {
    let image = mobius_image_charts(sigma, g);
    match target {
        MobiusTarget::Submanifold => direct_volume_estimate(&image, tol),
        MobiusTarget::IdealBoundary => ideal_boundary_estimate(&image, tol),
    }
}

/// `Vol_R(τ_a(·))` as a function of `w`, or `None` outside the search region.
fn objective(sigma: &Submanifold, target: MobiusTarget, w: &[f64]) -> (Vec<f64>, Option<f64>) {
    let a = translation_of(w);
    let translation = a.as_slice().to_vec();
    if DVector::from_column_slice(w).norm() > MAX_W {
        return (translation, None);
    }
    let value = MobiusMap::translate(a)
        .and_then(|g| target_volume(sigma, target, &g, SEARCH_TOL))
        .ok()
        .map(|v| v.0)
        .filter(|v| v.is_finite());
    (translation, value)
}

struct Restart {
    best_w: Vec<f64>,
    best: f64,
    converged: bool,
    steps: Vec<(Vec<f64>, Option<f64>)>,
}

/// Nelder–Mead maximization with standard coefficients.
fn nelder_mead<F: FnMut(&[f64]) -> Option<f64>>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> (Vec<f64>, f64, bool) {
    let d = x0.len();
    // minimize the negated volume; failures cost +∞
    let mut evals = 0;
    let mut cost = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x).map_or(f64::INFINITY, |v| -v)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let c0 = cost(x0, &mut evals);
    simplex.push((x0.to_vec(), c0));
    for i in 0..d {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let c = cost(&x, &mut evals);
        simplex.push((x, c));
    }
    let mut converged = false;
    if simplex.len() < d + 1 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        return (simplex[0].0.clone(), -simplex[0].1, false);
    }
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        if best.is_finite() && (worst - best) <= tol * best.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..d)
                .map(|j| centroid[j] + t * (simplex[d].0[j] - centroid[j]))
                .collect()
        };
        let xr = along(-1.0);
        let cr = cost(&xr, &mut evals);
        if cr < simplex[0].1 {
            if evals >= max_evals {
                simplex[d] = (xr, cr);
                break;
            }
            let xe = along(-2.0);
            let ce = cost(&xe, &mut evals);
            simplex[d] = if ce < cr { (xe, ce) } else { (xr, cr) };
            continue;
        }
        if cr < simplex[d - 1].1 {
            simplex[d] = (xr, cr);
            continue;
        }
        if evals >= max_evals {
            break;
        }
        let xc = along(if cr < simplex[d].1 { -0.5 } else { 0.5 });
        let cc = cost(&xc, &mut evals);
        if cc < simplex[d].1.min(cr) {
            simplex[d] = (xc, cc);
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=d {
            if evals >= max_evals {
                break;
            }
            let x: Vec<f64> = (0..d)
                .map(|j| simplex[0].0[j] + 0.5 * (simplex[i].0[j] - simplex[0].0[j]))
                .collect();
            let c = cost(&x, &mut evals);
            simplex[i] = (x, c);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), -simplex[0].1, converged)
}

fn run_restart(
    sigma: &Submanifold,
    target: MobiusTarget,
    config: &MobiusConfig,
    index: usize,
) -> Restart {
    let n = sigma.n;
    let start: Vec<f64> = if index == 0 {
        vec![0.0; n]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64);
        (0..n)
            .map(|_| rng.gen_range(-config.start_radius..=config.start_radius))
            .collect()
    };
    let mut steps = Vec::with_capacity(config.max_evaluations);
    let (best_w, best, converged) = nelder_mead(
        |w| {
            let (a, v) = objective(sigma, target, w);
            steps.push((a, v));
            v
        },
        &start,
        config.initial_step,
        config.max_evaluations,
        config.tolerance,
    );
    Restart {
        best_w,
        best,
        converged,
        steps,
    }
}

/// Lower bound for the Möbius volume of `Σ` or of its ideal boundary.
///
/// Restarts run concurrently; the accepted restart is the one with the
/// largest value, ties going to the lowest index. The result counts as
/// converged when the accepted restart's simplex collapsed and at least one
/// other restart agrees with it to `RESTART_SPREAD`.
pub fn mobius_volume(
    sigma: &Submanifold,
    target: MobiusTarget,
    config: &MobiusConfig,
) -> Result<MobiusVolumeResult> {
    config.validate()?;
    if target == MobiusTarget::IdealBoundary && sigma.ideal_charts.is_empty() {
        return Err(Error::domain("submanifold has no ideal boundary charts"));
    }
    let identity = MobiusMap::identity(sigma.n);
    let (identity_value, _) = target_volume(sigma, target, &identity, SEARCH_TOL)?;
    let restarts: Vec<Restart> = (0..config.restarts)
        .into_par_iter()
        .map(|i| run_restart(sigma, target, config, i))
        .collect();
    let mut winner = 0;
    for (i, r) in restarts.iter().enumerate() {
        if r.best > restarts[winner].best {
            winner = i;
        }
    }
    let best = restarts[winner].best;
    if !best.is_finite() {
        return Err(Error::Convergence(
            "every optimizer evaluation failed".into(),
        ));
    }
    let agreeing_restarts = restarts
        .iter()
        .filter(|r| r.best.is_finite() && (best - r.best).abs() <= RESTART_SPREAD * best.abs())
        .count();
    let converged = restarts[winner].converged && agreeing_restarts >= 2.min(config.restarts);

    let mut history = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (i, r) in restarts.iter().enumerate() {
        for (a, v) in &r.steps {
            if let Some(v) = v {
                running = running.max(*v);
            }
            history.push(OptimizerStep {
                restart: i,
                translation: a.clone(),
                volume: *v,
                best_so_far: running,
            });
        }
    }

    let maximizer = MobiusMap::translate(translation_of(&restarts[winner].best_w))?;
    let (value, quadrature_error) = target_volume(sigma, target, &maximizer, QuadTol::default())?;
    Ok(MobiusVolumeResult {
        target,
        value,
        maximizer,
        evaluations: history.len(),
        restarts_used: config.restarts,
        converged,
        identity_value,
        quadrature_error,
        agreeing_restarts,
        history,
    })
}
