//! Concrete complete proper minimal submanifolds of the ball, given as unions
//! of parametrized charts together with charts of their ideal boundaries.

mod caps;
pub mod catenoid;
mod document;
mod sphere;

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ball::{BallPoint, MobiusMap};
use crate::error::{Error, Result};

pub use caps::{
    cap_ideal_volume_closed_form, cap_volume_closed_form, flat_disk, geodesic_cap, spherical_cap,
    GeodesicCap,
};
pub use catenoid::{catenoid, catenoid_with, CatenoidOptions, CatenoidProfile};
pub use document::{SubmanifoldDocument, SUBMANIFOLD_SCHEMA};

/// Step used for central-difference Jacobians when no closed form is known.
pub const JACOBIAN_STEP: f64 = 1e-6;

/// A smooth map from a parameter box into `Rⁿ`.
pub trait ChartMap: Send + Sync + Debug {
    fn ambient_dim(&self) -> usize;

    fn param_dim(&self) -> usize;

    fn eval(&self, u: &[f64]) -> DVector<f64>;

    /// `n × k` matrix of partial derivatives.
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        central_difference_jacobian(self, u, JACOBIAN_STEP)
    }
}

pub fn central_difference_jacobian<M: ChartMap + ?Sized>(
    map: &M,
    u: &[f64],
    h: f64,
) -> DMatrix<f64> {
    let n = map.ambient_dim();
    let k = map.param_dim();
    let mut jac = DMatrix::zeros(n, k);
    let mut w = u.to_vec();
    for j in 0..k {
        w[j] = u[j] + h;
        let plus = map.eval(&w);
        w[j] = u[j] - h;
        let minus = map.eval(&w);
        w[j] = u[j];
        jac.set_column(j, &((plus - minus) / (2.0 * h)));
    }
    jac
}

/// Axis-aligned parameter rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        debug_assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
        ParamBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    /// Point at fractional position `t ∈ [0,1]^k`.
    pub fn at(&self, t: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.lo[i] + t[i] * self.width(i))
            .collect()
    }
}

/// One parametrized piece of a submanifold or of its ideal boundary.
#[derive(Debug, Clone)]
pub struct Chart {
    pub domain: ParamBox,
    pub map: Arc<dyn ChartMap>,
    /// Whether nothing of Σ is cut off beyond this chart toward the sphere at
    /// infinity, so that volumes need no tail extrapolation.
    pub covers_tail: bool,
}

impl Chart {
    pub fn new(domain: ParamBox, map: Arc<dyn ChartMap>, covers_tail: bool) -> Self {
        assert_eq!(domain.dim(), map.param_dim());
        Chart {
            domain,
            map,
            covers_tail,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn eval(&self, u: &[f64]) -> DVector<f64> {
        self.map.eval(u)
    }

    pub fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        self.map.jacobian(u)
    }

    /// Gram determinant of the Jacobian on a `probe^k` grid of interior points.
    pub fn min_gram_on_grid(&self, probe: usize) -> f64 {
        let k = self.dim();
        let total = probe.pow(k as u32);
        let mut worst = f64::INFINITY;
        for idx in 0..total {
            let mut rem = idx;
            let t: Vec<f64> = (0..k)
                .map(|_| {
                    let i = rem % probe;
                    rem /= probe;
                    (i as f64 + 0.5) / probe as f64
                })
                .collect();
            let jac = self.jacobian(&self.domain.at(&t));
            worst = worst.min(gram_determinant(&jac));
        }
        worst
    }

    fn transformed(&self, g: &MobiusMap) -> Chart {
        Chart {
            domain: self.domain.clone(),
            map: Arc::new(MobiusChart {
                inner: self.map.clone(),
                g: g.clone(),
            }),
            covers_tail: self.covers_tail,
        }
    }
}

/// `det(JᵀJ)`; equals one for a zero-dimensional chart.
pub fn gram_determinant(jac: &DMatrix<f64>) -> f64 {
    if jac.ncols() == 0 {
        return 1.0;
    }
    (jac.transpose() * jac).determinant()
}

/// A chart followed by a Möbius map.
#[derive(Debug)]
struct MobiusChart {
    inner: Arc<dyn ChartMap>,
    g: MobiusMap,
}

impl ChartMap for MobiusChart {
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        self.g.map_vec(&self.inner.eval(u))
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let x = self.inner.eval(u);
        self.g.jacobian(&x) * self.inner.jacobian(u)
    }
}

/// A fixed point, the zero-dimensional chart of a 1-dimensional family's ideal boundary.
#[derive(Debug)]
pub(crate) struct PointChart(pub DVector<f64>);

impl ChartMap for PointChart {
    fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    fn param_dim(&self) -> usize {
        0
    }

    fn eval(&self, _u: &[f64]) -> DVector<f64> {
        self.0.clone()
    }

    fn jacobian(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.0.len(), 0)
    }
}

#[derive(Debug, Clone)]
pub struct Submanifold {
    pub k: usize,
    pub n: usize,
    pub interior_charts: Vec<Chart>,
    pub ideal_charts: Vec<Chart>,
    pub contains_origin: bool,
    pub totally_geodesic: bool,
    pub candidate_density_points: Vec<BallPoint>,
    pub label: String,
}

impl Submanifold {
    /// Checks dimensions, ideal charts landing on the sphere, and the origin flag.
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.n {
            return Err(Error::domain(format!(
                "invalid dimensions k = {}, n = {}",
                self.k, self.n
            )));
        }
        for c in &self.interior_charts {
            if c.dim() != self.k || c.map.ambient_dim() != self.n {
                return Err(Error::Chart("interior chart has wrong dimensions".into()));
            }
        }
        for c in &self.ideal_charts {
            if c.dim() + 1 != self.k || c.map.ambient_dim() != self.n {
                return Err(Error::Chart("ideal chart has wrong dimensions".into()));
            }
            for p in sample_chart(c, 5) {
                if (p.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::Chart(format!(
                        "ideal chart point off the sphere: |u| = {}",
                        p.norm()
                    )));
                }
            }
        }
        if self.contains_origin && self.locate(&DVector::zeros(self.n), 1e-8).is_none() {
            return Err(Error::Chart(
                "flagged as containing the origin but no chart reaches it".into(),
            ));
        }
        Ok(())
    }

    /// Finds a chart parameter whose image lies within `tol` of `p`.
    pub fn locate(&self, p: &DVector<f64>, tol: f64) -> Option<(usize, Vec<f64>)> {
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for (ci, chart) in self.interior_charts.iter().enumerate() {
            if let Some((u, d)) = nearest_parameter(chart, p) {
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, ci, u));
                }
            }
        }
        best.filter(|b| b.0 <= tol).map(|(_, ci, u)| (ci, u))
    }
}

/// Samples a chart on a uniform grid of `m` points per parameter (cell centers).
pub(crate) fn sample_chart(chart: &Chart, m: usize) -> Vec<DVector<f64>> {
    let k = chart.dim();
    let total = m.pow(k as u32);
    (0..total)
        .map(|idx| {
            let mut rem = idx;
            let t: Vec<f64> = (0..k)
                .map(|_| {
                    let i = rem % m;
                    rem /= m;
                    (i as f64 + 0.5) / m as f64
                })
                .collect();
            chart.eval(&chart.domain.at(&t))
        })
        .collect()
}

fn clamp_to_box(u: &mut [f64], domain: &ParamBox) {
    for i in 0..u.len() {
        u[i] = u[i].clamp(domain.lo[i], domain.hi[i]);
    }
}

/// Damped Gauss–Newton for `min |x(u) - p|` over a chart, seeded from a grid.
fn nearest_parameter(chart: &Chart, p: &DVector<f64>) -> Option<(Vec<f64>, f64)> {
    let k = chart.dim();
    if k == 0 {
        let d = (chart.eval(&[]) - p).norm();
        return Some((vec![], d));
    }
    let m: usize = match k {
        1 => 64,
        2 => 24,
        _ => 8,
    };
    let total = m.pow(k as u32);
    let mut seeds: Vec<(f64, Vec<f64>)> = (0..total)
        .map(|idx| {
            let mut rem = idx;
            let t: Vec<f64> = (0..k)
                .map(|_| {
                    let i = rem % m;
                    rem /= m;
                    i as f64 / (m - 1) as f64
                })
                .collect();
            let u = chart.domain.at(&t);
            ((chart.eval(&u) - p).norm(), u)
        })
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (_, seed) in seeds.into_iter().take(4) {
        let (u, d) = gauss_newton_to_point(chart, p, seed, 60);
        if best.as_ref().map_or(true, |b| d < b.1) {
            best = Some((u, d));
        }
    }
    best
}

fn gauss_newton_to_point(
    chart: &Chart,
    p: &DVector<f64>,
    mut u: Vec<f64>,
    iters: usize,
) -> (Vec<f64>, f64) {
    let mut r = chart.eval(&u) - p;
    let mut d = r.norm();
    for _ in 0..iters {
        if d < 1e-15 {
            break;
        }
        let jac = chart.jacobian(&u);
        let step = match pseudo_inverse_solve(&jac, &(-&r)) {
            Some(s) => s,
            None => break,
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut trial: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(a, s)| a + lambda * s)
                .collect();
            clamp_to_box(&mut trial, &chart.domain);
            let rt = chart.eval(&trial) - p;
            if rt.norm() < d {
                u = trial;
                r = rt;
                d = r.norm();
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (u, d)
}

/// Minimum-norm least-squares solution of `J s = rhs`.
pub(crate) fn pseudo_inverse_solve(jac: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return None;
    }
    svd.solve(rhs, 1e-12 * smax).ok()
}

/// Charts of `g(Σ)` without recomputing the flags, for repeated volume evaluations.
pub(crate) fn mobius_image_charts(sigma: &Submanifold, g: &MobiusMap) -> Submanifold {
    Submanifold {
        k: sigma.k,
        n: sigma.n,
        interior_charts: sigma
            .interior_charts
            .iter()
            .map(|c| c.transformed(g))
            .collect(),
        ideal_charts: sigma
            .ideal_charts
            .iter()
            .map(|c| c.transformed(g))
            .collect(),
        contains_origin: false,
        totally_geodesic: sigma.totally_geodesic,
        candidate_density_points: Vec::new(),
        label: sigma.label.clone(),
    }
}

/// The image `g(Σ)`. Charts are composed with `g`; the origin flag is recomputed.
pub fn mobius_image(sigma: &Submanifold, g: &MobiusMap) -> Result<Submanifold> {
    if g.dim() != sigma.n {
        return Err(Error::domain(
            "map dimension differs from the ambient dimension",
        ));
    }
    let mut candidates = Vec::with_capacity(sigma.candidate_density_points.len());
    for p in &sigma.candidate_density_points {
        candidates.push(g.apply(p)?);
    }
    let mut image = Submanifold {
        k: sigma.k,
        n: sigma.n,
        interior_charts: sigma
            .interior_charts
            .iter()
            .map(|c| c.transformed(g))
            .collect(),
        ideal_charts: sigma
            .ideal_charts
            .iter()
            .map(|c| c.transformed(g))
            .collect(),
        contains_origin: false,
        totally_geodesic: sigma.totally_geodesic,
        candidate_density_points: candidates,
        label: format!("mobius-image({})", sigma.label),
    };
    let origin = DVector::zeros(sigma.n);
    image.contains_origin = image.locate(&origin, 1e-8).is_some();
    if image.contains_origin
        && !image
            .candidate_density_points
            .iter()
            .any(|p| p.radius() < 1e-8)
    {
        image
            .candidate_density_points
            .push(BallPoint::origin(sigma.n));
    }
    Ok(image)
}

/// Union of submanifolds of equal dimensions. Transverse pairwise
/// intersection points found by damped Newton are added as density candidates.
pub fn union(parts: &[Submanifold]) -> Result<Submanifold> {
    union_with_seed(parts, 0x5eed)
}

pub fn union_with_seed(parts: &[Submanifold], seed: u64) -> Result<Submanifold> {
    let first = parts
        .first()
        .ok_or_else(|| Error::domain("union of no parts"))?;
    let (k, n) = (first.k, first.n);
    if parts.iter().any(|p| p.k != k || p.n != n) {
        return Err(Error::domain("union parts must share k and n"));
    }
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let mut candidates: Vec<BallPoint> = Vec::new();
    let push_candidate = |p: BallPoint, list: &mut Vec<BallPoint>| {
        if !list.iter().any(|q| (q.coords() - p.coords()).norm() < 1e-9) {
            list.push(p);
        }
    };
    for part in parts {
        for p in &part.candidate_density_points {
            push_candidate(p.clone(), &mut candidates);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            for a in &parts[i].interior_charts {
                for b in &parts[j].interior_charts {
                    for p in chart_intersections(a, b, 50, &mut rng) {
                        push_candidate(p, &mut candidates);
                    }
                }
            }
        }
    }
    Ok(Submanifold {
        k,
        n,
        interior_charts: parts
            .iter()
            .flat_map(|p| p.interior_charts.iter().cloned())
            .collect(),
        ideal_charts: parts
            .iter()
            .flat_map(|p| p.ideal_charts.iter().cloned())
            .collect(),
        contains_origin: parts.iter().any(|p| p.contains_origin),
        totally_geodesic: parts.iter().all(|p| p.totally_geodesic),
        candidate_density_points: candidates,
        label: format!(
            "union({})",
            parts
                .iter()
                .map(|p| p.label.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    })
}

/// Transverse intersection points of two charts from random Newton seeds.
fn chart_intersections(a: &Chart, b: &Chart, seeds: usize, rng: &mut ChaCha8Rng) -> Vec<BallPoint> {
    let ka = a.dim();
    let kb = b.dim();
    let n = a.map.ambient_dim();
    let mut found: Vec<BallPoint> = Vec::new();
    for _ in 0..seeds {
        // keep seeds off the chart edges, where polar charts degenerate
        let ta: Vec<f64> = (0..ka).map(|_| rng.gen_range(0.05..0.95)).collect();
        let tb: Vec<f64> = (0..kb).map(|_| rng.gen_range(0.05..0.95)).collect();
        let mut u = a.domain.at(&ta);
        let mut v = b.domain.at(&tb);
        let mut res = a.eval(&u) - b.eval(&v);
        for _ in 0..60 {
            if res.norm() < 1e-14 {
                break;
            }
            let ja = a.jacobian(&u);
            let jb = b.jacobian(&v);
            let mut jac = DMatrix::zeros(n, ka + kb);
            jac.view_mut((0, 0), (n, ka)).copy_from(&ja);
            jac.view_mut((0, ka), (n, kb)).copy_from(&(-jb));
            let Some(step) = pseudo_inverse_solve(&jac, &(-&res)) else {
                break;
            };
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..20 {
                let mut un: Vec<f64> = (0..ka).map(|i| u[i] + lambda * step[i]).collect();
                let mut vn: Vec<f64> = (0..kb).map(|i| v[i] + lambda * step[ka + i]).collect();
                clamp_to_box(&mut un, &a.domain);
                clamp_to_box(&mut vn, &b.domain);
                let rn = a.eval(&un) - b.eval(&vn);
                if rn.norm() < res.norm() {
                    u = un;
                    v = vn;
                    res = rn;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res.norm() > 1e-10 {
            continue;
        }
        let x = a.eval(&u);
        if x.norm() >= 1.0 - 1e-6 {
            continue;
        }
        let ja = a.jacobian(&u);
        let jb = b.jacobian(&v);
        if !is_transverse(&ja, &jb) {
            continue;
        }
        if let Ok(p) = BallPoint::new(x) {
            if !found
                .iter()
                .any(|q| (q.coords() - p.coords()).norm() < 1e-6)
            {
                found.push(p);
            }
        }
    }
    found
}

/// Tangent spaces together span a space of dimension `min(n, ka + kb)` and
/// are not equal.
fn is_transverse(ja: &DMatrix<f64>, jb: &DMatrix<f64>) -> bool {
    let n = ja.nrows();
    let mut both = DMatrix::zeros(n, ja.ncols() + jb.ncols());
    both.view_mut((0, 0), (n, ja.ncols()))
        .copy_from(&ja.clone().normalize_columns());
    both.view_mut((0, ja.ncols()), (n, jb.ncols()))
        .copy_from(&jb.clone().normalize_columns());
    let sv = both.singular_values();
    let rank = sv.iter().filter(|s| **s > 1e-6 * sv.max()).count();
    let want = n.min(ja.ncols() + jb.ncols());
    rank == want && rank > ja.ncols().max(jb.ncols())
}

trait NormalizeColumns {
    fn normalize_columns(self) -> Self;
}

impl NormalizeColumns for DMatrix<f64> {
    fn normalize_columns(mut self) -> Self {
        for mut c in self.column_iter_mut() {
            let nrm = c.norm();
            if nrm > 0.0 {
                c /= nrm;
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_of_one_part_is_that_part() {
        let d = flat_disk(2, 3, None).unwrap();
        let u = union(std::slice::from_ref(&d)).unwrap();
        assert_eq!(u.interior_charts.len(), d.interior_charts.len());
        assert_eq!(u.label, d.label);
    }

    #[test]
    fn union_rejects_mismatched_dimensions() {
        let a = flat_disk(2, 3, None).unwrap();
        let b = flat_disk(2, 4, None).unwrap();
        assert!(matches!(union(&[a, b]), Err(Error::Domain(_))));
    }

    #[test]
    fn two_disks_through_origin_intersect_on_a_diameter() {
        let a = flat_disk(2, 3, None).unwrap();
        let b = flat_disk(2, 3, Some(DVector::from_vec(vec![1.0, 0.0, 0.0]))).unwrap();
        let u = union(&[a, b]).unwrap();
        assert!(u.contains_origin);
        assert!(u
            .candidate_density_points
            .iter()
            .any(|p| p.radius() < 1e-12));
        // intersection line of z = 0 and x = 0 is the y-axis
        for p in &u.candidate_density_points {
            assert!(p.coords()[0].abs() < 1e-9 && p.coords()[2].abs() < 1e-9);
        }
        assert!(u.candidate_density_points.len() > 1);
    }

    #[test]
    fn image_under_identity_keeps_flags() {
        let d = flat_disk(2, 3, None).unwrap();
        let img = mobius_image(&d, &MobiusMap::identity(3)).unwrap();
        assert!(img.contains_origin);
        assert!(img.totally_geodesic);
        img.validate().unwrap();
    }

    #[test]
    fn image_of_disk_off_origin_loses_origin_flag() {
        let d = flat_disk(2, 3, None).unwrap();
        let g = MobiusMap::translate(DVector::from_vec(vec![0.0, 0.0, 0.4])).unwrap();
        let img = mobius_image(&d, &g).unwrap();
        assert!(!img.contains_origin);
        img.validate().unwrap();
    }
}
