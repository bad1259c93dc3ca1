//! Adaptive Gauss–Kronrod (7/15) quadrature, nested over parameter boxes,
//! with optional clipping of the integration region to `|x(u)| < r`.

use crate::families::ParamBox;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Subdivision budget of a single one-dimensional adaptive integral.
pub const MAX_SUBDIVISIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        QuadTol { abs, rel }
    }

    fn accepts(&self, value: f64, error: f64) -> bool {
        error <= self.abs.max(self.rel * value.abs())
    }
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-14,
            rel: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

/// Vector-valued estimate; only the first `controlled` components drive refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiEstimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn gk15<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mid = f(center);
    let m = mid.len();
    let mut kron: Vec<f64> = mid.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = mid.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for c in 0..m {
            let s = lo[c] + hi[c];
            kron[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let values: Vec<f64> = kron.iter().map(|v| v * half).collect();
    let errors: Vec<f64> = kron
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * half).abs())
        .collect();
    Panel {
        a,
        b,
        values,
        errors,
    }
}

/// Globally adaptive bisection of the panel with the largest controlled error.
pub fn adaptive_gk_multi<F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: QuadTol,
    controlled: usize,
) -> MultiEstimate
where
    F: FnMut(f64) -> Vec<f64>,
{
    if a == b {
        let m = f(a).len();
        return MultiEstimate {
            values: vec![0.0; m],
            errors: vec![0.0; m],
            evals: 1,
        };
    }
    let mut evals = 15;
    let mut panels = vec![gk15(&mut f, a, b)];
    let m = panels[0].values.len();
    let controlled = controlled.min(m);
    let sum = |panels: &[Panel], c: usize, err: bool| -> f64 {
        panels
            .iter()
            .map(|p| if err { p.errors[c] } else { p.values[c] })
            .sum()
    };
    for _ in 0..MAX_SUBDIVISIONS {
        let done =
            (0..controlled).all(|c| tol.accepts(sum(&panels, c, false), sum(&panels, c, true)));
        if done {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (0..controlled).map(|c| p.errors[c]).fold(0.0, f64::max)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            panels.push(p);
            break;
        }
        panels.push(gk15(&mut f, p.a, mid));
        panels.push(gk15(&mut f, mid, p.b));
        evals += 30;
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    MultiEstimate {
        values: (0..m).map(|c| sum(&panels, c, false)).collect(),
        errors: (0..m).map(|c| sum(&panels, c, true)).collect(),
        evals,
    }
}

pub fn adaptive_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Estimate {
    let est = adaptive_gk_multi(|x| vec![f(x)], a, b, tol, 1);
    Estimate {
        value: est.values[0],
        error: est.errors[0],
        evals: est.evals,
    }
}

/// Number of uniform samples used to detect clip crossings along a slice.
const SLICE_SAMPLES: usize = 16;

/// Sub-intervals of `[a, b]` where `g < 0`, with crossings located by bisection.
///
/// Sample minima that stay positive but lie within one slope-times-spacing of
/// zero are refined by golden-section search, so that narrow dips between
/// samples (slices grazing the clip sphere) are not lost.
pub fn negative_intervals<G: FnMut(f64) -> f64>(mut g: G, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = SLICE_SAMPLES;
    let spacing = (b - a) / n as f64;
    let mut ts: Vec<f64> = (0..=n).map(|i| a + spacing * i as f64).collect();
    let mut vals: Vec<f64> = ts.iter().map(|t| g(*t)).collect();
    let slope = vals
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max)
        / spacing;
    let mut dips = Vec::new();
    for i in 0..=n {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = if i < n { vals[i + 1] } else { f64::INFINITY };
        if vals[i] >= 0.0 && vals[i] <= left && vals[i] <= right && vals[i] < slope * spacing {
            let lo = ts[i.saturating_sub(1)];
            let hi = ts[(i + 1).min(n)];
            let (t, v) = golden_minimum(&mut g, lo, hi);
            if v < 0.0 {
                dips.push((t, v));
            }
        }
    }
    for (t, v) in dips {
        let pos = ts.partition_point(|x| *x < t);
        if ts.get(pos) != Some(&t) {
            ts.insert(pos, t);
            vals.insert(pos, v);
        }
    }
    let n = ts.len() - 1;
    let mut out = Vec::new();
    let mut start = if vals[0] < 0.0 { Some(a) } else { None };
    for i in 0..n {
        let (inside_l, inside_r) = (vals[i] < 0.0, vals[i + 1] < 0.0);
        if inside_l == inside_r {
            continue;
        }
        let (mut lo, mut hi) = (ts[i], ts[i + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if (g(mid) < 0.0) == inside_l {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        if inside_l {
            out.push((start.take().unwrap_or(a), root));
        } else {
            start = Some(root);
        }
    }
    if let Some(s) = start {
        out.push((s, b));
    }
    out.retain(|(l, r)| r > l);
    out
}

fn golden_minimum<G: FnMut(f64) -> f64>(g: &mut G, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1.min(f2) < 0.0 || hi - lo <= 1e-15 * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Integrand over a parameter box returning several components.
pub trait BoxIntegrand: Sync {
    fn components(&self) -> usize;
    fn eval(&self, u: &[f64]) -> Vec<f64>;
}

impl<F> BoxIntegrand for (usize, F)
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn components(&self) -> usize {
        self.0
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        (self.1)(u)
    }
}

/// Restricts integration to `{u : |x(u)| < radius}`.
pub struct Clip<'a> {
    pub point: &'a (dyn Fn(&[f64]) -> nalgebra::DVector<f64> + Sync),
    pub radius: f64,
}

/// Nested adaptive integration over `domain`; dimension 0 is innermost.
/// The first component controls refinement, the others ride along.
pub fn integrate_box<I: BoxIntegrand + ?Sized>(
    integrand: &I,
    domain: &ParamBox,
    clip: Option<&Clip<'_>>,
    tol: QuadTol,
) -> MultiEstimate {
    let k = domain.dim();
    let m = integrand.components();
    if k == 0 {
        let inside = clip.map_or(true, |c| (c.point)(&[]).norm() < c.radius);
        let values = if inside {
            integrand.eval(&[])
        } else {
            vec![0.0; m]
        };
        return MultiEstimate {
            values,
            errors: vec![0.0; m],
            evals: 1,
        };
    }
    match clip {
        Some(c) if c.radius < 1.0 => integrate_clipped(integrand, domain, c, tol),
        _ => {
            let mut u = domain.center();
            nested(integrand, domain, None, k - 1, &mut u, tol)
        }
    }
}

fn nested<I: BoxIntegrand + ?Sized>(
    integrand: &I,
    cell: &ParamBox,
    clip: Option<&Clip<'_>>,
    d: usize,
    u: &mut Vec<f64>,
    tol: QuadTol,
) -> MultiEstimate {
    let m = integrand.components();
    if d == 0 {
        let intervals = match clip {
            Some(c) => {
                let mut w = u.clone();
                negative_intervals(
                    |t| {
                        w[0] = t;
                        (c.point)(&w).norm() - c.radius
                    },
                    cell.lo[0],
                    cell.hi[0],
                )
            }
            None => vec![(cell.lo[0], cell.hi[0])],
        };
        let mut total = MultiEstimate {
            values: vec![0.0; m],
            errors: vec![0.0; m],
            evals: 0,
        };
        for (a, b) in intervals {
            let est = adaptive_gk_multi(
                |t| {
                    u[0] = t;
                    integrand.eval(u)
                },
                a,
                b,
                tol,
                1,
            );
            for c in 0..m {
                total.values[c] += est.values[c];
                total.errors[c] += est.errors[c];
            }
            total.evals += est.evals;
        }
        return total;
    }
    let inner_tol = QuadTol::new(tol.abs / cell.width(d).max(1e-300), tol.rel * 0.1);
    // For two-dimensional cells the outer range is restricted to slices that
    // meet the clip ball and cut where the clip crossing leaves the cell
    // through an edge. The slice measure has square-root kinks there, and a
    // kink close to a panel end can hide between the Kronrod nodes.
    let outer = match clip {
        Some(c) if d == 1 => clipped_outer_pieces(c, cell, u),
        _ => vec![(cell.lo[d], cell.hi[d])],
    };
    let mut total = MultiEstimate {
        values: vec![0.0; m],
        errors: vec![0.0; m],
        evals: 0,
    };
    for (a, b) in outer {
        let mut evals = 0;
        let est = adaptive_gk_multi(
            |t| {
                u[d] = t;
                let inner = nested(integrand, cell, clip, d - 1, u, inner_tol);
                evals += inner.evals;
                let mut out = inner.values;
                out.extend(inner.errors);
                out
            },
            a,
            b,
            tol,
            1,
        );
        for c in 0..m {
            total.values[c] += est.values[c];
            total.errors[c] += est.errors[c] + est.values[m + c].abs();
        }
        total.evals += evals + est.evals;
    }
    total
}

fn clipped_outer_pieces(clip: &Clip<'_>, cell: &ParamBox, u: &[f64]) -> Vec<(f64, f64)> {
    let mut w = u.to_vec();
    let meets = negative_intervals(
        |t| {
            w[1] = t;
            slice_minimum(clip, &mut w, cell.lo[0], cell.hi[0]) - clip.radius
        },
        cell.lo[1],
        cell.hi[1],
    );
    let mut cuts = Vec::new();
    for edge in [cell.lo[0], cell.hi[0]] {
        w[0] = edge;
        for (a, b) in negative_intervals(
            |t| {
                w[1] = t;
                (clip.point)(&w).norm() - clip.radius
            },
            cell.lo[1],
            cell.hi[1],
        ) {
            cuts.push(a);
            cuts.push(b);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut pieces = Vec::new();
    for (a, b) in meets {
        let mut start = a;
        for &c in cuts.iter().filter(|c| **c > a && **c < b) {
            if c > start {
                pieces.push((start, c));
                start = c;
            }
        }
        pieces.push((start, b));
    }
    pieces
}

/// Minimum of `|x(u)|` over `u[0] ∈ [a, b]` with the other coordinates fixed.
fn slice_minimum(clip: &Clip<'_>, u: &mut [f64], a: f64, b: f64) -> f64 {
    let n = SLICE_SAMPLES;
    let spacing = (b - a) / n as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=n {
        u[0] = a + spacing * i as f64;
        let v = (clip.point)(u).norm();
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = a + spacing * best.0.saturating_sub(1) as f64;
    let hi = a + spacing * (best.0 + 1).min(n) as f64;
    let (_, v) = golden_minimum(
        &mut |t| {
            u[0] = t;
            (clip.point)(u).norm()
        },
        lo,
        hi,
    );
    v.min(best.1)
}

enum CellClass {
    Outside,
    Inside,
    Straddles { image_size: f64 },
}

fn classify(cell: &ParamBox, clip: &Clip<'_>) -> CellClass {
    let k = cell.dim();
    let center = cell.center();
    let xc = (clip.point)(&center);
    let rc = xc.norm();
    let mut reach: f64 = 0.0;
    // corners and edge midpoints bound the image for cells small against curvature
    let probes = 3usize.pow(k as u32);
    for idx in 0..probes {
        let mut rem = idx;
        let t: Vec<f64> = (0..k)
            .map(|_| {
                let i = rem % 3;
                rem /= 3;
                i as f64 * 0.5
            })
            .collect();
        let x = (clip.point)(&cell.at(&t));
        reach = reach.max((x - &xc).norm());
    }
    let margin = 1.5 * reach;
    if rc - margin > clip.radius {
        CellClass::Outside
    } else if rc + margin < clip.radius {
        CellClass::Inside
    } else {
        CellClass::Straddles { image_size: reach }
    }
}

fn split(cell: &ParamBox) -> Vec<ParamBox> {
    let k = cell.dim();
    let c = cell.center();
    (0..1usize << k)
        .map(|mask| {
            let mut lo = cell.lo.clone();
            let mut hi = cell.hi.clone();
            for i in 0..k {
                if mask & (1 << i) == 0 {
                    hi[i] = c[i];
                } else {
                    lo[i] = c[i];
                }
            }
            ParamBox::new(lo, hi)
        })
        .collect()
}

fn initial_cells(domain: &ParamBox) -> Vec<ParamBox> {
    let k = domain.dim();
    let parts: usize = if k <= 2 { 4 } else { 2 };
    let total = parts.pow(k as u32);
    (0..total)
        .map(|idx| {
            let mut rem = idx;
            let mut lo = Vec::with_capacity(k);
            let mut hi = Vec::with_capacity(k);
            for i in 0..k {
                let j = rem % parts;
                rem /= parts;
                let w = domain.width(i) / parts as f64;
                lo.push(domain.lo[i] + j as f64 * w);
                hi.push(if j + 1 == parts {
                    domain.hi[i]
                } else {
                    domain.lo[i] + (j + 1) as f64 * w
                });
            }
            ParamBox::new(lo, hi)
        })
        .collect()
}

/// Cells straddling the clip sphere are split until their image is small
/// against the radius, then integrated with slice-wise clipping along dimension 0.
fn integrate_clipped<I: BoxIntegrand + ?Sized>(
    integrand: &I,
    domain: &ParamBox,
    clip: &Clip<'_>,
    tol: QuadTol,
) -> MultiEstimate {
    const MAX_DEPTH: usize = 40;
    let m = integrand.components();
    let k = domain.dim();
    let domain_measure: f64 = (0..k).map(|i| domain.width(i)).product();
    let mut total = MultiEstimate {
        values: vec![0.0; m],
        errors: vec![0.0; m],
        evals: 0,
    };
    let mut stack: Vec<(ParamBox, usize)> = initial_cells(domain)
        .into_iter()
        .rev()
        .map(|c| (c, 0))
        .collect();
    while let Some((cell, depth)) = stack.pop() {
        let cell_measure: f64 = (0..k).map(|i| cell.width(i)).product();
        let cell_tol = QuadTol::new(tol.abs * cell_measure / domain_measure, tol.rel);
        let est = match classify(&cell, clip) {
            CellClass::Outside => continue,
            CellClass::Inside => {
                let mut u = cell.center();
                nested(integrand, &cell, None, k - 1, &mut u, cell_tol)
            }
            CellClass::Straddles { image_size }
                if image_size > 0.5 * clip.radius && depth < MAX_DEPTH =>
            {
                for child in split(&cell).into_iter().rev() {
                    stack.push((child, depth + 1));
                }
                continue;
            }
            CellClass::Straddles { .. } => {
                let mut u = cell.center();
                nested(integrand, &cell, Some(clip), k - 1, &mut u, cell_tol)
            }
        };
        for c in 0..m {
            total.values[c] += est.values[c];
            total.errors[c] += est.errors[c];
        }
        total.evals += est.evals;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    #[test]
    fn integrates_smooth_functions() {
        let est = adaptive_gk(|x| x.sin(), 0.0, PI, QuadTol::default());
        assert!((est.value - 2.0).abs() < 1e-14);
        let est = adaptive_gk(|x| (-x * x).exp(), -10.0, 10.0, QuadTol::default());
        assert!((est.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn handles_endpoint_square_root() {
        let est = adaptive_gk(|x| x.sqrt(), 0.0, 1.0, QuadTol::new(1e-13, 1e-12));
        assert!((est.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn negative_intervals_of_quadratic() {
        let iv = negative_intervals(|t| t * t - 0.25, -1.0, 1.0);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].0 + 0.5).abs() < 1e-15 && (iv[0].1 - 0.5).abs() < 1e-15);
        assert!(negative_intervals(|t| t + 5.0, 0.0, 1.0).is_empty());
        assert_eq!(negative_intervals(|t| t - 5.0, 0.0, 1.0), vec![(0.0, 1.0)]);
    }

    #[test]
    fn clipped_disk_area() {
        // polar chart of the unit disk, clipped to radius 0.3
        let domain = ParamBox::new(vec![0.0, 0.0], vec![1.0, 2.0 * PI]);
        let point = |u: &[f64]| DVector::from_vec(vec![u[0] * u[1].cos(), u[0] * u[1].sin()]);
        let integrand = (1usize, |u: &[f64]| vec![u[0]]);
        let clip = Clip {
            point: &point,
            radius: 0.3,
        };
        let est = integrate_box(&integrand, &domain, Some(&clip), QuadTol::default());
        assert!((est.values[0] - PI * 0.09).abs() < 1e-13);
    }

    #[test]
    fn clipped_offcenter_blob() {
        // Cartesian chart of a square, clip ball centred off the cell grid
        let domain = ParamBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]);
        let point = |u: &[f64]| DVector::from_vec(vec![u[0] - 0.123, u[1] + 0.377]);
        let integrand = (1usize, |_: &[f64]| vec![1.0]);
        for r in [1e-2, 2.5e-3] {
            let clip = Clip {
                point: &point,
                radius: r,
            };
            let est = integrate_box(&integrand, &domain, Some(&clip), QuadTol::new(1e-16, 1e-12));
            assert!(
                (est.values[0] / (PI * r * r) - 1.0).abs() < 1e-10,
                "r = {r}: {}",
                est.values[0]
            );
        }
    }
}
