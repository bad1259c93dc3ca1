//! Spherical catenoids in `B³`, rotationally symmetric about the `e₃` axis.
//!
//! In Fermi coordinates `(t, σ, φ)` about the axis the metric is
//! `cosh²σ dt² + dσ² + sinh²σ dφ²` and the area of a surface of revolution is
//! `2π ∫ sinh σ ds`. The profile is integrated in arc length `s` with state
//! `(t, σ, χ)`, where `χ` is the angle between the profile and the radial
//! direction:
//!
//! ```text
//! t' = sin χ / cosh σ,   σ' = cos χ,   χ' = -2 sin χ coth 2σ
//! ```
//!
//! starting at the neck `(0, σ₀, π/2)`. The first integral
//! `sinh σ cosh σ sin χ = sinh σ₀ cosh σ₀` monitors the integration. Far from
//! the neck the profile is replaced by its asymptotic expansion in
//! `y = sech σ`, which is analytic up to the ideal boundary at `y = 0`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Chart, ChartMap, ParamBox, Submanifold};
use crate::ball::BallPoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidOptions {
    /// Relative error per step of the Runge–Kutta pair.
    pub rtol: f64,
    pub max_step: f64,
    pub step_budget: usize,
    /// Integration stops once `1 - |x|` falls below this gap.
    pub boundary_gap: f64,
    /// The asymptotic piece takes over where `K / (sinh σ cosh σ)` drops below this.
    pub switch_ratio: f64,
    /// Accepted drift of the first integral, relative to its value.
    pub first_integral_tol: f64,
    /// Accepted relative Euler–Lagrange residual of the interpolated profile.
    pub residual_tol: f64,
}

impl Default for CatenoidOptions {
    fn default() -> Self {
        CatenoidOptions {
            rtol: 1e-10,
            max_step: 0.02,
            step_budget: 1_000_000,
            boundary_gap: 1e-6,
            switch_ratio: 1e-5,
            first_integral_tol: 1e-8,
            residual_tol: 1e-6,
        }
    }
}

/// Accepted Runge–Kutta step with value, first and second derivatives.
#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    y: [f64; 3],
    d1: [f64; 3],
    d2: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct CatenoidProfile {
    neck: f64,
    nodes: Vec<Node>,
    samples: Vec<(f64, f64)>,
    residual: f64,
    first_integral_drift: f64,
    t_infinity: f64,
    s_switch: f64,
    y_switch: f64,
    ideal_fit_residual: f64,
    asymptote_residual: f64,
}

fn rhs(y: &[f64; 3]) -> [f64; 3] {
    let (sc, cc) = y[2].sin_cos();
    [sc / y[1].cosh(), cc, -2.0 * sc / (2.0 * y[1]).tanh()]
}

/// Second derivative along a solution, from the chain rule applied to `rhs`.
fn rhs_prime(y: &[f64; 3], d: &[f64; 3]) -> [f64; 3] {
    let (sc, cc) = y[2].sin_cos();
    let (sh, ch) = (y[1].sinh(), y[1].cosh());
    let sh2 = (2.0 * y[1]).sinh();
    [
        cc * d[2] / ch - sc * sh * d[1] / (ch * ch),
        -sc * d[2],
        -2.0 * cc * d[2] / (2.0 * y[1]).tanh() + 4.0 * sc * d[1] / (sh2 * sh2),
    ]
}

/// Ball coordinates `(R, Z)` of the Fermi point `(t, σ)` in the meridian plane.
fn meridian_point(t: f64, sigma: f64) -> (f64, f64) {
    let cs = sigma.cosh();
    let d = 1.0 + t.cosh() * cs;
    (sigma.sinh() / d, t.sinh() * cs / d)
}

/// Partials `((R_t, R_σ), (Z_t, Z_σ))`.
fn meridian_partials(t: f64, sigma: f64) -> ((f64, f64), (f64, f64)) {
    let (st, ct) = (t.sinh(), t.cosh());
    let (ss, cs) = (sigma.sinh(), sigma.cosh());
    let d = 1.0 + ct * cs;
    let d2 = d * d;
    (
        (-ss * st * cs / d2, (cs + ct) / d2),
        (cs * (ct + cs) / d2, st * ss / d2),
    )
}

fn revolve(r: f64, z: f64, phi: f64) -> DVector<f64> {
    let (s, c) = phi.sin_cos();
    DVector::from_vec(vec![r * c, r * s, z])
}

const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince 5(4) step: the fifth-order value and the error estimate.
fn dp_step(y: &[f64; 3], h: f64) -> ([f64; 3], [f64; 3]) {
    let mut k = [[0.0; 3]; 7];
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for c in 0..3 {
                yi[c] += h * DP_A[i][j] * kj[c];
            }
        }
        k[i] = rhs(&yi);
    }
    let mut y5 = *y;
    let mut err = [0.0; 3];
    for i in 0..7 {
        for c in 0..3 {
            y5[c] += h * DP_B5[i] * k[i][c];
            err[c] += h * (DP_B5[i] - DP_B4[i]) * k[i][c];
        }
    }
    (y5, err)
}

/// Quintic Hermite interpolation on one step: value, first and second derivative.
fn hermite(a: &Node, b: &Node, s: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let h = b.s - a.s;
    let x = (s - a.s) / h;
    let (x2, x3, x4, x5) = (x * x, x.powi(3), x.powi(4), x.powi(5));
    let basis = [
        1.0 - 10.0 * x3 + 15.0 * x4 - 6.0 * x5,
        x - 6.0 * x3 + 8.0 * x4 - 3.0 * x5,
        0.5 * (x2 - 3.0 * x3 + 3.0 * x4 - x5),
        10.0 * x3 - 15.0 * x4 + 6.0 * x5,
        -4.0 * x3 + 7.0 * x4 - 3.0 * x5,
        0.5 * (x3 - 2.0 * x4 + x5),
    ];
    let d_basis = [
        -30.0 * x2 + 60.0 * x3 - 30.0 * x4,
        1.0 - 18.0 * x2 + 32.0 * x3 - 15.0 * x4,
        0.5 * (2.0 * x - 9.0 * x2 + 12.0 * x3 - 5.0 * x4),
        30.0 * x2 - 60.0 * x3 + 30.0 * x4,
        -12.0 * x2 + 28.0 * x3 - 15.0 * x4,
        0.5 * (3.0 * x2 - 8.0 * x3 + 5.0 * x4),
    ];
    let dd_basis = [
        -60.0 * x + 180.0 * x2 - 120.0 * x3,
        -36.0 * x + 96.0 * x2 - 60.0 * x3,
        0.5 * (2.0 - 18.0 * x + 36.0 * x2 - 20.0 * x3),
        60.0 * x - 180.0 * x2 + 120.0 * x3,
        -24.0 * x + 84.0 * x2 - 60.0 * x3,
        0.5 * (6.0 * x - 24.0 * x2 + 20.0 * x3),
    ];
    let mut out = [[0.0; 3]; 3];
    for c in 0..3 {
        let coef = [
            a.y[c],
            h * a.d1[c],
            h * h * a.d2[c],
            b.y[c],
            h * b.d1[c],
            h * h * b.d2[c],
        ];
        for (m, w) in coef.iter().enumerate() {
            out[0][c] += w * basis[m];
            out[1][c] += w * d_basis[m] / h;
            out[2][c] += w * dd_basis[m] / (h * h);
        }
    }
    (out[0], out[1], out[2])
}

fn node_at(s: f64, y: [f64; 3]) -> Node {
    let d1 = rhs(&y);
    Node {
        s,
        y,
        d1,
        d2: rhs_prime(&y, &d1),
    }
}

impl CatenoidProfile {
    /// Integrates the profile with neck radius `σ₀`.
    pub fn solve(neck: f64, opts: &CatenoidOptions) -> Result<Self> {
        if !(neck > 0.0 && neck.is_finite()) {
            return Err(Error::domain(format!(
                "catenoid neck {neck} must be positive"
            )));
        }
        let k = neck.sinh() * neck.cosh();
        let mut y = [0.0, neck, std::f64::consts::FRAC_PI_2];
        let mut s = 0.0;
        let mut h: f64 = 1e-3;
        let mut nodes = vec![node_at(0.0, y)];
        let mut steps = 0usize;
        loop {
            let (t, sigma) = (y[0], y[1]);
            let (r, z) = meridian_point(t, sigma);
            if 1.0 - r.hypot(z) < opts.boundary_gap {
                break;
            }
            if steps >= opts.step_budget {
                return Err(Error::Convergence(format!(
                    "catenoid profile did not reach the boundary within {} steps",
                    opts.step_budget
                )));
            }
            steps += 1;
            h = h.min(opts.max_step);
            let (y5, err) = dp_step(&y, h);
            let scale = [
                1e-14 + opts.rtol * y[0].abs().max(y5[0].abs()),
                1e-14 + opts.rtol * y[1].abs().max(y5[1].abs()),
                opts.rtol * y[2].abs().max(y5[2].abs()),
            ];
            let norm = (0..3).map(|c| err[c].abs() / scale[c]).fold(0.0, f64::max);
            if norm <= 1.0 {
                s += h;
                y = y5;
                nodes.push(node_at(s, y));
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
            if !(h > 1e-14) {
                return Err(Error::Convergence("catenoid step size underflow".into()));
            }
        }

        let first_integral_drift = nodes
            .iter()
            .map(|n| (n.y[1].sinh() * n.y[1].cosh() * n.y[2].sin() - k).abs() / k)
            .fold(0.0, f64::max);
        if first_integral_drift > opts.first_integral_tol {
            return Err(Error::Convergence(format!(
                "first integral drifted by {first_integral_drift:e}"
            )));
        }

        // switch where sinh σ cosh σ = K / switch_ratio
        let sigma_switch = (0.5 * (2.0 * k / opts.switch_ratio).asinh()).max(neck + 1.0);
        let last = nodes.last().unwrap();
        if last.y[1] <= sigma_switch {
            return Err(Error::Convergence(format!(
                "profile ends at σ = {} before the asymptotic regime σ = {sigma_switch}",
                last.y[1]
            )));
        }
        let mut profile = CatenoidProfile {
            neck,
            nodes,
            samples: Vec::new(),
            residual: 0.0,
            first_integral_drift,
            t_infinity: 0.0,
            s_switch: 0.0,
            y_switch: 1.0 / sigma_switch.cosh(),
            ideal_fit_residual: 0.0,
            asymptote_residual: 0.0,
        };
        profile.s_switch = profile.solve_arc_length(|st| st[1] - sigma_switch);
        let t_switch = profile.state(profile.s_switch)[0];
        profile.t_infinity = t_switch + profile.asymptotic_gap(profile.y_switch);
        profile.samples = profile.build_samples();
        profile.residual = profile.euler_lagrange_residual();
        if !(profile.residual <= opts.residual_tol) {
            return Err(Error::Convergence(format!(
                "Euler–Lagrange residual {:e} above {:e}",
                profile.residual, opts.residual_tol
            )));
        }
        profile.asymptote_residual = profile
            .nodes
            .iter()
            .filter(|n| n.y[1] > sigma_switch)
            .map(|n| {
                (n.y[0] - (profile.t_infinity - profile.asymptotic_gap(1.0 / n.y[1].cosh()))).abs()
            })
            .fold(0.0, f64::max);
        profile.ideal_fit_residual = profile.richardson_ideal_residual();
        Ok(profile)
    }

    /// `t∞ - t` on the asymptotic piece as a function of `y = sech σ`:
    /// `K (atanh y - y) + K³ y⁷ / 14`, dropping terms of order `K⁵ y¹¹`.
    fn asymptotic_gap(&self, y: f64) -> f64 {
        let k = self.first_integral();
        k * (y.atanh() - y) + k.powi(3) * y.powi(7) / 14.0
    }

    fn asymptotic_gap_derivative(&self, y: f64) -> f64 {
        let k = self.first_integral();
        k * y * y / ((1.0 - y) * (1.0 + y)) + 0.5 * k.powi(3) * y.powi(6)
    }

    /// `sinh σ₀ cosh σ₀`.
    pub fn first_integral(&self) -> f64 {
        self.neck.sinh() * self.neck.cosh()
    }

    pub fn neck(&self) -> f64 {
        self.neck
    }

    /// `(t, σ)` pairs in Fermi coordinates at the accepted steps, both halves,
    /// ordered by `t`.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Largest relative Euler–Lagrange residual of `σ(t)` on the neck piece.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest relative drift of the first integral over the integration.
    pub fn first_integral_drift(&self) -> f64 {
        self.first_integral_drift
    }

    /// Axial coordinate of the ideal circles, `±t∞`.
    pub fn t_infinity(&self) -> f64 {
        self.t_infinity
    }

    /// Euclidean radius `1 / cosh t∞` of each ideal circle.
    pub fn ideal_radius(&self) -> f64 {
        1.0 / self.t_infinity.cosh()
    }

    /// Height `tanh t∞` of the upper ideal circle.
    pub fn ideal_height(&self) -> f64 {
        self.t_infinity.tanh()
    }

    /// Gap between the ideal circle extrapolated from integrated chart points
    /// and the circle of the asymptotic piece.
    pub fn ideal_fit_residual(&self) -> f64 {
        self.ideal_fit_residual
    }

    /// Largest gap in `t` between integrated steps past the switch and the
    /// asymptotic piece.
    pub fn asymptote_residual(&self) -> f64 {
        self.asymptote_residual
    }

    /// Arc length where the neck piece hands over to the asymptotic piece.
    pub fn switch_arc_length(&self) -> f64 {
        self.s_switch
    }

    /// `sech σ` at the hand-over.
    pub fn switch_sech(&self) -> f64 {
        self.y_switch
    }

    /// Arc length at which integration stopped.
    pub fn end_arc_length(&self) -> f64 {
        self.nodes.last().unwrap().s
    }

    /// Interpolated state `(t, σ, χ)` at signed arc length `s`.
    pub fn state(&self, s: f64) -> [f64; 3] {
        self.state_with_derivatives(s).0
    }

    /// State with its first and second arc-length derivatives from the
    /// interpolant. The profile is mirrored for `s < 0`: `t` is odd, `σ` even
    /// and `χ ↦ π - χ`.
    pub fn state_with_derivatives(&self, s: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let a = s.abs();
        let last = self.nodes.len() - 1;
        let i = match self.nodes.binary_search_by(|n| n.s.total_cmp(&a)) {
            Ok(i) => i.min(last - 1),
            Err(i) => i.clamp(1, last) - 1,
        };
        let (mut y, mut d1, mut d2) = hermite(&self.nodes[i], &self.nodes[i + 1], a);
        if s < 0.0 {
            y[0] = -y[0];
            y[2] = std::f64::consts::PI - y[2];
            d1[1] = -d1[1];
            d1[2] = -d1[2];
            d2[0] = -d2[0];
            d2[2] = -d2[2];
        }
        (y, d1, d2)
    }

    /// Ball point of the neck piece at `(s, φ)`.
    pub fn point(&self, s: f64, phi: f64) -> DVector<f64> {
        let st = self.state(s);
        let (r, z) = meridian_point(st[0], st[1]);
        revolve(r, z, phi)
    }

    /// Ball point of the upper asymptotic piece at `y = sech σ`.
    pub fn far_point(&self, y: f64, phi: f64) -> DVector<f64> {
        let (r, z, _, _) = self.far_meridian(y);
        revolve(r, z, phi)
    }

    fn far_meridian(&self, y: f64) -> (f64, f64, f64, f64) {
        let t = self.t_infinity - self.asymptotic_gap(y);
        let t_y = -self.asymptotic_gap_derivative(y);
        let (st, ct) = (t.sinh(), t.cosh());
        let root = ((1.0 - y) * (1.0 + y)).sqrt();
        let d = y + ct;
        let r = root / d;
        let z = st / d;
        let d_y = 1.0 + st * t_y;
        let r_y = (-y / root * d - root * d_y) / (d * d);
        let z_y = (ct * t_y * d - st * d_y) / (d * d);
        (r, z, r_y, z_y)
    }

    /// Root of `f(state(s))` for `f` increasing along the profile.
    fn solve_arc_length<F: Fn(&[f64; 3]) -> f64>(&self, f: F) -> f64 {
        let (mut lo, mut hi) = (0.0, self.end_arc_length());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(&self.state(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn build_samples(&self) -> Vec<(f64, f64)> {
        let upper = self.nodes.iter().map(|n| (n.y[0], n.y[1]));
        let mut out: Vec<(f64, f64)> = self
            .nodes
            .iter()
            .skip(1)
            .rev()
            .map(|n| (-n.y[0], n.y[1]))
            .collect();
        out.extend(upper);
        out
    }

    /// Residual of `σ(t)` in the Euler–Lagrange equation of
    /// `L = sinh σ √(cosh²σ + σ_t²)`, namely
    /// `σ_tt = cosh σ (cosh²σ + σ_t²)/sinh σ + sinh σ (cosh²σ + 2σ_t²)/cosh σ`,
    /// evaluated from interpolant derivatives at step midpoints.
    fn euler_lagrange_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.nodes.windows(2) {
            if w[0].s >= self.s_switch {
                break;
            }
            let s = 0.5 * (w[0].s + w[1].s);
            let (y, d1, d2) = hermite(&w[0], &w[1], s);
            let (sh, ch) = (y[1].sinh(), y[1].cosh());
            let p = d1[1] / d1[0];
            let p_t = (d2[1] * d1[0] - d1[1] * d2[0]) / (d1[0] * d1[0] * d1[0]);
            let target = ch * (ch * ch + p * p) / sh + sh * (ch * ch + 2.0 * p * p) / ch;
            worst = worst.max((p_t - target).abs() / target.abs().max(1.0));
        }
        worst
    }

    /// Extrapolates the direction `x/|x|` of chart points at `1 - |x|` equal to
    /// `1e-3, 1e-4, 1e-5` quadratically to zero gap and compares with the
    /// ideal circle.
    fn richardson_ideal_residual(&self) -> f64 {
        let gaps = [1e-3, 1e-4, 1e-5];
        let dirs: Vec<(f64, f64)> = gaps
            .iter()
            .map(|&g| {
                let s = self.solve_arc_length(|st| {
                    let (r, z) = meridian_point(st[0], st[1]);
                    r.hypot(z) - (1.0 - g)
                });
                let st = self.state(s);
                let (r, z) = meridian_point(st[0], st[1]);
                let m = r.hypot(z);
                (r / m, z / m)
            })
            .collect();
        let lagrange_at_zero = |v: [f64; 3]| -> f64 {
            let mut acc = 0.0;
            for i in 0..3 {
                let mut w = 1.0;
                for j in 0..3 {
                    if i != j {
                        w *= gaps[j] / (gaps[j] - gaps[i]);
                    }
                }
                acc += w * v[i];
            }
            acc
        };
        let r0 = lagrange_at_zero([dirs[0].0, dirs[1].0, dirs[2].0]);
        let z0 = lagrange_at_zero([dirs[0].1, dirs[1].1, dirs[2].1]);
        (r0 - self.ideal_radius())
            .abs()
            .max((z0 - self.ideal_height()).abs())
    }

    /// Interior and ideal charts of the catenoid.
    pub fn to_submanifold(self: &Arc<Self>) -> Result<Submanifold> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let neck_chart = Chart::new(
            ParamBox::new(vec![-self.s_switch, 0.0], vec![self.s_switch, two_pi]),
            Arc::new(NeckChart(self.clone())),
            true,
        );
        let far = |sign: f64| {
            Chart::new(
                ParamBox::new(vec![0.0, 0.0], vec![self.y_switch, two_pi]),
                Arc::new(FarChart {
                    profile: self.clone(),
                    sign,
                }),
                true,
            )
        };
        let circle = |sign: f64| {
            Chart::new(
                ParamBox::new(vec![0.0], vec![two_pi]),
                Arc::new(IdealCircle {
                    radius: self.ideal_radius(),
                    height: sign * self.ideal_height(),
                }),
                true,
            )
        };
        let neck_point = BallPoint::from_slice(&[(0.5 * self.neck).tanh(), 0.0, 0.0])?;
        Ok(Submanifold {
            k: 2,
            n: 3,
            interior_charts: vec![neck_chart, far(1.0), far(-1.0)],
            ideal_charts: vec![circle(1.0), circle(-1.0)],
            contains_origin: false,
            totally_geodesic: false,
            candidate_density_points: vec![neck_point],
            label: format!("catenoid(σ₀={})", self.neck),
        })
    }
}

#[derive(Debug)]
struct NeckChart(Arc<CatenoidProfile>);

impl ChartMap for NeckChart {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn param_dim(&self) -> usize {
        2
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        self.0.point(u[0], u[1])
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let st = self.0.state(u[0]);
        let d = rhs(&st);
        let (r, _) = meridian_point(st[0], st[1]);
        let ((r_t, r_s), (z_t, z_s)) = meridian_partials(st[0], st[1]);
        let dr = r_t * d[0] + r_s * d[1];
        let dz = z_t * d[0] + z_s * d[1];
        let (sp, cp) = u[1].sin_cos();
        DMatrix::from_row_slice(3, 2, &[dr * cp, -r * sp, dr * sp, r * cp, dz, 0.0])
    }
}

/// Asymptotic end `y ∈ [0, y_switch]`; `sign` picks the upper or lower end.
#[derive(Debug)]
struct FarChart {
    profile: Arc<CatenoidProfile>,
    sign: f64,
}

impl ChartMap for FarChart {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn param_dim(&self) -> usize {
        2
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        let (r, z, _, _) = self.profile.far_meridian(u[0]);
        revolve(r, self.sign * z, u[1])
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let (r, _, r_y, z_y) = self.profile.far_meridian(u[0]);
        let (sp, cp) = u[1].sin_cos();
        DMatrix::from_row_slice(
            3,
            2,
            &[r_y * cp, -r * sp, r_y * sp, r * cp, self.sign * z_y, 0.0],
        )
    }
}

#[derive(Debug)]
struct IdealCircle {
    radius: f64,
    height: f64,
}

impl ChartMap for IdealCircle {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn param_dim(&self) -> usize {
        1
    }

    fn eval(&self, u: &[f64]) -> DVector<f64> {
        revolve(self.radius, self.height, u[0])
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let (s, c) = u[0].sin_cos();
        DMatrix::from_column_slice(3, 1, &[-self.radius * s, self.radius * c, 0.0])
    }
}

/// Catenoid in `B³` with neck at hyperbolic distance `neck` from the `e₃` axis.
pub fn catenoid(neck: f64, n: usize) -> Result<Submanifold> {
    catenoid_with(neck, n, &CatenoidOptions::default()).map(|(s, _)| s)
}

/// As [`catenoid`], also returning the profile.
pub fn catenoid_with(
    neck: f64,
    n: usize,
    opts: &CatenoidOptions,
) -> Result<(Submanifold, Arc<CatenoidProfile>)> {
    if n != 3 {
        return Err(Error::domain(format!(
            "catenoids are built in dimension 3, not {n}"
        )));
    }
    let profile = Arc::new(CatenoidProfile::solve(neck, opts)?);
    Ok((profile.to_submanifold()?, profile))
}
