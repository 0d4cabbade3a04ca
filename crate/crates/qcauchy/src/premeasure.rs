//! Finite-dimensional cylindrical pre-measures of the Cauchy functional.
//!
//! A cylinder base is a set of time increments `Δt_j` and rows `α_j ∈ Rᵏ`. The
//! pre-measure on `Rᵏ` is the law of `Σ_j x_j α_j` with each `x_j` distributed
//! by the one-dimensional functional `C_{iΔt_j}`, so its momentum symbol is
//! `exp(i Σ_j |(α_j, p)| Δt_j)`. Its atoms sit at the vertices `Σ_j ±Δt_j α_j`.
//!
//! Box and ball measures are computed in momentum space against a mollified
//! indicator, `η̂(hp) = exp(−(hp)⁸)`. That mollifier has vanishing moments up
//! to order seven. Values at widths `2h` and `h` are combined with the factor
//! `2⁸`; the mollifier error decays faster than any power here, so the
//! correction mainly serves as an error estimate.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::momentum::{pair_via_parseval, ParsevalConfig, ScalarSymbol};
use crate::quad::{self, PANEL_ORDER};
use crate::specfun;
use crate::testfn::TestFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Momentum cutoff in units of `1/h`, where the mollifier is below e^{-88}.
const MOLLIFIER_REACH: f64 = 1.75;
/// Extrapolation factor between the two mollifier widths.
const RICHARDSON: f64 = 256.0;
/// Largest `n` whose `2ⁿ` atoms are enumerated.
const MAX_ATOM_ROWS: usize = 16;

/// A cylinder base: increments `Δt_j`, rows `α_j` and the bound `N` on
/// `Σ_j |α_j| Δt_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSpec {
    delta_t: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    bound: f64,
}

impl CylinderSpec {
    pub fn new(delta_t: Vec<f64>, alpha: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        let n = delta_t.len();
        if n == 0 || alpha.len() != n {
            return Err(Error::InvalidSpec("need one α row per time increment".into()));
        }
        let k = alpha[0].len();
        if k == 0 || k > n || alpha.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidSpec("α rows must share a base dimension 1 ≤ k ≤ n".into()));
        }
        if delta_t.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidSpec("time increments must be positive".into()));
        }
        if alpha.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidSpec("α entries must be finite".into()));
        }
        if k == n {
            let m = DMatrix::from_fn(n, n, |i, j| alpha[i][j]);
            if m.determinant().abs() <= 1e-12 {
                return Err(Error::InvalidSpec("square α must be nonsingular".into()));
            }
        }
        let spec = Self { delta_t, alpha, bound };
        if !(spec.constraint_norm() < bound) {
            return Err(Error::InvalidSpec(format!(
                "constraint norm {} is not below the bound {bound}",
                spec.constraint_norm()
            )));
        }
        Ok(spec)
    }

    /// Spec whose bound is comfortably above its own constraint norm.
    pub fn unbounded(delta_t: Vec<f64>, alpha: Vec<Vec<f64>>) -> Result<Self> {
        let norm: f64 = alpha
            .iter()
            .zip(&delta_t)
            .map(|(r, d)| r.iter().map(|a| a * a).sum::<f64>().sqrt() * d.abs())
            .sum();
        Self::new(delta_t, alpha, 2.0 * norm + 1.0)
    }

    /// Identity rows: the product of one-dimensional functionals.
    pub fn diagonal(delta_t: Vec<f64>) -> Result<Self> {
        let n = delta_t.len();
        let alpha = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::unbounded(delta_t, alpha)
    }

    /// One-dimensional base with coefficients `α_j`.
    pub fn line(delta_t: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        Self::unbounded(delta_t, alpha.into_iter().map(|a| vec![a]).collect())
    }

    pub fn n(&self) -> usize {
        self.delta_t.len()
    }

    pub fn k(&self) -> usize {
        self.alpha[0].len()
    }

    pub fn delta_t(&self) -> &[f64] {
        &self.delta_t
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn total_time(&self) -> f64 {
        self.delta_t.iter().sum()
    }

    /// `Σ_j |α_j| Δt_j`.
    pub fn constraint_norm(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.delta_t)
            .map(|(r, d)| r.iter().map(|a| a * a).sum::<f64>().sqrt() * d)
            .sum()
    }

    /// `Σ_j |(α_j, ξ)| Δt_j`.
    pub fn radon_q(&self, xi: &[f64]) -> f64 {
        self.alpha
            .iter()
            .zip(&self.delta_t)
            .map(|(r, d)| r.iter().zip(xi).map(|(a, x)| a * x).sum::<f64>().abs() * d)
            .sum()
    }

    /// The spec restricted to the first `keep` base coordinates.
    pub fn project(&self, keep: usize) -> Result<Self> {
        if keep == 0 || keep > self.k() {
            return domain("projection must keep between 1 and k coordinates");
        }
        let alpha = self.alpha.iter().map(|r| r[..keep].to_vec()).collect();
        Self::new(self.delta_t.clone(), alpha, self.bound)
    }

    /// Atoms `Σ_j s_j Δt_j α_j`, `s ∈ {±1}ⁿ`.
    pub fn atoms(&self) -> Result<Vec<Vec<f64>>> {
        let k = self.k();
        if k == 1 {
            let t = effective_time(self)?;
            return Ok(vec![vec![-t], vec![t]]);
        }
        let n = self.n();
        if n > MAX_ATOM_ROWS {
            return domain(format!("atom enumeration is limited to n ≤ {MAX_ATOM_ROWS}"));
        }
        Ok((0..1usize << n)
            .map(|mask| {
                (0..k)
                    .map(|c| {
                        (0..n)
                            .map(|j| {
                                let s = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                                s * self.delta_t[j] * self.alpha[j][c]
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect())
    }

    /// Largest distance of an atom from the origin, equal to `max_ξ Q(ξ)`.
    pub fn max_radius(&self) -> Result<f64> {
        Ok(self.atoms()?.iter().map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max))
    }
}

/// `T = Σ_j |α_j| Δt_j` for a one-dimensional base.
pub fn effective_time(spec: &CylinderSpec) -> Result<f64> {
    if spec.k() != 1 {
        return domain("effective time needs a one-dimensional base");
    }
    Ok(spec.alpha.iter().zip(&spec.delta_t).map(|(r, d)| r[0].abs() * d).sum())
}

/// `exp(i Σ_j |(α_j, p)| Δt_j)`.
pub fn symbol_nd(spec: &CylinderSpec, p: &[f64]) -> Complex64 {
    Complex64::from_polar(1.0, spec.radon_q(p))
}

/// Interval measure with a flag for endpoints on the spikes `±T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMeasure {
    pub value: Complex64,
    /// Set when an endpoint lies within 1e-12 of `±T`. The spike then counts
    /// with a quarter of the total weight, and the log term is taken as a
    /// finite part.
    pub boundary_hit: bool,
}

const SPIKE_TOUCH: f64 = 1e-12;

/// `∫_a^b C_{iT}` in closed form: half a unit at each spike inside, plus
/// `(i/2π)[ln|(T + x)/(T − x)|]_a^b`.
pub fn interval_measure_1d(spec: &CylinderSpec, a: f64, b: f64) -> Result<IntervalMeasure> {
    let t = effective_time(spec)?;
    interval_measure_at(t, a, b)
}

pub(crate) fn interval_measure_at(t: f64, a: f64, b: f64) -> Result<IntervalMeasure> {
    if !(a < b) || a.is_nan() || b.is_nan() {
        return domain("interval needs a < b");
    }
    if t == 0.0 {
        // C_{i0} is δ(x).
        let w = if a == 0.0 || b == 0.0 { 0.5 } else if a < 0.0 && b > 0.0 { 1.0 } else { 0.0 };
        return Ok(IntervalMeasure { value: Complex64::new(w, 0.0), boundary_hit: a == 0.0 || b == 0.0 });
    }
    let mut hit = false;
    let mut spikes = 0.0;
    for s in [t, -t] {
        let on_a = (a - s).abs() <= SPIKE_TOUCH;
        let on_b = (b - s).abs() <= SPIKE_TOUCH;
        if on_a || on_b {
            hit = true;
            spikes += 0.25;
        } else if a < s && s < b {
            spikes += 0.5;
        }
    }
    // ln|T + x| − ln|T − x| with the logarithm of a vanishing factor dropped.
    let log_ratio = |x: f64| -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        let lg = |v: f64| if v.abs() <= SPIKE_TOUCH { 0.0 } else { v.abs().ln() };
        lg(t + x) - lg(t - x)
    };
    let logs = (log_ratio(b) - log_ratio(a)) / (2.0 * PI);
    Ok(IntervalMeasure { value: Complex64::new(spikes, logs), boundary_hit: hit })
}

/// One side of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Finite(f64, f64),
    /// The whole line; its transform is `2πδ(p)`.
    Full,
}

/// Controls for mollified momentum-space measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    /// Mollifier width as a fraction of the smallest clearance between
    /// box edges and atoms (`h = clearance / divisor`, default 80). The
    /// comparison width is `2h`.
    pub divisor: Option<f64>,
    /// Panel width in units of `π/(2·frequency)`.
    pub panel_fraction: f64,
    /// Largest accepted Richardson correction relative to `max(1, |value|)`.
    /// The mollifier error decays faster than any power of `h`, so the
    /// correction mostly serves as an error estimate.
    pub tolerance: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self { divisor: None, panel_fraction: 3.0, tolerance: 1e-4 }
    }
}

/// An extrapolated measure and the size of the extrapolation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: Complex64,
    pub estimate: f64,
}

fn mollifier(x: f64) -> f64 {
    (-(x.powi(8))).exp()
}

/// `∫_a^b e^{−ipx} dx`, written through the midpoint phase and a sinc so that
/// it stays accurate as `p → 0`.
fn interval_transform(a: f64, b: f64, p: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let arg = p * half;
    let sinc = if arg.abs() < 1e-4 { 1.0 - arg * arg / 6.0 } else { arg.sin() / arg };
    Complex64::from_polar(2.0 * half * sinc, -p * mid)
}

fn richardson(cfg: &MeasureConfig, what: &str, coarse: Complex64, fine: Complex64) -> Result<Measured> {
    let value = fine + (fine - coarse) / (RICHARDSON - 1.0);
    let estimate = (value - fine).norm();
    if estimate > cfg.tolerance * value.norm().max(1.0) {
        return Err(Error::Convergence { what: what.into(), estimate });
    }
    Ok(Measured { value, estimate })
}

struct BoxAxis {
    /// Index of the base coordinate.
    axis: usize,
    a: f64,
    b: f64,
    h: f64,
    panel: f64,
}

/// Breakpoints where `(α_j, p)` vanishes along the innermost axis, and, for
/// three integrated axes, where two such planes cross above the middle axis.
fn kink_points(spec: &CylinderSpec, axes: &[BoxAxis], depth: usize, prefix: &[f64]) -> Vec<f64> {
    let mut pts = vec![0.0];
    let inner = axes.len() - 1;
    let coeff = |j: usize, d: usize| spec.alpha[j][axes[d].axis];
    let fixed = |j: usize| -> f64 { (0..depth).map(|d| coeff(j, d) * prefix[d]).sum() };
    if depth == inner {
        for j in 0..spec.n() {
            let c = coeff(j, depth);
            if c != 0.0 {
                pts.push(-fixed(j) / c);
            }
        }
    } else if depth + 2 == axes.len() {
        for j in 0..spec.n() {
            let (cj, dj) = (coeff(j, depth), coeff(j, inner));
            if dj == 0.0 && cj != 0.0 {
                pts.push(-fixed(j) / cj);
            }
            for l in j + 1..spec.n() {
                let (cl, dl) = (coeff(l, depth), coeff(l, inner));
                let det = cj * dl - cl * dj;
                if det.abs() > 1e-14 {
                    pts.push((-fixed(j) * dl + fixed(l) * dj) / det);
                }
            }
        }
    }
    pts.retain(|x| x.is_finite());
    pts.sort_by(|a, b| a.total_cmp(b));
    pts
}

/// Gauss nodes of the innermost axis with the weighted axis factor, built
/// once per width and reused for every outer point.
struct InnerTable {
    panels: Vec<(f64, f64)>,
    nodes: Vec<Vec<(f64, Complex64)>>,
}

fn axis_factor(ax: &BoxAxis, scale: f64, p: f64) -> Complex64 {
    interval_transform(ax.a, ax.b, p) * mollifier(scale * ax.h * p)
}

fn panel_nodes(lo: f64, hi: f64, f: impl Fn(f64) -> Complex64) -> Vec<(f64, Complex64)> {
    let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    quad::rule(PANEL_ORDER).iter().map(|&(x, w)| (mid + half * x, w * half * f(mid + half * x))).collect()
}

impl InnerTable {
    fn new(ax: &BoxAxis, scale: f64, reach: f64) -> Self {
        let pts = quad::with_extra(quad::uniform(-reach, reach, ax.panel), &[0.0]);
        let panels: Vec<(f64, f64)> = pts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect();
        let nodes = panels.iter().map(|&(lo, hi)| panel_nodes(lo, hi, |p| axis_factor(ax, scale, p))).collect();
        Self { panels, nodes }
    }
}

/// `(2π)^{-d} ∫ S(p) Π_k G_k(p_k) dp` over the finite axes (`p = 0` on the
/// whole-line axes).
///
/// `S` is even and each `G_k(−p) = conj G_k(p)`, so only `p₀ ≥ 0` is
/// integrated, with the integrand `2 S Re(Π G)`.
fn integrate_axes(spec: &CylinderSpec, axes: &[BoxAxis], scale: f64) -> Complex64 {
    let k = spec.k();
    let d = axes.len();
    let reach: Vec<f64> = axes.iter().map(|ax| MOLLIFIER_REACH / (scale * ax.h)).collect();
    let inner = &axes[d - 1];
    let table = InnerTable::new(inner, scale, reach[d - 1]);
    let symbol_at = |prefix: &[f64], last: f64| -> Complex64 {
        let mut full = vec![0.0; k];
        for (i, ax) in axes[..d - 1].iter().enumerate() {
            full[ax.axis] = prefix[i];
        }
        full[inner.axis] = last;
        symbol_nd(spec, &full)
    };
    // Innermost integral for fixed outer coordinates with product factor `g`.
    let inner_sum = |prefix: &[f64], g: Complex64| -> Complex64 {
        let kinks = kink_points(spec, axes, d - 1, prefix);
        let mut acc = ZERO;
        for (i, &(lo, hi)) in table.panels.iter().enumerate() {
            let inside: Vec<f64> = kinks.iter().copied().filter(|&x| x > lo && x < hi).collect();
            if inside.is_empty() {
                for &(p, wg) in &table.nodes[i] {
                    acc += symbol_at(prefix, p) * 2.0 * (g * wg).re;
                }
            } else {
                let mut cuts = vec![lo];
                cuts.extend(inside);
                cuts.push(hi);
                for c in cuts.windows(2) {
                    for (p, wg) in panel_nodes(c[0], c[1], |p| axis_factor(inner, scale, p)) {
                        acc += symbol_at(prefix, p) * 2.0 * (g * wg).re;
                    }
                }
            }
        }
        acc
    };
    let total = if d == 1 {
        // The single axis is its own outer axis: keep p ≥ 0 only.
        let mut acc = ZERO;
        for (i, &(lo, _)) in table.panels.iter().enumerate() {
            if lo >= 0.0 {
                for &(p, wg) in &table.nodes[i] {
                    acc += symbol_at(&[], p) * 2.0 * wg.re;
                }
            }
        }
        acc
    } else {
        let outer = &axes[0];
        let pts = quad::with_extra(quad::uniform(0.0, reach[0], outer.panel), &kink_points(spec, axes, 0, &[]));
        let panels: Vec<(f64, f64)> = pts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect();
        let parts: Vec<Complex64> = panels
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = ZERO;
                for (p0, w0) in panel_nodes(lo, hi, |p| axis_factor(outer, scale, p)) {
                    if d == 2 {
                        acc += inner_sum(&[p0], w0);
                    } else {
                        let middle = &axes[1];
                        let mid_pts =
                            quad::with_extra(quad::uniform(-reach[1], reach[1], middle.panel), &kink_points(spec, axes, 1, &[p0]));
                        for m in mid_pts.windows(2).filter(|w| w[1] > w[0]) {
                            for (p1, w1) in panel_nodes(m[0], m[1], |p| axis_factor(middle, scale, p)) {
                                acc += inner_sum(&[p0, p1], w0 * w1);
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        parts.into_iter().sum()
    };
    total / (2.0 * PI).powi(d as i32)
}

/// Measure of a box (a product of intervals and whole lines) under the
/// pre-measure, for base dimension `k ≤ 3`.
pub fn box_measure_nd(spec: &CylinderSpec, sides: &[Side], cfg: &MeasureConfig) -> Result<Measured> {
    let k = spec.k();
    if sides.len() != k {
        return domain("box dimension differs from the base dimension");
    }
    if k > 3 {
        return domain("numeric box measures are limited to k ≤ 3");
    }
    let atoms = spec.atoms()?;
    let divisor = cfg.divisor.unwrap_or(80.0);
    let mut axes = Vec::new();
    for (c, side) in sides.iter().enumerate() {
        match *side {
            Side::Full => {}
            Side::Finite(a, b) => {
                if !(a < b && a.is_finite() && b.is_finite()) {
                    return domain("box sides need finite a < b");
                }
                let mut clearance = b - a;
                for atom in &atoms {
                    clearance = clearance.min((atom[c] - a).abs()).min((atom[c] - b).abs());
                }
                if clearance <= SPIKE_TOUCH * (1.0 + a.abs().max(b.abs())) {
                    return domain("a box edge passes through an atom");
                }
                let speed = a.abs().max(b.abs()) + spec.alpha.iter().zip(&spec.delta_t).map(|(r, d)| r[c].abs() * d).sum::<f64>();
                axes.push(BoxAxis { axis: c, a, b, h: clearance / divisor, panel: cfg.panel_fraction * PI / (2.0 * speed) });
            }
        }
    }
    if axes.is_empty() {
        return Ok(Measured { value: Complex64::new(1.0, 0.0), estimate: 0.0 });
    }
    let coarse = integrate_axes(spec, &axes, 2.0);
    let fine = integrate_axes(spec, &axes, 1.0);
    richardson(cfg, "box measure extrapolation", coarse, fine)
}

/// Radial transform of the indicator of the disc or ball of radius `rho`.
fn ball_indicator_transform(k: usize, rho: f64, r: f64) -> Result<f64> {
    let x = rho * r;
    Ok(match k {
        2 => {
            if x < 1e-8 {
                PI * rho * rho
            } else {
                2.0 * PI * rho * specfun::bessel_j1(x)? / r
            }
        }
        _ => {
            if x < 1e-3 {
                4.0 * PI * rho.powi(3) / 3.0 * (1.0 - x * x / 10.0)
            } else {
                4.0 * PI * (x.sin() - x * x.cos()) / r.powi(3)
            }
        }
    })
}

/// Angles in `[0, 2π]` where some `(α_j, ω)` changes sign.
pub(crate) fn circle_kinks(spec: &CylinderSpec) -> Vec<f64> {
    let mut pts = vec![0.0, 2.0 * PI];
    for r in spec.alpha() {
        let base = (-r[0]).atan2(r[1]).rem_euclid(PI);
        pts.push(base);
        pts.push(base + PI);
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

/// `(1/2π)∫₀^{2π} g(θ) dθ` with Gauss panels between the kinks of `Q`.
pub(crate) fn circle_mean(spec: &CylinderSpec, per_piece: usize, mut g: impl FnMut(f64) -> Complex64) -> Complex64 {
    let kinks = circle_kinks(spec);
    let mut acc = ZERO;
    for w in kinks.windows(2) {
        let pts = quad::uniform(w[0], w[1], (w[1] - w[0]) / per_piece as f64);
        acc += quad::composite(&pts, 16, &mut g);
    }
    acc / (2.0 * PI)
}

/// Mean over the unit sphere in R³ with Gauss panels split on the coordinate
/// planes, so that `Q` is smooth on every piece when the rows of `α` are
/// coordinate axes. Other bases converge algebraically.
pub(crate) fn octant_mean(order: usize, mut g: impl FnMut([f64; 3]) -> Complex64) -> Complex64 {
    let rule = quad::rule(order);
    let mut acc = ZERO;
    for (t0, t1) in [(0.0, 0.5 * PI), (0.5 * PI, PI)] {
        let (th, tm) = (0.5 * (t1 - t0), 0.5 * (t1 + t0));
        for &(u, wu) in rule {
            let theta = tm + th * u;
            let (st, ct) = theta.sin_cos();
            for quarter in 0..4 {
                let f0 = quarter as f64 * 0.5 * PI;
                for &(v, wv) in rule {
                    let phi = f0 + 0.25 * PI * (1.0 + v);
                    let (sp, cp) = phi.sin_cos();
                    acc += g([st * cp, st * sp, ct]) * (wu * th * st * wv * 0.25 * PI);
                }
            }
        }
    }
    acc / (4.0 * PI)
}

/// Measure of the centred ball `|a| ≤ rho`, computed in momentum space for
/// `k ∈ {2, 3}` and in closed form for `k = 1`. Needs `rho` beyond every atom.
///
/// The radial integral is done first for each direction, which leaves a
/// function of `Q(ω)` alone and keeps the angular integrand smooth between
/// the kinks of `Q`.
pub fn ball_measure(spec: &CylinderSpec, rho: f64, cfg: &MeasureConfig) -> Result<Measured> {
    let k = spec.k();
    if k == 1 {
        let v = interval_measure_1d(spec, -rho, rho)?;
        return Ok(Measured { value: v.value, estimate: 0.0 });
    }
    if k > 3 {
        return domain("numeric ball measures are implemented for k ≤ 3");
    }
    let q_max = spec.max_radius()?;
    if rho <= q_max * (1.0 + 1e-9) {
        return domain("the ball must contain every atom");
    }
    let divisor = cfg.divisor.unwrap_or(80.0);
    let h = (rho - q_max) / divisor;
    let panel = cfg.panel_fraction * PI / (2.0 * (rho + q_max));
    let at = |scale: f64| -> Result<Complex64> {
        let reach = MOLLIFIER_REACH / (scale * h);
        let pts = quad::uniform(0.0, reach, panel);
        // Radial weights are shared by every direction.
        let mut nodes = Vec::new();
        for w in pts.windows(2) {
            let (half, mid) = (0.5 * (w[1] - w[0]), 0.5 * (w[1] + w[0]));
            for &(x, wt) in quad::rule(PANEL_ORDER) {
                let r = mid + half * x;
                let weight = wt * half * r.powi(k as i32 - 1) * ball_indicator_transform(k, rho, r)? * mollifier(scale * h * r);
                nodes.push((r, weight));
            }
        }
        let radial = |q: f64| -> Complex64 { nodes.iter().map(|&(r, w)| w * Complex64::from_polar(1.0, r * q)).sum() };
        Ok(if k == 2 {
            // (2π)^{-2} ∫ r dr ∫ dθ = (2π)^{-1} ∫ r dr · mean over θ
            circle_mean(spec, 4, |th| radial(spec.radon_q(&[th.cos(), th.sin()]))) / (2.0 * PI)
        } else {
            // (2π)^{-3} ∫ r² dr ∫ dΩ = (2π²)^{-1} ∫ r² dr · mean over Ω
            octant_mean(12, |w| radial(spec.radon_q(&w))) / (2.0 * PI * PI)
        })
    };
    richardson(cfg, "ball measure extrapolation", at(2.0)?, at(1.0)?)
}

/// `max` over a fixed panel of boxes of `|μ(box × [−L, L]) − μ_projected(box)|`,
/// where the last coordinate is marginalized.
///
/// The marginalized side is a wide slab `L = 10⁷·|α|Δt` rather than a
/// collapsed whole line, so the check compares two genuinely different
/// quadratures.
pub fn marginal_compatibility(spec: &CylinderSpec, cfg: &MeasureConfig) -> Result<f64> {
    let k = spec.k();
    if k < 2 {
        // Projecting a one-dimensional base onto itself is the identity.
        return Ok(0.0);
    }
    let projected = spec.project(k - 1)?;
    let scale = spec.constraint_norm();
    let slab = 1e7 * scale;
    let mut worst: f64 = 0.0;
    for panel in compatibility_panel(k - 1) {
        let lower: Vec<Side> = panel.iter().map(|&(a, b)| Side::Finite(a * scale, b * scale)).collect();
        let mut full = lower.clone();
        full.push(Side::Finite(-slab, slab));
        let lhs = box_measure_nd(spec, &full, cfg)?;
        let rhs = box_measure_nd(&projected, &lower, cfg)?;
        worst = worst.max((lhs.value - rhs.value).norm());
    }
    Ok(worst)
}

/// Five boxes (in units of the constraint norm) whose edges avoid the
/// atoms of typical bases.
fn compatibility_panel(dims: usize) -> Vec<Vec<(f64, f64)>> {
    let base = [(-0.37, 0.41), (0.13, 0.71), (-1.93, -0.29), (0.53, 2.87), (-3.9, 4.3)];
    (0..5).map(|i| (0..dims).map(|d| base[(i + d) % 5]).collect()).collect()
}

/// A bounded continuous function `c + g(a)` with `g` a decaying probe.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedFunction {
    pub constant: Complex64,
    pub decaying: Option<TestFunction>,
}

/// `∫ f(a) C_{iT}(a) da` for a one-dimensional base.
pub fn integrate_bounded(spec: &CylinderSpec, f: &BoundedFunction) -> Result<Complex64> {
    let t = effective_time(spec)?;
    let mut acc = f.constant;
    if let Some(g) = &f.decaying {
        // ∫ g C_{iT} = (1/2π)∫ e^{iT|p|} ĝ(−p) dp: the Parseval route with time −T
        // after reflecting g.
        let sym = ScalarSymbol::new(0.0, -t, 1)?;
        let reflected = reflect(g)?;
        acc += pair_via_parseval(&sym, &reflected, &ParsevalConfig::default())?.value;
    }
    Ok(acc)
}

fn reflect(g: &TestFunction) -> Result<TestFunction> {
    use crate::testfn::Kind;
    match g.kind() {
        Kind::GaussianPacket { center, width, momentum } => {
            let c: Vec<f64> = center.iter().map(|x| -x).collect();
            let k: Vec<f64> = momentum.iter().map(|x| -x).collect();
            TestFunction::gaussian(&c, *width, &k)
        }
        Kind::StandardBump { center, half_width } => {
            TestFunction::bump(&center.iter().map(|x| -x).collect::<Vec<_>>(), *half_width)
        }
        Kind::Shell { .. } => Ok(g.clone()),
        Kind::Product { axis, window } => {
            let inner = reflect(window)?;
            TestFunction::combination(vec![(Complex64::new(-1.0, 0.0), TestFunction::product(*axis, inner)?)])
        }
        Kind::Combination(terms) => TestFunction::combination(
            terms.iter().map(|(c, f)| Ok((*c, reflect(f)?))).collect::<Result<Vec<_>>>()?,
        ),
    }
}

/// One row of a weak-continuity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub n: usize,
    pub effective_time: f64,
    pub value: Complex64,
    pub residual: f64,
}

/// `|∫f 𝕮_k − ∫f 𝕮_ref|` along a sequence of one-dimensional bases.
///
/// Fails if the residual grows across three consecutive refinements or if
/// the finest residual exceeds `tolerance`.
pub fn weak_continuity(
    seq: &[CylinderSpec],
    reference: &CylinderSpec,
    f: &BoundedFunction,
    tolerance: f64,
) -> Result<Vec<ContinuityRow>> {
    let target = integrate_bounded(reference, f)?;
    let t_ref = reference.total_time();
    let mut rows = Vec::with_capacity(seq.len());
    for spec in seq {
        if (spec.total_time() - t_ref).abs() > 1e-12 * t_ref {
            return domain("specs in a continuity sequence must share the total time");
        }
        let value = integrate_bounded(spec, f)?;
        rows.push(ContinuityRow {
            n: spec.n(),
            effective_time: effective_time(spec)?,
            value,
            residual: (value - target).norm(),
        });
    }
    let floor = 1e-13;
    for w in rows.windows(3) {
        if w[1].residual > w[0].residual + floor && w[2].residual > w[1].residual + floor {
            return Err(Error::Convergence { what: "weak continuity (residual grows)".into(), estimate: w[2].residual });
        }
    }
    if let Some(last) = rows.last() {
        if last.residual > tolerance {
            return Err(Error::Convergence { what: "weak continuity".into(), estimate: last.residual });
        }
    }
    Ok(rows)
}

/// Left-endpoint step approximation of `α(τ)` on `[0, t]` with `n` equal steps.
pub fn step_approximation(alpha: impl Fn(f64) -> f64, t: f64, n: usize) -> Result<CylinderSpec> {
    let dt = t / n as f64;
    let coeffs = (0..n).map(|j| alpha(j as f64 * dt)).collect();
    CylinderSpec::line(vec![dt; n], coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_time_examples() {
        let s = CylinderSpec::line(vec![0.3, 0.7], vec![1.0, -1.0]).unwrap();
        assert!((effective_time(&s).unwrap() - 1.0).abs() < 1e-15);
        let s = CylinderSpec::line(vec![1.3], vec![2.0]).unwrap();
        assert_eq!(effective_time(&s).unwrap(), 2.6);
    }

    #[test]
    fn spec_validation() {
        assert!(CylinderSpec::new(vec![1.0, 1.0], vec![vec![1.0, 2.0], vec![2.0, 4.0]], 100.0).is_err());
        assert!(CylinderSpec::new(vec![1.0], vec![vec![3.0]], 2.0).is_err());
        assert!(CylinderSpec::new(vec![-1.0], vec![vec![1.0]], 2.0).is_err());
    }

    #[test]
    fn symbol_reduces_and_factorizes() {
        let s = CylinderSpec::line(vec![0.2, 0.5, 0.3], vec![1.0, -2.0, 0.5]).unwrap();
        let t = effective_time(&s).unwrap();
        assert_eq!(symbol_nd(&s, &[1.7]), crate::momentum::symbol(0.0, t, &[1.7]));
        let d = CylinderSpec::diagonal(vec![0.4, 0.9]).unwrap();
        let prod = Complex64::from_polar(1.0, 0.4 * 1.1) * Complex64::from_polar(1.0, 0.9 * 2.3);
        assert!((symbol_nd(&d, &[1.1, -2.3]) - prod).norm() < 1e-15);
    }

    #[test]
    fn interval_closed_forms() {
        let s = CylinderSpec::line(vec![1.0], vec![1.0]).unwrap();
        let all = interval_measure_1d(&s, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(all.value, Complex64::new(1.0, 0.0));
        let tail = interval_measure_1d(&s, 2.0, f64::INFINITY).unwrap().value;
        assert!((tail - Complex64::new(0.0, -(3f64).ln() / (2.0 * PI))).norm() < 1e-15);
        let sym = interval_measure_1d(&s, -5.0, 5.0).unwrap().value;
        // Total mass 1 minus both tails.
        assert!((sym - Complex64::new(1.0, 1.5f64.ln() / PI)).norm() < 1e-14);
        let edge = interval_measure_1d(&s, 1.0, 2.0).unwrap();
        assert!(edge.boundary_hit);
        assert_eq!(edge.value.re, 0.25);
    }

    #[test]
    fn interval_tail_matches_quadrature() {
        let t = 0.8;
        let tail = interval_measure_at(t, 1.5, 40.0).unwrap().value;
        let pts = quad::uniform(1.5, 40.0, 0.05);
        let direct = quad::composite(&pts, PANEL_ORDER, |x| Complex64::new(0.0, t / (PI * (t * t - x * x))));
        assert!((tail - direct).norm() < 1e-10);
    }

    #[test]
    fn dilation_covariance() {
        let a = interval_measure_at(1.0, 0.3, 2.2).unwrap().value;
        let b = interval_measure_at(2.0, 0.6, 4.4).unwrap().value;
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn one_dimensional_box_matches_closed_form() {
        let s = CylinderSpec::line(vec![0.4, 0.6], vec![1.0, 0.5]).unwrap();
        for (a, b) in [(-0.2, 0.3), (0.5, 1.4), (-3.0, 2.0)] {
            let numeric = box_measure_nd(&s, &[Side::Finite(a, b)], &MeasureConfig::default()).unwrap();
            let exact = interval_measure_1d(&s, a, b).unwrap().value;
            assert!((numeric.value - exact).norm() < 1e-8, "[{a},{b}]: {} vs {exact}", numeric.value);
        }
    }

    #[test]
    fn edge_on_atom_is_rejected() {
        let s = CylinderSpec::line(vec![1.0], vec![1.0]).unwrap();
        assert!(box_measure_nd(&s, &[Side::Finite(1.0, 2.0)], &MeasureConfig::default()).is_err());
    }

    #[test]
    fn circle_kinks_bracket_sign_changes() {
        let s = CylinderSpec::unbounded(vec![1.0, 1.0], vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let k = circle_kinks(&s);
        for w in k.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            for r in s.alpha() {
                let sign = |th: f64| (r[0] * th.cos() + r[1] * th.sin()).signum();
                assert_eq!(sign(mid), sign(w[0] + 1e-9 * (w[1] - w[0])));
            }
        }
    }

    #[test]
    fn step_approximations_of_identity_share_time() {
        let t: Vec<f64> =
            [2, 8, 64].iter().map(|&n| effective_time(&step_approximation(|_| 1.0, 1.0, n).unwrap()).unwrap()).collect();
        assert!(t.iter().all(|&x| x == 1.0));
    }
}
