//! Probe functions and coordinate-space pairings of the Cauchy functionals.
//!
//! A pairing here is always `∫ conj(C)(x) φ(x) dx`. In one dimension
//!
//! ```text
//! ∫ conj(C_it) φ = ½(φ(t) + φ(−t)) − (i/π) PV∫ t/(t² − x²) φ(x) dx,
//! ```
//!
//! and since `t/(t² − x²) = ½[1/(t − x) + 1/(t + x)]` the principal value only
//! ever sees the single pole `x = t` of the even part of `φ`. That pole is
//! handled by folding a window `[t − a, t + a]` onto `[0, a]`, leaving a smooth
//! integrand. The massive kernel differs from the massless one by a factor
//! `B = z·K₁(z)` that equals 1 on the light cone, so the massive pairing is the
//! massless one plus an integral with only a logarithmic singularity.
//!
//! The three-dimensional pairing reduces to the radial profile
//! `G(r) = 4πr²·φ̄(r)` of sphere averages. Its double pole at `r = t` is taken as
//! a Hadamard finite part.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{self, PANEL_ORDER};
use crate::specfun::{self, KernelArg};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `√(2 ln 10¹⁷)`: Gaussian tails are cut where they drop below 1e-17.
const GAUSS_REACH: f64 = 8.85;
/// Momentum radius (in units of 1/width) where a Gaussian transform drops below 1e-14.
const GAUSS_MOMENTUM_REACH: f64 = 8.1;

/// Shape of a probe function.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `exp(−|x − c|²/(2w²)) · exp(i k·x)`.
    GaussianPacket { center: Vec<f64>, width: f64, momentum: Vec<f64> },
    /// `exp(−1/(1 − s²))` for `s = |x − c|/h < 1`, zero outside.
    StandardBump { center: Vec<f64>, half_width: f64 },
    /// Radial bump profile around the sphere `|x| = radius`
    /// (in one dimension a symmetric pair of bumps at `±radius`).
    Shell { radius: f64, half_width: f64 },
    /// The coordinate `x_axis` times a window probe.
    Product { axis: usize, window: Box<TestFunction> },
    /// A finite linear combination of probes of equal dimension.
    Combination(Vec<(Complex64, TestFunction)>),
}

/// A probe function in dimension 1 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    dim: usize,
    kind: Kind,
}

fn bump_profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 3 {
        Ok(())
    } else {
        domain(format!("probe dimension must be 1 or 3, got {dim}"))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl TestFunction {
    pub fn gaussian(center: &[f64], width: f64, momentum: &[f64]) -> Result<Self> {
        let dim = center.len();
        check_dim(dim)?;
        if momentum.len() != dim {
            return domain("momentum and center dimensions differ");
        }
        if !(width > 0.0 && width.is_finite()) {
            return domain("Gaussian width must be positive");
        }
        Ok(Self {
            dim,
            kind: Kind::GaussianPacket {
                center: center.to_vec(),
                width,
                momentum: momentum.to_vec(),
            },
        })
    }

    /// Centred, unmodulated Gaussian `exp(−|x|²/(2w²))`.
    pub fn centered_gaussian(dim: usize, width: f64) -> Result<Self> {
        Self::gaussian(&vec![0.0; dim], width, &vec![0.0; dim])
    }

    pub fn bump(center: &[f64], half_width: f64) -> Result<Self> {
        let dim = center.len();
        check_dim(dim)?;
        if !(half_width > 0.0 && half_width.is_finite()) {
            return domain("bump half-width must be positive");
        }
        Ok(Self { dim, kind: Kind::StandardBump { center: center.to_vec(), half_width } })
    }

    pub fn shell(dim: usize, radius: f64, half_width: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(half_width > 0.0 && radius >= half_width) {
            return domain("shell needs radius >= half-width > 0");
        }
        Ok(Self { dim, kind: Kind::Shell { radius, half_width } })
    }

    pub fn product(axis: usize, window: TestFunction) -> Result<Self> {
        if axis >= window.dim {
            return domain("coordinate axis out of range");
        }
        Ok(Self { dim: window.dim, kind: Kind::Product { axis, window: Box::new(window) } })
    }

    pub fn combination(terms: Vec<(Complex64, TestFunction)>) -> Result<Self> {
        let dim = terms.first().map(|t| t.1.dim).ok_or_else(|| Error::Domain("empty combination".into()))?;
        if terms.iter().any(|t| t.1.dim != dim) {
            return domain("combination mixes dimensions");
        }
        Ok(Self { dim, kind: Kind::Combination(terms) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match &self.kind {
            Kind::GaussianPacket { center, width, momentum } => {
                let mut r2 = 0.0;
                let mut phase = 0.0;
                for i in 0..self.dim {
                    let d = x[i] - center[i];
                    r2 += d * d;
                    phase += momentum[i] * x[i];
                }
                Complex64::from_polar((-0.5 * r2 / (width * width)).exp(), phase)
            }
            Kind::StandardBump { center, half_width } => {
                let d: f64 = (0..self.dim).map(|i| (x[i] - center[i]).powi(2)).sum::<f64>().sqrt();
                Complex64::new(bump_profile(d / half_width), 0.0)
            }
            Kind::Shell { radius, half_width } => {
                let r = norm(&x[..self.dim]);
                Complex64::new(bump_profile((r - radius) / half_width), 0.0)
            }
            Kind::Product { axis, window } => x[*axis] * window.eval(x),
            Kind::Combination(terms) => terms.iter().map(|(c, f)| c * f.eval(x)).sum(),
        }
    }

    pub fn eval1(&self, x: f64) -> Complex64 {
        self.eval(&[x])
    }

    /// Centre and radius of a ball outside which the probe vanishes or is
    /// below 1e-17 of its peak.
    pub fn support_ball(&self) -> (Vec<f64>, f64) {
        match &self.kind {
            Kind::GaussianPacket { center, width, .. } => (center.clone(), GAUSS_REACH * width),
            Kind::StandardBump { center, half_width } => (center.clone(), *half_width),
            Kind::Shell { radius, half_width } => (vec![0.0; self.dim], radius + half_width),
            Kind::Product { window, .. } => {
                let (c, r) = window.support_ball();
                (c, r * 1.1)
            }
            Kind::Combination(terms) => {
                let reach = terms
                    .iter()
                    .map(|(_, f)| f.reach())
                    .fold(0.0, f64::max);
                (vec![0.0; self.dim], reach)
            }
        }
    }

    /// Radius of an origin-centred ball containing the effective support.
    pub fn reach(&self) -> f64 {
        let (c, r) = self.support_ball();
        norm(&c) + r
    }

    /// Shortest length on which the probe varies appreciably.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            Kind::GaussianPacket { width, momentum, .. } => {
                let k = norm(momentum);
                if k > 0.0 { width.min(1.0 / k) } else { *width }
            }
            Kind::StandardBump { half_width, .. } | Kind::Shell { half_width, .. } => half_width / 8.0,
            Kind::Product { window, .. } => window.scale(),
            Kind::Combination(terms) => terms.iter().map(|(_, f)| f.scale()).fold(f64::INFINITY, f64::min),
        }
    }

    /// True when the probe is spherically symmetric about the origin.
    pub fn is_radial(&self) -> bool {
        match &self.kind {
            Kind::GaussianPacket { center, momentum, .. } => norm(center) == 0.0 && norm(momentum) == 0.0,
            Kind::StandardBump { center, .. } => norm(center) == 0.0,
            Kind::Shell { .. } => true,
            Kind::Product { .. } => false,
            Kind::Combination(terms) => terms.iter().all(|(_, f)| f.is_radial()),
        }
    }

    /// True when every piece of the probe is even under `x → −x`.
    pub fn is_even(&self) -> bool {
        self.is_radial()
    }

    /// Centre and radius of the momentum region where `|ψ|` exceeds 1e-14 of
    /// its maximum.
    pub fn momentum_ball(&self) -> (Vec<f64>, f64) {
        match &self.kind {
            Kind::GaussianPacket { width, momentum, .. } => {
                (momentum.iter().map(|k| -k).collect(), GAUSS_MOMENTUM_REACH / width)
            }
            // The bump transform decays like exp(−√(2h|p|)).
            Kind::StandardBump { half_width, .. } | Kind::Shell { half_width, .. } => {
                (vec![0.0; self.dim], 520.0 / half_width)
            }
            Kind::Product { window, .. } => {
                let (c, r) = window.momentum_ball();
                (c, r * 1.15)
            }
            Kind::Combination(terms) => {
                let r = terms
                    .iter()
                    .map(|(_, f)| {
                        let (c, r) = f.momentum_ball();
                        norm(&c) + r
                    })
                    .fold(0.0, f64::max);
                (vec![0.0; self.dim], r)
            }
        }
    }

    /// Fourier transform `ψ(p) = ∫ φ(x) e^{ip·x} dx`.
    ///
    /// Exact for Gaussian packets and products with a Gaussian window;
    /// numeric (radial quadrature) for bumps and shells.
    pub fn fourier(&self, p: &[f64]) -> Result<Complex64> {
        let d = self.dim;
        match &self.kind {
            Kind::GaussianPacket { center, width, momentum } => {
                let mut q2 = 0.0;
                let mut phase = 0.0;
                for i in 0..d {
                    let q = p[i] + momentum[i];
                    q2 += q * q;
                    phase += q * center[i];
                }
                let amp = ((2.0 * PI).sqrt() * width).powi(d as i32) * (-0.5 * width * width * q2).exp();
                Ok(Complex64::from_polar(amp, phase))
            }
            Kind::Product { axis, window } => match window.kind() {
                // ∫ x_j φ e^{ipx} = −i ∂_{p_j} ψ, closed form for the Gaussian window.
                Kind::GaussianPacket { center, width, momentum } => {
                    let psi = window.fourier(p)?;
                    let j = *axis;
                    Ok(psi * Complex64::new(center[j], width * width * (p[j] + momentum[j])))
                }
                _ => domain("Fourier transform of a product is only available for Gaussian windows"),
            },
            Kind::StandardBump { center, half_width } => {
                let phase: f64 = (0..d).map(|i| p[i] * center[i]).sum();
                let rho = norm(&p[..d]);
                let h = *half_width;
                let radial = radial_transform(d, rho, 0.0, h, |r| bump_profile(r / h));
                Ok(Complex64::from_polar(1.0, phase) * radial)
            }
            Kind::Shell { radius, half_width } => {
                let rho = norm(&p[..d]);
                let (r0, h) = (*radius, *half_width);
                let lo = (r0 - h).max(0.0);
                Ok(Complex64::new(radial_transform(d, rho, lo, r0 + h, |r| bump_profile((r - r0) / h)), 0.0))
            }
            Kind::Combination(terms) => {
                let mut acc = ZERO;
                for (c, f) in terms {
                    acc += c * f.fourier(p)?;
                }
                Ok(acc)
            }
        }
    }

    /// `ψ` at a scalar momentum (one-dimensional probes).
    pub fn fourier1(&self, p: f64) -> Result<Complex64> {
        self.fourier(&[p])
    }

    /// Mean of `ψ` over the momentum sphere `|p| = ρ` (three-dimensional probes).
    pub fn fourier_sphere_mean(&self, rho: f64) -> Result<Complex64> {
        if self.dim != 3 {
            return domain("momentum sphere mean needs a three-dimensional probe");
        }
        match &self.kind {
            Kind::GaussianPacket { center, width, momentum } => {
                let (e, _) = gaussian_sphere_moments(center, *width, momentum, rho, None);
                Ok(e)
            }
            Kind::Product { axis, window } => match window.kind() {
                Kind::GaussianPacket { center, width, momentum } => {
                    let j = *axis;
                    let (e, first) = gaussian_sphere_moments(center, *width, momentum, rho, Some(j));
                    let w2 = width * width;
                    Ok(Complex64::new(center[j], w2 * momentum[j]) * e + I * w2 * rho * first)
                }
                _ => domain("Fourier transform of a product is only available for Gaussian windows"),
            },
            Kind::StandardBump { center, .. } => {
                let radial = self.fourier(&[rho, 0.0, 0.0])?;
                // ψ = e^{ip·c}·(radial part); the plane-wave factor averages to sinc(ρ|c|).
                let shift = Complex64::from_polar(1.0, rho * center[0]);
                Ok(radial / shift * sinc(rho * norm(center)))
            }
            Kind::Shell { .. } => self.fourier(&[rho, 0.0, 0.0]),
            Kind::Combination(terms) => {
                let mut acc = ZERO;
                for (c, f) in terms {
                    acc += c * f.fourier_sphere_mean(rho)?;
                }
                Ok(acc)
            }
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x }
}

/// `sinh(s)/s` and `(s cosh s − sinh s)/s³` for complex `s`, both even in `s`.
fn sphere_kernels(s2: Complex64) -> (Complex64, Complex64) {
    if s2.norm() < 1e-6 {
        return (1.0 + s2 / 6.0 + s2 * s2 / 120.0, 1.0 / 3.0 + s2 / 30.0 + s2 * s2 / 840.0);
    }
    let s = s2.sqrt();
    let (sh, ch) = (s.sinh(), s.cosh());
    (sh / s, (s * ch - sh) / (s2 * s))
}

/// Sphere means of a Gaussian packet's transform at `|p| = ρ`: the mean of
/// `ψ` and, for the chosen axis, the mean of `ω_axis·ψ`.
///
/// With `q = ρω + k` the transform is `A·exp(−w²|q|²/2 + iq·c)`, which is
/// `exp(ω·u)` times constants for `u = ρ(−w²k + ic)`. Its means are
/// `sinh(s)/s` and `u·(s cosh s − sinh s)/s³` with `s² = u·u`.
fn gaussian_sphere_moments(
    center: &[f64],
    width: f64,
    momentum: &[f64],
    rho: f64,
    axis: Option<usize>,
) -> (Complex64, Complex64) {
    let w2 = width * width;
    let k2: f64 = momentum.iter().map(|k| k * k).sum();
    let kc: f64 = (0..3).map(|i| momentum[i] * center[i]).sum();
    let u: Vec<Complex64> = (0..3).map(|i| rho * Complex64::new(-w2 * momentum[i], center[i])).collect();
    let s2: Complex64 = u.iter().map(|x| x * x).sum();
    let (mean, first) = sphere_kernels(s2);
    let amp = ((2.0 * PI).sqrt() * width).powi(3) * Complex64::from_polar((-0.5 * w2 * (rho * rho + k2)).exp(), kc);
    let moment = axis.map_or(ZERO, |j| amp * u[j] * first);
    (amp * mean, moment)
}

/// Transform of a radial profile `f(|x|)` supported in `lo ≤ |x| ≤ hi`:
/// `2∫ f cos(ρr) dr` in one dimension, `4π∫ f r² sinc(ρr) dr` in three.
fn radial_transform(dim: usize, rho: f64, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = ((hi - lo) / 64.0).min(if rho > 0.0 { PI / (2.0 * rho) } else { f64::INFINITY });
    let pts = quad::uniform(lo, hi, h);
    if dim == 1 {
        2.0 * quad::composite_real(&pts, PANEL_ORDER, |r| f(r) * (rho * r).cos())
    } else {
        4.0 * PI
            * quad::composite_real(&pts, PANEL_ORDER, |r| {
                let s = if rho * r < 1e-8 { 1.0 } else { (rho * r).sin() / (rho * r) };
                f(r) * r * r * s
            })
    }
}

/// A one-dimensional integrand for the pairing routines.
pub trait Probe1D {
    fn at(&self, x: f64) -> Complex64;
    /// Half-width of an origin-centred interval outside which the probe is negligible.
    fn reach(&self) -> f64;
    /// Shortest length scale of variation.
    fn scale(&self) -> f64;
}

impl Probe1D for TestFunction {
    fn at(&self, x: f64) -> Complex64 {
        self.eval1(x)
    }
    fn reach(&self) -> f64 {
        TestFunction::reach(self)
    }
    fn scale(&self) -> f64 {
        TestFunction::scale(self)
    }
}

/// Wraps a closure as a [`Probe1D`].
pub struct FnProbe<F> {
    pub f: F,
    pub reach: f64,
    pub scale: f64,
}

impl<F: Fn(f64) -> Complex64> Probe1D for FnProbe<F> {
    fn at(&self, x: f64) -> Complex64 {
        (self.f)(x)
    }
    fn reach(&self) -> f64 {
        self.reach
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}

/// Regularization and refinement controls for the coordinate pairings.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationConfig {
    /// Excision radii, strictly decreasing to below 1e-6. The folded
    /// integral's tail below each ε must shrink along the sequence.
    pub pv_epsilon: Vec<f64>,
    /// Integration cutoff `A`; `None` uses the probe's reach.
    pub cutoff: Option<f64>,
    /// Refinement level of the finest grid (≥ 2). The estimate compares
    /// this level with the one below it.
    pub levels: u32,
    /// Order of the product spherical rule (≥ 6).
    pub sphere_order: usize,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self {
            pv_epsilon: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
            cutoff: None,
            levels: 3,
            sphere_order: 12,
        }
    }
}

impl RegularizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pv_epsilon.is_empty()
            || self.pv_epsilon.windows(2).any(|w| w[1] >= w[0])
            || self.pv_epsilon.iter().any(|&e| e <= 0.0)
            || *self.pv_epsilon.last().expect("nonempty") >= 1e-6
        {
            return domain("epsilon sequence must be positive, strictly decreasing and end below 1e-6");
        }
        if self.levels < 2 {
            return domain("at least two refinement levels are required");
        }
        if self.sphere_order < 6 {
            return domain("sphere order must be at least 6");
        }
        Ok(())
    }

    fn cutoff_for(&self, reach: f64) -> Result<f64> {
        match self.cutoff {
            None => Ok(reach),
            Some(a) if a >= reach => Ok(a),
            Some(a) => domain(format!("cutoff {a} does not cover the probe reach {reach}")),
        }
    }
}

/// Result of a coordinate-space pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub delta_part: Complex64,
    pub regular_part: Complex64,
    pub total: Complex64,
    /// Difference between the two finest refinement levels.
    pub quadrature_error_estimate: f64,
}

impl PairingResult {
    fn new(delta_part: Complex64, regular_part: Complex64, estimate: f64) -> Self {
        Self { delta_part, regular_part, total: delta_part + regular_part, quadrature_error_estimate: estimate }
    }
}

fn panel_cap(scale: f64, level: u32) -> f64 {
    scale / 2f64.powi(level as i32)
}

/// Breakpoints of `[−A, A]` graded towards `focus` from both sides, with a
/// gap of half-width `gap` left open around it.
fn around(focus: f64, gap: f64, a_ext: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let left = if focus - gap > -a_ext {
        let mut v = quad::graded(focus, focus - gap, -a_ext, h);
        v.reverse();
        v
    } else {
        Vec::new()
    };
    let right = if focus + gap < a_ext { quad::graded(focus, focus + gap, a_ext, h) } else { Vec::new() };
    (left, right)
}

/// `PV∫_{−A}^{A} g(x)/(t − x) dx` at one refinement level, plus the folded
/// integral's tails below each ε of the configuration.
fn pv_single_pole(
    t: f64,
    g: &dyn Fn(f64) -> Complex64,
    a_ext: f64,
    scale: f64,
    level: u32,
    eps: &[f64],
) -> (Complex64, Vec<Complex64>) {
    let h = panel_cap(scale, level);
    let kernel = |x: f64| g(x) / (t - x);
    if t.abs() - a_ext >= scale {
        // Pole outside the integration range: ordinary graded quadrature.
        let mut pts = if t > 0.0 { quad::graded(t, a_ext, -a_ext, h) } else { quad::graded(t, -a_ext, a_ext, h) };
        if t > 0.0 {
            pts.reverse();
        }
        return (quad::composite(&pts, PANEL_ORDER, kernel), Vec::new());
    }
    let a = (0.5 * t.abs()).min(scale).max(1e-300);
    let (left, right) = around(t, a, a_ext.max(t.abs() + a), h);
    let outer = quad::composite(&left, PANEL_ORDER, kernel) + quad::composite(&right, PANEL_ORDER, kernel);
    let folded = |u: f64| (g(t - u) - g(t + u)) / u;
    let window = quad::composite(&quad::dyadic_to_zero(a, 40, h), PANEL_ORDER, folded);
    let tails = eps
        .iter()
        .filter(|&&e| e < a)
        .map(|&e| quad::composite(&quad::dyadic_to_zero(e, 30, e), PANEL_ORDER, folded))
        .collect();
    (outer + window, tails)
}

fn check_tails(tails: &[Complex64], reference: Complex64) -> Result<()> {
    // Rounding noise in a near-zero pairing should not count as growth.
    let floor = (1e-14 * reference.norm()).max(1e-13);
    for w in tails.windows(2) {
        if w[1].norm() > w[0].norm() + floor {
            return Err(Error::Convergence { what: "principal-value excision".into(), estimate: w[1].norm() });
        }
    }
    Ok(())
}

fn even_part<'a, P: Probe1D + ?Sized>(phi: &'a P) -> impl Fn(f64) -> Complex64 + 'a {
    move |x| 0.5 * (phi.at(x) + phi.at(-x))
}

/// `∫ conj(C_it)(x) φ(x) dx` for the massless one-dimensional functional.
pub fn pair_cauchy_1d<P: Probe1D + ?Sized>(t: f64, phi: &P, cfg: &RegularizationConfig) -> Result<PairingResult> {
    cfg.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return domain("time must be positive");
    }
    let a_ext = cfg.cutoff_for(phi.reach())?;
    let delta = 0.5 * (phi.at(t) + phi.at(-t));
    let g = even_part(phi);
    let scale = phi.scale();
    let (coarse, _) = pv_single_pole(t, &g, a_ext, scale, cfg.levels - 1, &[]);
    let (fine, tails) = pv_single_pole(t, &g, a_ext, scale, cfg.levels, &cfg.pv_epsilon);
    check_tails(&tails, fine)?;
    let factor = Complex64::new(0.0, -1.0 / PI);
    Ok(PairingResult::new(delta, factor * fine, (factor * (fine - coarse)).norm()))
}

/// `B(t, x) − 1` divided by `t² − x²`, written as `−m²·(zK₁(z) − 1)/z²`.
///
/// `z = i m √(t² − x²)` inside the light cone and `m √(x² − t²)` outside.
pub(crate) fn b_excess_over_gap(t: f64, x: f64, m: f64) -> Result<Complex64> {
    let gap = t * t - x * x;
    if gap == 0.0 {
        // A node rounded onto the cone; the logarithm there has zero weight.
        return Ok(ZERO);
    }
    let z = if gap > 0.0 {
        KernelArg::imag(m * gap.sqrt())?
    } else {
        KernelArg::real(m * (-gap).sqrt())?
    };
    Ok(-m * m * specfun::zk1_excess(z)?)
}

/// Breakpoints on `[0, A]` graded towards the light-cone point `t` from both sides.
fn cone_graded(t: f64, a_ext: f64, h: f64) -> Vec<f64> {
    if a_ext <= t {
        // The support stays strictly inside the cone; nothing to grade towards.
        return quad::uniform(0.0, a_ext, h);
    }
    let mut parts = Vec::new();
    if t > 0.0 {
        let inner: Vec<f64> = quad::dyadic_to_zero(t, 50, h).iter().rev().map(|u| t - u).collect();
        parts.push(inner);
    }
    let outer: Vec<f64> = quad::dyadic_to_zero(a_ext - t, 50, h).iter().map(|u| t + u).collect();
    parts.push(outer);
    quad::join(&parts)
}

/// Removable remainder of the massive pairing at one level:
/// `−(i/π)∫ t(B − 1)/(t² − x²) φ(x) dx`.
fn massive_remainder<P: Probe1D + ?Sized>(t: f64, m: f64, phi: &P, a_ext: f64, level: u32) -> Result<Complex64> {
    let h = panel_cap(phi.scale(), level).min(0.25 / m);
    let pts = cone_graded(t, a_ext, h);
    let mut failure = None;
    let g = even_part(phi);
    let integral = quad::composite(&pts, PANEL_ORDER, |x| match b_excess_over_gap(t, x, m) {
        Ok(e) => 2.0 * e * g(x),
        Err(err) => {
            failure.get_or_insert(err);
            ZERO
        }
    });
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(Complex64::new(0.0, -t / PI) * integral)
}

/// `∫ conj(C^m_it)(x) φ(x) dx` for the massive one-dimensional functional.
pub fn pair_cauchy_massive_1d<P: Probe1D + ?Sized>(
    t: f64,
    m: f64,
    phi: &P,
    cfg: &RegularizationConfig,
) -> Result<PairingResult> {
    if !(m > 0.0 && m.is_finite()) {
        return domain("mass must be positive");
    }
    let massless = pair_cauchy_1d(t, phi, cfg)?;
    let a_ext = cfg.cutoff_for(phi.reach())?;
    let fine = massive_remainder(t, m, phi, a_ext, cfg.levels)?;
    let coarse = massive_remainder(t, m, phi, a_ext, cfg.levels - 1)?;
    Ok(PairingResult::new(
        massless.delta_part,
        massless.regular_part + fine,
        massless.quadrature_error_estimate + (fine - coarse).norm(),
    ))
}

/// Nodes and weights (summing to 1) of the product rule on the unit sphere:
/// Gauss–Legendre in `cos θ` times `2n` equispaced azimuths.
pub fn sphere_rule(order: usize) -> &'static [([f64; 3], f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [([f64; 3], f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("sphere cache poisoned");
    guard.entry(order).or_insert_with(|| {
        let n_phi = 2 * order;
        let mut pts = Vec::with_capacity(order * n_phi);
        for &(z, w) in quad::rule(order) {
            let s = (1.0 - z * z).sqrt();
            for k in 0..n_phi {
                let ang = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
                pts.push(([s * ang.cos(), s * ang.sin(), z], 0.5 * w / n_phi as f64));
            }
        }
        Box::leak(pts.into_boxed_slice())
    })
}

/// Mean of a three-dimensional probe over the sphere of the given radius.
pub fn spherical_average(phi: &TestFunction, radius: f64, order: usize) -> Result<Complex64> {
    if phi.dim() != 3 {
        return domain("spherical average needs a three-dimensional probe");
    }
    if order < 6 {
        return domain("sphere order must be at least 6");
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return domain("radius must be nonnegative");
    }
    Ok(sphere_rule(order)
        .iter()
        .map(|(n, w)| *w * phi.eval(&[radius * n[0], radius * n[1], radius * n[2]]))
        .sum())
}

/// Spherical average together with its disagreement with the next order up.
pub fn spherical_average_with_estimate(phi: &TestFunction, radius: f64, order: usize) -> Result<(Complex64, f64)> {
    let a = spherical_average(phi, radius, order)?;
    let b = spherical_average(phi, radius, order + 1)?;
    Ok((b, (b - a).norm()))
}

/// Radial profile `φ̄(r)` used by the three-dimensional pairing.
struct RadialProfile<'a> {
    phi: &'a TestFunction,
    order: usize,
}

impl RadialProfile<'_> {
    fn mean(&self, r: f64) -> Complex64 {
        if self.phi.is_radial() {
            self.phi.eval(&[r, 0.0, 0.0])
        } else {
            sphere_rule(self.order)
                .iter()
                .map(|(n, w)| *w * self.phi.eval(&[r * n[0], r * n[1], r * n[2]]))
                .sum()
        }
    }

    /// `G(r) = 4πr² φ̄(r)`.
    fn shell_mass(&self, r: f64) -> Complex64 {
        4.0 * PI * r * r * self.mean(r)
    }

    /// Fourth-order central difference of `φ̄` at `r`.
    fn slope(&self, r: f64, d: f64) -> Complex64 {
        (-self.mean(r + 2.0 * d) + 8.0 * self.mean(r + d) - 8.0 * self.mean(r - d) + self.mean(r - 2.0 * d))
            / (12.0 * d)
    }
}

/// Hadamard finite part `FP∫₀^R h(r)/(r − t)² dr` at one refinement level.
fn finite_part_double_pole(t: f64, h: &dyn Fn(f64) -> Complex64, r_max: f64, scale: f64, level: u32) -> Complex64 {
    let cap = panel_cap(scale, level);
    let kernel = |r: f64| h(r) / ((r - t) * (r - t));
    if t - r_max >= scale {
        let mut pts = quad::graded(t, r_max, 0.0, cap);
        pts.reverse();
        return quad::composite(&pts, PANEL_ORDER, kernel);
    }
    let a = (0.5 * t).min(scale);
    let mut left = quad::graded(t, t - a, 0.0, cap);
    left.reverse();
    let right = if t + a < r_max { quad::graded(t, t + a, r_max, cap) } else { Vec::new() };
    let outer = quad::composite(&left, PANEL_ORDER, kernel) + quad::composite(&right, PANEL_ORDER, kernel);
    let ht = h(t);
    let folded = |u: f64| (h(t + u) + h(t - u) - 2.0 * ht) / (u * u);
    // The folded integrand tends to h''(t); below u0 it is taken as constant.
    let u0 = a / 4096.0;
    let pts: Vec<f64> = quad::dyadic_to_zero(a, 12, cap).into_iter().filter(|&u| u >= u0).collect();
    let window = quad::composite(&pts, PANEL_ORDER, folded) + u0 * folded(u0);
    outer + window - 2.0 * ht / a
}

/// `PV∫₀^R D(r)G(r) dr` for the massive three-dimensional remainder, whose
/// kernel has a simple pole and a logarithm at `r = t`.
fn massive_remainder_3d(
    t: f64,
    m: f64,
    profile: &RadialProfile<'_>,
    r_max: f64,
    scale: f64,
    level: u32,
) -> Result<Complex64> {
    let cap = panel_cap(scale, level).min(0.25 / m);
    let mut failure = None;
    // `q = r² − t²` is passed in so that the window can form it from the
    // offset `u` without cancellation; the pole terms only cancel if it is exact.
    let mut kernel = |r: f64, q: f64| -> Complex64 {
        if q == 0.0 {
            return ZERO;
        }
        let z = if q < 0.0 { KernelArg::imag(m * (-q).sqrt()) } else { KernelArg::real(m * q.sqrt()) };
        match z.and_then(specfun::k2_deficit) {
            Ok(def) => Complex64::new(0.0, -t / (PI * PI)) * (m * m / (2.0 * q)) * def * profile.shell_mass(r),
            Err(e) => {
                failure.get_or_insert(e);
                ZERO
            }
        }
    };
    let a = (0.5 * t).min(scale);
    let mut left = quad::graded(t, t - a, 0.0, cap);
    left.reverse();
    let right = if t + a < r_max { quad::graded(t, t + a, r_max, cap) } else { Vec::new() };
    let mut total = quad::composite(&left, PANEL_ORDER, |r| kernel(r, (r - t) * (r + t)))
        + quad::composite(&right, PANEL_ORDER, |r| kernel(r, (r - t) * (r + t)));
    total += quad::composite(&quad::dyadic_to_zero(a, 50, cap), PANEL_ORDER, |u| {
        kernel(t + u, u * (2.0 * t + u)) + kernel(t - u, -u * (2.0 * t - u))
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// `∫ conj(C^m_it)(x) φ(x) d³x` for the three-dimensional functional
/// (massless when `m = 0`).
///
/// The delta part is the sphere term `d/dt[t·φ̄(t)] − (m²t²/2)·φ̄(t)`; the
/// regular part is `(i/π²)·FP∫ t·G(r)/(t² − r²)² dr` plus, for `m > 0`, the
/// principal value of the massive remainder.
pub fn pair_cauchy_3d(t: f64, m: f64, phi: &TestFunction, cfg: &RegularizationConfig) -> Result<PairingResult> {
    cfg.validate()?;
    if phi.dim() != 3 {
        return domain("three-dimensional pairing needs a three-dimensional probe");
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain("time must be positive");
    }
    if !(m >= 0.0 && m.is_finite()) {
        return domain("mass must be nonnegative");
    }
    let r_max = cfg.cutoff_for(phi.reach())?;
    let scale = phi.scale();
    let order = cfg.sphere_order;
    if !phi.is_radial() {
        let (_, est) = spherical_average_with_estimate(phi, t, order)?;
        let lo = spherical_average(phi, t, order)?;
        let hi = spherical_average(phi, t, order + 4)?;
        let spread = (hi - lo).norm().max(est);
        if spread > 1e-8 {
            return Err(Error::Convergence { what: "spherical quadrature".into(), estimate: spread });
        }
    }
    let profile = RadialProfile { phi, order };
    let mean_t = profile.mean(t);
    let d = 0.01 * (0.25 * t).min(scale);
    let mut delta = mean_t + t * profile.slope(t, d);
    if m > 0.0 {
        delta -= 0.5 * m * m * t * t * mean_t;
    }
    let h = |r: f64| t * profile.shell_mass(r) / ((r + t) * (r + t));
    let fp = |level| finite_part_double_pole(t, &h, r_max, scale, level);
    let factor = Complex64::new(0.0, 1.0 / (PI * PI));
    let mut fine = factor * fp(cfg.levels);
    let mut coarse = factor * fp(cfg.levels - 1);
    if m > 0.0 {
        fine += massive_remainder_3d(t, m, &profile, r_max, scale, cfg.levels)?;
        coarse += massive_remainder_3d(t, m, &profile, r_max, scale, cfg.levels - 1)?;
    }
    Ok(PairingResult::new(delta, fine, (fine - coarse).norm()))
}
