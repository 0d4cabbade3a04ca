//! Convolution identities of the Cauchy functionals.
//!
//! In momentum space the semigroup law is exponent additivity of the symbol.
//! In coordinates it is checked for two factors by expanding each functional
//! into its spike part `D_a = ½(δ(x − a) + δ(x + a))` and its principal-value
//! part `P_a = (1/π) PV a/(a² − x²)`, which gives four cross terms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::momentum::symbol;
use crate::quad::{self, PANEL_ORDER};
use crate::testfn::{pair_cauchy_1d, FnProbe, RegularizationConfig, TestFunction};

/// Breakpoints `0 = t₀ < t₁ < … < t_n = t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breaks: Vec<f64>,
}

impl Partition {
    pub fn new(breaks: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 {
            return domain("a partition starts at 0 and has at least one step");
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return domain("partition breakpoints must increase strictly");
        }
        Ok(Self { breaks })
    }

    pub fn from_increments(dt: &[f64]) -> Result<Self> {
        let mut breaks = vec![0.0];
        let mut acc = 0.0;
        for d in dt {
            acc += d;
            breaks.push(acc);
        }
        Self::new(breaks)
    }

    pub fn uniform(t: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("a partition needs at least one step");
        }
        Self::new((0..=n).map(|j| t * j as f64 / n as f64).collect())
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn increments(&self) -> Vec<f64> {
        self.breaks.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn total(&self) -> f64 {
        *self.breaks.last().expect("nonempty")
    }

    pub fn n(&self) -> usize {
        self.breaks.len() - 1
    }
}

/// `|Π_j S(m, Δt_j, p) − S(m, t, p)|`.
pub fn semigroup_symbol_check(m: f64, part: &Partition, p: &[f64]) -> f64 {
    let product = part.increments().iter().fold(Complex64::new(1.0, 0.0), |acc, &dt| acc * symbol(m, dt, p));
    (product - symbol(m, part.total(), p)).norm()
}

/// Both sides of the two-factor convolution identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionSides {
    /// `∬ conj(C_{iΔt₁}(u) C_{iΔt₂}(v)) φ(u + v) du dv`.
    pub lhs: Complex64,
    /// `∫ conj(C_{it}) φ`.
    pub rhs: Complex64,
    pub residual: f64,
}

/// `PV∫_lo^hi f(v)/(c − v) dv` by subtracting `f(c)`: the difference quotient
/// is smooth and the logarithm carries the principal value.
fn subtracted_pole(c: f64, lo: f64, hi: f64, h: f64, f: &dyn Fn(f64) -> Complex64) -> Complex64 {
    let fc = f(c);
    let pts = quad::with_extra(quad::uniform(lo, hi, h), &[c]);
    let body = quad::composite(&pts, PANEL_ORDER, |v| (f(v) - fc) / (c - v));
    body + fc * ((c - lo) / (c - hi)).abs().ln()
}

/// `−i ∫ P_b(v) φ(u + v) dv` over the support of the shifted probe, using
/// `b/(b² − v²) = ½[1/(b − v) − 1/(−b − v)]`.
fn shifted_regular(b: f64, u: f64, phi: &TestFunction, h: f64) -> Complex64 {
    let reach = phi.reach();
    let (lo, hi) = (-u - reach, -u + reach);
    let f = |v: f64| phi.eval1(u + v);
    let pv = subtracted_pole(b, lo, hi, h, &f) - subtracted_pole(-b, lo, hi, h, &f);
    Complex64::new(0.0, -1.0 / (2.0 * PI)) * pv
}

/// Two-factor coordinate-space semigroup check for the massless functional.
///
/// The spike–spike term is exact and the spike–PV terms are single
/// principal-value pairings. The PV–PV term nests an inner principal-value
/// integral over the shifted support of `φ` inside an outer pairing. The inner
/// function decays like `u⁻²`, so its contribution beyond the outer cutoff
/// `U₀` is added through the map `u = U₀/s`.
pub fn semigroup_coordinate_check(
    m: f64,
    part: &Partition,
    phi: &TestFunction,
    cfg: &RegularizationConfig,
) -> Result<ConvolutionSides> {
    if part.n() != 2 {
        return domain("the coordinate check is implemented for two factors");
    }
    if phi.dim() != 1 {
        return domain("the coordinate check needs a one-dimensional probe");
    }
    if m != 0.0 {
        return domain("the coordinate check covers the massless functional; use the symbol check for m > 0");
    }
    cfg.validate()?;
    let dt = part.increments();
    let (a, b) = (dt[0], dt[1]);
    let (reach, scale) = (phi.reach(), phi.scale());
    let h = scale / 2f64.powi(cfg.levels as i32);
    let u0 = reach + a + b + 4.0 * scale;

    let spikes: Complex64 = [a + b, a - b, -a + b, -a - b].iter().map(|&x| phi.eval1(x)).sum::<Complex64>() * 0.25;

    let shifted_even = |shift: f64| FnProbe {
        f: move |v: f64| 0.5 * (phi.eval1(v + shift) + phi.eval1(v - shift)),
        reach: reach + shift,
        scale,
    };
    let spike_pv = pair_cauchy_1d(b, &shifted_even(a), cfg)?.regular_part
        + pair_cauchy_1d(a, &shifted_even(b), cfg)?.regular_part;

    let inner = FnProbe { f: |u: f64| shifted_regular(b, u, phi, h), reach: u0, scale };
    let body = pair_cauchy_1d(a, &inner, cfg)?.regular_part;
    // −i ∫_{|u|>U₀} P_a(u) k(u) du with u = ±U₀/s.
    let pts = quad::uniform(0.0, 1.0, 0.125);
    let tail = quad::composite(&pts, PANEL_ORDER, |s| {
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let u = u0 / s;
        let k = shifted_regular(b, u, phi, h) + shifted_regular(b, -u, phi, h);
        k * (a * u0 / (PI * (a * a * s * s - u0 * u0)))
    });
    let pv_pv = body + Complex64::new(0.0, -1.0) * tail;

    let lhs = spikes + spike_pv + pv_pv;
    let rhs = pair_cauchy_1d(part.total(), phi, cfg)?.total;
    Ok(ConvolutionSides { lhs, rhs, residual: (lhs - rhs).norm() })
}

/// Finite-difference time derivative of the massless pairing against its
/// momentum-space right side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionCheck {
    pub derivative: Complex64,
    pub generator: Complex64,
    pub residual: f64,
}

/// Compare `∂_t ∫ conj(C_{it}) φ` by a central difference of step `h` with
/// `(1/2π) ∫ conj(i|p| e^{it|p|}) ψ(p) dp`.
///
/// The multiplier `i|p|` is the transform of `−(i/π)·FP x⁻²` under
/// `ψ(p) = ∫φ e^{ipx} dx`, since `FP∫ e^{ipx} x⁻² dx = −π|p|`.
pub fn evolution_equation_check(t: f64, h: f64, phi: &TestFunction, cfg: &RegularizationConfig) -> Result<EvolutionCheck> {
    if !(t > 0.0 && h > 0.0 && h < t) {
        return domain("need 0 < h < t");
    }
    if phi.dim() != 1 {
        return domain("the evolution check is one-dimensional");
    }
    let forward = pair_cauchy_1d(t + h, phi, cfg)?.total;
    let backward = pair_cauchy_1d(t - h, phi, cfg)?.total;
    let derivative = (forward - backward) / (2.0 * h);

    let (center, radius) = phi.momentum_ball();
    let (lo, hi) = (center[0] - radius, center[0] + radius);
    let step = (PI / (4.0 * (t + phi.reach()))).min((hi - lo) / 16.0);
    let pts = quad::with_extra(quad::uniform(lo, hi, step), &[0.0]);
    let mut failure = None;
    let integral = quad::composite(&pts, PANEL_ORDER, |p| {
        let multiplier = Complex64::new(0.0, p.abs()) * Complex64::from_polar(1.0, t * p.abs());
        match phi.fourier1(p) {
            Ok(psi) => multiplier.conj() * psi,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let generator = integral / (2.0 * PI);
    Ok(EvolutionCheck { derivative, generator, residual: (derivative - generator).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(Partition::new(vec![0.1, 0.5]).is_err());
        let p = Partition::from_increments(&[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(p.total(), 1.0);
        assert_eq!(p.n(), 3);
    }

    #[test]
    fn symbol_examples() {
        let halves = Partition::uniform(1.0, 2).unwrap();
        assert!(semigroup_symbol_check(0.7, &halves, &[1.3, -0.2, 0.4]) <= 1e-14);
        let p = Partition::uniform(2.0, 5).unwrap();
        assert!(semigroup_symbol_check(1.0, &p, &[0.0]) <= 1e-15);
    }

    #[test]
    fn finite_part_of_inverse_square() {
        // FP∫ e^{ipx} x⁻² dx = ∫ (cos px − 1) x⁻² dx = −π|p|.
        for p in [0.5, 2.0] {
            let pts = quad::uniform(0.0, 400.0, 0.05);
            let body = quad::composite_real(&pts, PANEL_ORDER, |x: f64| {
                if x == 0.0 { -0.5 * p * p } else { ((p * x).cos() - 1.0) / (x * x) }
            });
            // ∫_L^∞ (cos px − 1)/x² ≈ −1/L up to an O(L⁻²) oscillation.
            let value = 2.0 * (body - 1.0 / 400.0);
            assert!((value + PI * p).abs() < 1e-4, "{value}");
        }
    }
}
