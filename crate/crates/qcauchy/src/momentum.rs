//! Momentum symbols of the scalar functionals and Parseval-route pairings.
//!
//! The pairing `∫ conj(C)(x) φ(x) dx` equals `(2π)^{-d} ∫ conj(S)(p) ψ(p) dp`
//! with `S(p) = exp(it√(m² + |p|²))` and `ψ` the transform of `φ`. Because the
//! symbol is unimodular with a known phase speed, plain Gauss panels of width
//! tied to `t` resolve the oscillation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{self, PANEL_ORDER};
use crate::testfn::TestFunction;

/// The symbol `p ↦ exp(i t √(m² + |p|²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSymbol {
    pub mass: f64,
    pub time: f64,
    pub dim: usize,
}

impl ScalarSymbol {
    pub fn new(mass: f64, time: f64, dim: usize) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite() && time.is_finite()) {
            return domain("symbol needs finite time and nonnegative mass");
        }
        if dim != 1 && dim != 3 {
            return domain("symbol dimension must be 1 or 3");
        }
        Ok(Self { mass, time, dim })
    }

    pub fn eval(&self, p: &[f64]) -> Complex64 {
        symbol(self.mass, self.time, p)
    }

    /// The symbol as a function of `ρ = |p|`.
    pub fn radial(&self, rho: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.time * self.mass.hypot(rho))
    }
}

/// `exp(i t √(m² + |p|²))`.
pub fn symbol(m: f64, t: f64, p: &[f64]) -> Complex64 {
    let rho2: f64 = p.iter().map(|x| x * x).sum();
    Complex64::from_polar(1.0, t * (m * m + rho2).sqrt())
}

/// Quadrature controls for the Parseval route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalConfig {
    /// Largest momentum panel in units of the natural width `π/(4·phase speed)`.
    pub panel_fraction: f64,
    /// Relative disagreement between the two resolutions that is accepted.
    pub tolerance: f64,
}

impl Default for ParsevalConfig {
    fn default() -> Self {
        Self { panel_fraction: 1.0, tolerance: 1e-8 }
    }
}

/// Value of a Parseval-route pairing and the gap between the two resolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalResult {
    pub value: Complex64,
    pub estimate: f64,
}

fn panel_width(sym: &ScalarSymbol, phi: &TestFunction, span: f64, cfg: &ParsevalConfig) -> f64 {
    // Phase speed of conj(S)·ψ in p: |t| from the symbol plus the probe's reach.
    let speed = sym.time.abs() + phi.reach();
    (cfg.panel_fraction * PI / (4.0 * speed)).min(span / 16.0)
}

fn checked<F>(cfg: &ParsevalConfig, mut run: F) -> Result<ParsevalResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let coarse = run(1.0)?;
    let fine = run(0.5)?;
    let estimate = (fine - coarse).norm();
    if estimate > cfg.tolerance * fine.norm().max(1e-300) && estimate > 1e-14 {
        return Err(Error::Convergence { what: "Parseval quadrature".into(), estimate });
    }
    Ok(ParsevalResult { value: fine, estimate })
}

fn collect<F>(pts: &[f64], mut f: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut failure = None;
    let v = quad::composite(pts, PANEL_ORDER, |p| match f(p) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `(2π)^{-d} ∫ conj(S)(p) ψ(p) dᵈp`.
///
/// In three dimensions the symbol is radial, so only the sphere means of `ψ`
/// enter and the integral is one-dimensional in `ρ`.
pub fn pair_via_parseval(sym: &ScalarSymbol, phi: &TestFunction, cfg: &ParsevalConfig) -> Result<ParsevalResult> {
    if phi.dim() != sym.dim {
        return domain("symbol and probe dimensions differ");
    }
    let (center, radius) = phi.momentum_ball();
    if sym.dim == 1 {
        let (lo, hi) = (center[0] - radius, center[0] + radius);
        checked(cfg, |scale| {
            let h = scale * panel_width(sym, phi, hi - lo, cfg);
            // The massless symbol has a kink at p = 0.
            let pts = quad::with_extra(quad::uniform(lo, hi, h), &[0.0]);
            Ok(collect(&pts, |p| Ok(sym.radial(p.abs()).conj() * phi.fourier1(p)?))? / (2.0 * PI))
        })
    } else {
        let rho_max = center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius;
        checked(cfg, |scale| {
            let h = scale * panel_width(sym, phi, rho_max, cfg);
            let pts = quad::uniform(0.0, rho_max, h);
            let integral =
                collect(&pts, |rho| Ok(rho * rho * sym.radial(rho).conj() * phi.fourier_sphere_mean(rho)?))?;
            Ok(integral / (2.0 * PI * PI))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::{pair_cauchy_1d, pair_cauchy_3d, pair_cauchy_massive_1d, RegularizationConfig};

    fn e_minus_x2(dim: usize) -> TestFunction {
        TestFunction::centered_gaussian(dim, 0.5f64.sqrt()).unwrap()
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(symbol(0.0, 1.0, &[0.0]), Complex64::new(1.0, 0.0));
        assert!((symbol(3.0, 2.0, &[0.0, 4.0, 0.0]) - Complex64::from_polar(1.0, 10.0)).norm() < 1e-15);
        assert!((symbol(0.0, 7.3, &[1.9]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_time_gives_value_at_origin() {
        let sym = ScalarSymbol::new(0.0, 0.0, 1).unwrap();
        let phi = TestFunction::centered_gaussian(1, 1.0).unwrap();
        // A unit symbol pairs to φ(0); the total integral ∫φ is ψ(0).
        let r = pair_via_parseval(&sym, &phi, &ParsevalConfig::default()).unwrap();
        assert!((r.value - 1.0).norm() < 1e-10, "{r:?}");
        assert!((phi.fourier1(0.0).unwrap() - (2.0 * PI).sqrt()).norm() < 1e-12);
    }

    #[test]
    fn massless_gaussian_frozen_value() {
        let sym = ScalarSymbol::new(0.0, 1.0, 1).unwrap();
        let r = pair_via_parseval(&sym, &e_minus_x2(1), &ParsevalConfig::default()).unwrap();
        // 30-digit quadrature of (1/2π)∫ √π e^{-p²/4} e^{-i|p|} dp.
        assert!((r.value - Complex64::new(0.36787944117144232, -0.60715770584139373)).norm() < 1e-9, "{}", r.value);
    }

    #[test]
    fn coordinate_and_momentum_routes_agree_1d() {
        let cfg = RegularizationConfig::default();
        let phi = e_minus_x2(1);
        let coord = pair_cauchy_1d(1.0, &phi, &cfg).unwrap().total;
        let mom = pair_via_parseval(&ScalarSymbol::new(0.0, 1.0, 1).unwrap(), &phi, &ParsevalConfig::default()).unwrap();
        assert!((coord - mom.value).norm() < 1e-6, "{coord} vs {}", mom.value);
        let coord = pair_cauchy_massive_1d(1.0, 1.0, &phi, &cfg).unwrap().total;
        let mom = pair_via_parseval(&ScalarSymbol::new(1.0, 1.0, 1).unwrap(), &phi, &ParsevalConfig::default()).unwrap();
        assert!((coord - mom.value).norm() < 1e-5, "{coord} vs {}", mom.value);
    }

    #[test]
    fn coordinate_and_momentum_routes_agree_3d() {
        let cfg = RegularizationConfig::default();
        let phi = e_minus_x2(3);
        for m in [0.0, 1.0] {
            let coord = pair_cauchy_3d(1.0, m, &phi, &cfg).unwrap().total;
            let mom = pair_via_parseval(&ScalarSymbol::new(m, 1.0, 3).unwrap(), &phi, &ParsevalConfig::default()).unwrap();
            assert!((coord - mom.value).norm() < 1e-4, "m={m}: {coord} vs {}", mom.value);
        }
    }

    #[test]
    fn conjugation_under_time_reversal() {
        let phi = TestFunction::gaussian(&[0.4], 0.8, &[0.0]).unwrap();
        let cfg = ParsevalConfig::default();
        let a = pair_via_parseval(&ScalarSymbol::new(1.0, 1.3, 1).unwrap(), &phi, &cfg).unwrap().value;
        let b = pair_via_parseval(&ScalarSymbol::new(1.0, -1.3, 1).unwrap(), &phi, &cfg).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-10);
    }
}
