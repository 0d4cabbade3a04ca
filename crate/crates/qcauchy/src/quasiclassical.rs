//! The smooth factor linking the massless and massive functionals, the
//! large-mass regime of the Macdonald kernel and the large-mass limit of the
//! Foldy–Wouthuysen transform.
//!
//! With `l_t² = t² − x²`, the massive kernel is the massless one times
//! `B(t, x) = z K₁(z)`, `z = i m l_t`. The branch of `l_t` is fixed so that
//! `z` is positive imaginary inside the light cone and positive real outside,
//! where the kernel then decays like `e^{−m√(x² − t²)}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{self, PANEL_ORDER};
use crate::relativistic::{fw_unitary, max_abs, DiracBasis};
use crate::specfun::{self, KernelArg};
use crate::testfn::{pair_cauchy_1d, pair_cauchy_massive_1d, FnProbe, RegularizationConfig, TestFunction};

/// A point `(t, x)` with its light-cone distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightconeCoord {
    pub t: f64,
    pub x: f64,
}

impl LightconeCoord {
    pub fn new(t: f64, x: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite() && x.is_finite()) {
            return domain("light-cone coordinates need t > 0 and finite x");
        }
        Ok(Self { t, x })
    }

    /// `l_t`: `√(t² − x²)` inside the cone, `−i√(x² − t²)` outside.
    pub fn l(&self) -> Complex64 {
        let gap = self.t * self.t - self.x * self.x;
        if gap >= 0.0 {
            Complex64::new(gap.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, -(-gap).sqrt())
        }
    }

    pub fn inside(&self) -> bool {
        self.x.abs() < self.t
    }

    /// `z = i m l_t` as an axis-tagged kernel argument.
    fn z(&self, m: f64) -> Result<KernelArg> {
        let gap = self.t * self.t - self.x * self.x;
        if gap > 0.0 {
            KernelArg::imag(m * gap.sqrt())
        } else {
            KernelArg::real(m * (-gap).sqrt())
        }
    }
}

/// Value of `B` and whether it was taken as the light-cone limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BFactor {
    pub value: Complex64,
    pub on_cone: bool,
}

/// `B(t, x) = i m l_t K₁(i m l_t)`, equal to 1 on the cone and at `m = 0`.
pub fn b_factor(t: f64, x: f64, m: f64) -> Result<BFactor> {
    let c = LightconeCoord::new(t, x)?;
    if !(m >= 0.0) {
        return domain("mass must be nonnegative");
    }
    if m == 0.0 || t * t - x * x == 0.0 {
        return Ok(BFactor { value: Complex64::new(1.0, 0.0), on_cone: m != 0.0 });
    }
    let z = c.z(m)?;
    // Near the cone 1 + z²·(zK₁(z) − 1)/z² avoids the cancellation in zK₁;
    // far from it the excess is ≈ −1/z² and the same sum cancels instead.
    let v = if z.modulus() < 1.0 {
        1.0 + z.value() * z.value() * specfun::zk1_excess(z)?
    } else {
        z.value() * specfun::macdonald_k1(z)?
    };
    Ok(BFactor { value: v, on_cone: false })
}

/// Result of comparing the massless pairing of `Bφ` with the massive
/// pairing of `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BCheck {
    pub via_b: Complex64,
    pub massive: Complex64,
    pub residual: f64,
}

fn support_inside_cone(t: f64, phi: &TestFunction) -> bool {
    let (center, radius) = phi.support_ball();
    center[0].abs() + radius < t
}

/// `∫ conj(C_{it}) B φ` against `∫ conj(C^m_{it}) φ` for a probe supported
/// strictly inside the cone.
///
/// With `K₁` on the principal branch, the functional whose transform is
/// `e^{itE}` is `C·conj(B)`, so under the conjugating pairing the factor
/// reaches the probe as `B` itself.
pub fn massive_via_b_check(t: f64, m: f64, phi: &TestFunction, cfg: &RegularizationConfig) -> Result<BCheck> {
    if phi.dim() != 1 {
        return domain("the B-factor check is one-dimensional");
    }
    if !support_inside_cone(t, phi) {
        return domain("probe support must lie inside (−t, t)");
    }
    let failure = std::cell::RefCell::new(None::<Error>);
    let probe = FnProbe {
        f: |x: f64| {
            let v = phi.eval1(x);
            if v == Complex64::new(0.0, 0.0) {
                return v;
            }
            match b_factor(t, x, m) {
                Ok(b) => b.value * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        reach: phi.reach(),
        scale: phi.scale(),
    };
    let via_b = pair_cauchy_1d(t, &probe, cfg)?.total;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let massive = pair_cauchy_massive_1d(t, m, phi, cfg)?.total;
    Ok(BCheck { via_b, massive, residual: (via_b - massive).norm() })
}

/// Exterior comparison: a probe supported beyond the cone sees only the
/// regular kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorCheck {
    /// Massive pairing from the general routine.
    pub massive: Complex64,
    /// Plain quadrature of `−(i/π) t B/(t² − x²) φ` over the support.
    pub direct: Complex64,
    /// Massless pairing from the general routine.
    pub massless: Complex64,
    /// Plain quadrature of `−(i/π) t (B − 1)/(t² − x²) φ`.
    pub correction: Complex64,
    /// `|massive − direct|`.
    pub residual: f64,
    /// `|massive − massless − correction|`.
    pub decomposition_residual: f64,
}

pub fn exterior_b_check(t: f64, m: f64, phi: &TestFunction, cfg: &RegularizationConfig) -> Result<ExteriorCheck> {
    if phi.dim() != 1 {
        return domain("the B-factor check is one-dimensional");
    }
    let (center, radius) = phi.support_ball();
    let (lo, hi) = (center[0] - radius, center[0] + radius);
    if !(lo > t || hi < -t) {
        return domain("probe support must lie outside [−t, t]");
    }
    let pts = quad::uniform(lo, hi, phi.scale() / 8.0);
    let mut failure = None;
    let mut kernel = |x: f64, minus_one: bool| -> Complex64 {
        match b_factor(t, x, m) {
            Ok(b) => {
                let b = if minus_one { b.value - 1.0 } else { b.value };
                // conj of (i/π) t B/(t² − x²) with B real outside the cone.
                Complex64::new(0.0, -t / (PI * (t * t - x * x))) * b.re * phi.eval1(x)
            }
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let direct = quad::composite(&pts, PANEL_ORDER, |x| kernel(x, false));
    let correction = quad::composite(&pts, PANEL_ORDER, |x| kernel(x, true));
    if let Some(e) = failure {
        return Err(e);
    }
    let massive = pair_cauchy_massive_1d(t, m, phi, cfg)?.total;
    let massless = pair_cauchy_1d(t, phi, cfg)?.total;
    Ok(ExteriorCheck {
        massive,
        direct,
        massless,
        correction,
        residual: (massive - direct).norm(),
        decomposition_residual: (massive - massless - correction).norm(),
    })
}

/// Regular part of the massive kernel inside the cone,
/// `−(t m/π) K₁(i m l_t)/l_t`.
pub fn massive_kernel(t: f64, x: f64, m: f64) -> Result<Complex64> {
    let c = LightconeCoord::new(t, x)?;
    if !c.inside() {
        return domain("the kernel is evaluated inside the cone");
    }
    let l = c.l().re;
    Ok(-(t * m / PI) * specfun::macdonald_k1(KernelArg::imag(m * l)?)? / l)
}

/// Smallest `m·l_t` accepted by [`eikonal_asymptotic`].
pub const EIKONAL_MIN: f64 = 20.0;

/// `−(t m/π) √(π/(2 i m l_t)) e^{−i m l_t}/l_t`, the kernel with `K₁` replaced
/// by its leading large-argument term. Its phase is `−m l_t` up to a constant.
pub fn eikonal_asymptotic(t: f64, x: f64, m: f64) -> Result<Complex64> {
    let c = LightconeCoord::new(t, x)?;
    if !c.inside() {
        return domain("the eikonal form is taken inside the cone");
    }
    let l = c.l().re;
    if m * l < EIKONAL_MIN {
        return Err(Error::OutOfRegime(format!("m·l_t = {} is below {EIKONAL_MIN}", m * l)));
    }
    let z = Complex64::new(0.0, m * l);
    let k1 = (PI / (2.0 * z)).sqrt() * (-z).exp();
    Ok(-(t * m / PI) * k1 / l)
}

/// Relative errors of the asymptotic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalError {
    /// `||asymptotic| / |exact| − 1|`, second order in `1/(m l_t)`.
    pub modulus: f64,
    /// `|asymptotic − exact| / |exact|`, first order in `1/(m l_t)`.
    pub complex: f64,
}

pub fn eikonal_error(t: f64, x: f64, m: f64) -> Result<EikonalError> {
    let asym = eikonal_asymptotic(t, x, m)?;
    let exact = massive_kernel(t, x, m)?;
    Ok(EikonalError { modulus: (asym.norm() / exact.norm() - 1.0).abs(), complex: (asym - exact).norm() / exact.norm() })
}

/// One row of the large-mass table of the FW transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalRow {
    pub m: f64,
    /// `‖T(p, m) − γ⁰‖_max`.
    pub deviation: f64,
}

/// `‖T(p, m) − γ⁰‖` along a mass sweep; it falls off like `ρ/(2m)`.
pub fn fw_classical_limit(p: &[f64; 3], masses: &[f64]) -> Result<Vec<ClassicalRow>> {
    let g0 = *DiracBasis::standard().gamma0();
    masses
        .iter()
        .map(|&m| {
            let t = fw_unitary(p, m)?;
            Ok(ClassicalRow { m, deviation: max_abs(&(t.matrix - g0)) })
        })
        .collect()
}
