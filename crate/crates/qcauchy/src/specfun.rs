//! Bessel `J₀, J₁, Y₀, Y₁` and Macdonald `K₀, K₁, K₂` on the real and
//! imaginary axes.
//!
//! Two independent evaluation schemes are kept side by side:
//!
//! * ascending power series, summed in double-double arithmetic so the
//!   alternating terms of `J` and `Y` survive up to argument 24;
//! * Steed's continued fractions (CF1 for `J₀'/J₀`, CF2 for the Hankel
//!   ratio) on the real axis, and Temme's CF2 for `K₀, K₁`.
//!
//! Which one is used is a function of `|z|` alone (see [`Regime`]). Inside the
//! overlap window both are available and [`overlap_discrepancy`] reports how
//! far apart they are.
//!
//! Imaginary arguments go through the Hankel connection
//! `K₁(iy) = −(π/2)(J₁(y) − iY₁(y))` for `y > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Crossover between series and continued fractions for `J`, `Y`
/// (used for the imaginary axis of `K`).
pub const BESSEL_CROSSOVER: f64 = 12.0;
/// Crossover between series and Temme's fraction for real-argument `K`.
///
/// Kept low because the `K` series cancels like `e^{2x}`; the overlap window
/// around it is `[1, 4]`.
pub const MACDONALD_CROSSOVER: f64 = 2.0;

/// Evaluation regime of a kernel argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Series,
    Crossover,
    Asymptotic,
}

/// Which axis a [`KernelArg`] sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Real,
    Imaginary,
}

/// A nonzero argument on the real or the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelArg {
    value: Complex64,
    axis: Axis,
}

impl KernelArg {
    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn imag(y: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, y))
    }

    /// Accepts a complex value only if it lies on one of the two axes.
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return domain("non-finite kernel argument");
        }
        let axis = match (value.re == 0.0, value.im == 0.0) {
            (true, true) => return Err(Error::Pole("K has a pole at z = 0".into())),
            (_, true) => Axis::Real,
            (true, false) => Axis::Imaginary,
            (false, false) => return domain(format!("argument {value} is off both axes")),
        };
        Ok(Self { value, axis })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// Regime is decided by `|z|` relative to the axis crossover `z₀`:
    /// below `z₀/2` series, above `2z₀` asymptotic, in between crossover.
    pub fn regime(&self) -> Regime {
        let z0 = match self.axis {
            Axis::Real => MACDONALD_CROSSOVER,
            Axis::Imaginary => BESSEL_CROSSOVER,
        };
        regime_for(self.modulus(), z0)
    }
}

fn regime_for(r: f64, z0: f64) -> Regime {
    if r < 0.5 * z0 {
        Regime::Series
    } else if r > 2.0 * z0 {
        Regime::Asymptotic
    } else {
        Regime::Crossover
    }
}

/// `J₀, J₁, Y₀, Y₁` at one real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSet {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BesselSet {
    /// `J₁Y₀ − J₀Y₁ − 2/(πx)`; zero up to rounding when the set is consistent.
    pub fn wronskian_defect(&self, x: f64) -> f64 {
        self.j1 * self.y0 - self.j0 * self.y1 - 2.0 / (PI * x)
    }
}

/// `I₀, I₁, K₀, K₁` at one positive real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedSet {
    pub i0: f64,
    pub i1: f64,
    pub k0: f64,
    pub k1: f64,
}

// Only `TwoFloat / f64` is used for division: the crate's `TwoFloat / TwoFloat`
// rounds to plain double precision.
fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

struct SeriesSums {
    /// `Σ s^k u_k`, `u_k = (x/2)^{2k}/(k!)²`
    order0: f64,
    /// `Σ s^k H_k u_k`
    order0_harmonic: f64,
    /// `Σ s^k t_k`, `t_k = (x/2)^{2k+1}/(k!(k+1)!)`
    order1: f64,
    /// `Σ s^k (H_k + H_{k+1}) t_k`
    order1_harmonic: f64,
}

/// Ascending series in double-double; `alternating` selects `J`-type
/// (`s = −1`) or `I`-type (`s = +1`) sums.
fn series_sums(x: f64, alternating: bool) -> SeriesSums {
    let half = x * 0.5;
    let q = dd(half) * dd(half);
    let mut u = dd(1.0);
    let mut t = dd(half);
    let mut h_k = dd(0.0);
    let mut s0 = dd(0.0);
    let mut s0h = dd(0.0);
    let mut s1 = dd(0.0);
    let mut s1h = dd(0.0);
    let mut sign = 1.0;
    for k in 0..400usize {
        let h_next = h_k + dd(1.0) / ((k + 1) as f64);
        s0 += u * sign;
        s0h += u * h_k * sign;
        s1 += t * sign;
        s1h += t * (h_k + h_next) * sign;
        let kf = (k + 1) as f64;
        u = u * q / (kf * kf);
        t = t * q / (kf * (kf + 1.0));
        h_k = h_next;
        if alternating {
            sign = -sign;
        }
        let scale = f64::from(s0).abs().max(f64::from(s1).abs()).max(1e-300);
        if k > 2 && f64::from(u).abs() * (1.0 + f64::from(h_k)) < 1e-34 * scale.max(1.0)
            && f64::from(t).abs() * (2.0 + 2.0 * f64::from(h_k)) < 1e-34 * scale.max(1.0)
        {
            break;
        }
    }
    SeriesSums {
        order0: f64::from(s0),
        order0_harmonic: f64::from(s0h),
        order1: f64::from(s1),
        order1_harmonic: f64::from(s1h),
    }
}

/// Power-series evaluation of `J₀, J₁, Y₀, Y₁` (accurate for `0 < x ≤ 24`).
pub fn bessel_series(x: f64) -> BesselSet {
    let s = series_sums(x, true);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let j0 = s.order0;
    let j1 = s.order1;
    let y0 = (2.0 / PI) * (lg * j0 - s.order0_harmonic);
    let y1 = -2.0 / (PI * x) + (2.0 / PI) * lg * j1 - s.order1_harmonic / PI;
    BesselSet { j0, j1, y0, y1 }
}

/// Steed's method for `J₀, J₁, Y₀, Y₁` (valid for `x ≥ 2`).
pub fn bessel_steed(x: f64) -> Result<BesselSet> {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 100_000;
    if x < 2.0 {
        return domain("continued fractions need x >= 2");
    }
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 at order 0: h = J₀'/J₀, sign of J₀ tracked through `isign`.
    let mut isign = 1.0;
    let mut h = FPMIN;
    let mut b = 0.0;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "CF1".into(), estimate: f64::NAN });
    }
    // At order 0 the fraction yields J₀'/J₀ = −J₁/J₀.
    let f = h;

    // CF2 at order 0: p + iq = (J₀' + iY₀')/(J₀ + iY₀).
    let mut a = 0.25;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    converged = false;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "CF2".into(), estimate: f64::NAN });
    }
    let gam = (p - f) / q;
    let j0 = (w / ((p - f) * gam + q)).sqrt().copysign(isign);
    let y0 = j0 * gam;
    let j0p = f * j0;
    let y0p = y0 * (p + q / gam);
    Ok(BesselSet { j0, j1: -j0p, y0, y1: -y0p })
}

/// `J₀, J₁, Y₀, Y₁` for `x > 0`, regime chosen by [`BESSEL_CROSSOVER`].
pub fn bessel_set(x: f64) -> Result<BesselSet> {
    if !x.is_finite() {
        return domain("non-finite Bessel argument");
    }
    if x <= 0.0 {
        return domain("Bessel argument must be positive");
    }
    if x < BESSEL_CROSSOVER {
        Ok(bessel_series(x))
    } else {
        bessel_steed(x)
    }
}

/// Bessel function of the first kind, order one, for `x > 0`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    Ok(bessel_set(x)?.j1)
}

/// Bessel function of the second kind, order one, for `x > 0`.
pub fn bessel_y1(x: f64) -> Result<f64> {
    Ok(bessel_set(x)?.y1)
}

/// Ascending series for `I₀, I₁, K₀, K₁` (use for `x ≲ 4`).
pub fn modified_series(x: f64) -> ModifiedSet {
    let s = series_sums(x, false);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let i0 = s.order0;
    let i1 = s.order1;
    let k0 = -lg * i0 + s.order0_harmonic;
    let k1 = 1.0 / x + lg * i1 - 0.5 * s.order1_harmonic;
    ModifiedSet { i0, i1, k0, k1 }
}

/// Temme's continued fraction for `K₀, K₁` (valid for `x ≥ 1`, used from 2).
/// The `I` fields are left as NaN.
pub fn modified_temme(x: f64) -> Result<ModifiedSet> {
    const EPS: f64 = 1e-16;
    if x < 1.0 {
        return domain("Temme's fraction needs x >= 1");
    }
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 1..100_000usize {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "Temme CF2".into(), estimate: f64::NAN });
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    Ok(ModifiedSet { i0: f64::NAN, i1: f64::NAN, k0, k1 })
}

/// `K₀(x), K₁(x)` for `x > 0`.
pub fn macdonald_real(x: f64) -> Result<(f64, f64)> {
    if x < MACDONALD_CROSSOVER {
        let s = modified_series(x);
        Ok((s.k0, s.k1))
    } else {
        let s = modified_temme(x)?;
        Ok((s.k0, s.k1))
    }
}

/// `K₀(z)` and `K₁(z)` for an argument on either axis.
pub fn macdonald_k01(z: KernelArg) -> Result<(Complex64, Complex64)> {
    let v = z.value();
    match z.axis() {
        Axis::Real => {
            if v.re < 0.0 {
                return domain("K is only provided on the positive real axis");
            }
            let (k0, k1) = macdonald_real(v.re)?;
            Ok((Complex64::new(k0, 0.0), Complex64::new(k1, 0.0)))
        }
        Axis::Imaginary => {
            let y = v.im.abs();
            let b = bessel_set(y)?;
            let h2_0 = Complex64::new(b.j0, -b.y0);
            let h2_1 = Complex64::new(b.j1, -b.y1);
            // K₀(iy) = −(πi/2)H₀⁽²⁾(y), K₁(iy) = −(π/2)H₁⁽²⁾(y); the lower
            // half-axis uses H⁽¹⁾ = conj(H⁽²⁾) with the mirrored prefactors.
            if v.im > 0.0 {
                Ok((Complex64::new(0.0, -0.5 * PI) * h2_0, -0.5 * PI * h2_1))
            } else {
                let h1_0 = h2_0.conj();
                let h1_1 = h2_1.conj();
                Ok((Complex64::new(0.0, 0.5 * PI) * h1_0, -0.5 * PI * h1_1))
            }
        }
    }
}

/// Macdonald function `K₁(z)` on the real or imaginary axis.
pub fn macdonald_k1(z: KernelArg) -> Result<Complex64> {
    Ok(macdonald_k01(z)?.1)
}

/// Macdonald function `K₀(z)` on the real or imaginary axis.
pub fn macdonald_k0(z: KernelArg) -> Result<Complex64> {
    Ok(macdonald_k01(z)?.0)
}

/// `K₂(z) = K₀(z) + (2/z)K₁(z)`.
pub fn macdonald_k2(z: KernelArg) -> Result<Complex64> {
    let (k0, k1) = macdonald_k01(z)?;
    Ok(k0 + 2.0 * k1 / z.value())
}

/// Harmonic-number series `Σ_k (z²/4)^k/(k!(k+1)!) · c_k(L)` shared by the two
/// small-argument expansions below; `L = ln(z/2) + γ` on the principal branch.
fn small_z_series(z: Complex64, coeff: impl Fn(usize, Complex64, f64, f64) -> Complex64) -> Complex64 {
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let q = 0.25 * z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut h_k = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..200usize {
        let h_next = h_k + 1.0 / (k + 1) as f64;
        let add = term * coeff(k, lg, h_k, h_next);
        acc += add;
        if k > 2 && add.norm() < 1e-18 * acc.norm().max(1e-300) {
            break;
        }
        let kf = (k + 1) as f64;
        term = term * q / (kf * (kf + 1.0));
        h_k = h_next;
    }
    acc
}

/// `(z·K₁(z) − 1)/z²`, free of the cancellation that the direct formula
/// suffers near `z = 0`. The direct formula is used for `|z| > 2`.
pub fn zk1_excess(z: KernelArg) -> Result<Complex64> {
    let v = z.value();
    if z.modulus() > 2.0 {
        let k1 = macdonald_k1(z)?;
        return Ok((v * k1 - 1.0) / (v * v));
    }
    Ok(0.25 * small_z_series(v, |_, lg, hk, hk1| 2.0 * lg - hk - hk1))
}

/// `2/z² − K₂(z)`, again with a series near the origin where both terms blow up.
pub fn k2_deficit(z: KernelArg) -> Result<Complex64> {
    let v = z.value();
    if z.modulus() > 2.0 {
        let k2 = macdonald_k2(z)?;
        return Ok(2.0 / (v * v) - k2);
    }
    Ok(0.5 * small_z_series(v, |k, lg, hk, hk1| k as f64 * (2.0 * lg - hk - hk1) + 1.0))
}

/// Largest relative disagreement between the series and the continued
/// fraction over `n` points of the overlap window `[z₀/2, 2z₀]`.
///
/// Returns `(imaginary-axis J/Y discrepancy, real-axis K discrepancy)`.
pub fn overlap_discrepancy(n: usize) -> Result<(f64, f64)> {
    let mut worst_jy: f64 = 0.0;
    let mut worst_k: f64 = 0.0;
    for i in 0..n {
        let frac = i as f64 / (n - 1).max(1) as f64;
        let x = 0.5 * BESSEL_CROSSOVER * 4f64.powf(frac);
        let s = bessel_series(x);
        let c = bessel_steed(x)?;
        // Relative to the local amplitude √(J² + Y²), which avoids dividing by
        // a value sitting on a zero of J or Y.
        let amp0 = s.j0.hypot(s.y0);
        let amp1 = s.j1.hypot(s.y1);
        for (u, v, amp) in [
            (s.j0, c.j0, amp0),
            (s.y0, c.y0, amp0),
            (s.j1, c.j1, amp1),
            (s.y1, c.y1, amp1),
        ] {
            worst_jy = worst_jy.max((u - v).abs() / amp);
        }
        let xk = 0.5 * MACDONALD_CROSSOVER * 4f64.powf(frac);
        let ks = modified_series(xk);
        let kc = modified_temme(xk)?;
        worst_k = worst_k
            .max(((ks.k0 - kc.k0) / kc.k0).abs())
            .max(((ks.k1 - kc.k1) / kc.k1).abs());
    }
    Ok((worst_jy, worst_k))
}
