//! Radon-transform view of the pre-measures.
//!
//! Along a unit direction `ξ` the pre-measure of a cylinder base projects to
//! the one-dimensional functional `C_{iQ}` with `Q(ξ) = Σ_j |(ξ, α_j)| Δt_j`.
//! Half-space measures therefore have a closed form, and averaging them over
//! the sphere links them to measures of centred balls through a cap weight.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc;

use crate::error::{domain, Result};
use crate::premeasure::{self, ball_measure, circle_mean, octant_mean, CylinderSpec, MeasureConfig};
use crate::quad;

const UNIT_TOLERANCE: f64 = 1e-12;

fn check_unit(spec: &CylinderSpec, xi: &[f64]) -> Result<()> {
    if xi.len() != spec.k() {
        return domain(format!("direction has {} entries, base dimension is {}", xi.len(), spec.k()));
    }
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return domain(format!("direction must be a unit vector, |ξ| = {norm}"));
    }
    Ok(())
}

/// `Q(ξ) = Σ_j |(ξ, α_j)| Δt_j`, the time of the projected functional.
pub fn radon_q(spec: &CylinderSpec, xi: &[f64]) -> Result<f64> {
    check_unit(spec, xi)?;
    Ok(spec.radon_q(xi))
}

/// The half-space `(ξ, a) ≥ R` of a base.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceQuery {
    spec: CylinderSpec,
    xi: Vec<f64>,
    r: f64,
}

impl HalfSpaceQuery {
    pub fn new(spec: CylinderSpec, xi: Vec<f64>, r: f64) -> Result<Self> {
        check_unit(&spec, &xi)?;
        if !(r > 0.0 && r.is_finite()) {
            return domain("half-space offset must be positive");
        }
        Ok(Self { spec, xi, r })
    }

    pub fn spec(&self) -> &CylinderSpec {
        &self.spec
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn q(&self) -> f64 {
        self.spec.radon_q(&self.xi)
    }
}

/// `−(i/2π) ln((R + Q)/(R − Q))`, the tail of `C_{iQ}` beyond `R`.
fn half_line_tail(q: f64, r: f64) -> Complex64 {
    Complex64::new(0.0, -((r + q) / (r - q)).ln() / (2.0 * PI))
}

/// Measure of the half-space, exact for the queried direction.
pub fn half_space_measure(q: &HalfSpaceQuery) -> Result<Complex64> {
    let big_q = q.q();
    if q.r <= big_q {
        return domain(format!("half-space offset {} does not clear the spike at Q = {big_q}", q.r));
    }
    Ok(half_line_tail(big_q, q.r))
}

/// Closed-form measure of `|a| ≥ R`.
///
/// With `Q` the projected time, the ball of radius `R > max Q` has measure
/// `1 + ⟨K(Q)⟩` over directions, where the kernel follows from the Hankel
/// transform of the ball indicator: `K = (i/π) ln((R+Q)/(R−Q))` on the two
/// points of `S⁰`, `K = iQ/√(R² − Q²)` on the circle and
/// `K = (i/π) ln((R+Q)/(R−Q)) + (2i/π) RQ/(R² − Q²)` on the sphere. The
/// complement is `−⟨K⟩`.
pub fn ball_complement(spec: &CylinderSpec, r: f64) -> Result<Complex64> {
    let q_max = spec.max_radius()?;
    if r <= q_max {
        return domain(format!("radius {r} does not clear the atoms at distance {q_max}"));
    }
    let log_ratio = |q: f64| ((r + q) / (r - q)).ln();
    let im = match spec.k() {
        1 => -log_ratio(q_max) / PI,
        2 => {
            let mean = circle_mean(spec, 4, |th| {
                let q = spec.radon_q(&[th.cos(), th.sin()]);
                Complex64::new(q / (r * r - q * q).sqrt(), 0.0)
            });
            -mean.re
        }
        3 => {
            let mean = octant_mean(16, |w| {
                let q = spec.radon_q(&w);
                Complex64::new(log_ratio(q) / PI + 2.0 * r * q / (PI * (r * r - q * q)), 0.0)
            });
            -mean.re
        }
        _ => return domain("closed-form ball complements need k ≤ 3"),
    };
    Ok(Complex64::new(0.0, im))
}

/// Which exponent the cap density `(1 − y²)^e` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapExponent {
    /// `e = (n − 1)/2`, the exponent inside the normalizer `N_n`.
    Normalizer,
    /// `e = (n − 3)/2`, the density of one coordinate of a uniform point on
    /// the sphere in `Rⁿ`.
    Geometric,
}

/// Weight `N_n ∫_{R/ρ}^1 (1 − y²)^e dy` of the cap cut from the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapWeight {
    n: usize,
    variant: CapExponent,
}

impl CapWeight {
    pub fn new(n: usize, variant: CapExponent) -> Result<Self> {
        if n == 0 {
            return domain("cap weights need n ≥ 1");
        }
        Ok(Self { n, variant })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> CapExponent {
        self.variant
    }

    /// `None` for the two-point sphere, where the geometric density degenerates.
    pub fn exponent(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.variant {
            CapExponent::Normalizer => Some(0.5 * (n - 1.0)),
            CapExponent::Geometric if self.n >= 2 => Some(0.5 * (n - 3.0)),
            CapExponent::Geometric => None,
        }
    }

    /// `N_n = ½ (∫_0^1 (1 − y²)^e dy)^{-1} = 1/B(½, e + 1)`.
    pub fn normalizer(&self) -> Option<f64> {
        self.exponent().map(|e| (-ln_beta(0.5, e + 1.0)).exp())
    }
}

/// Fraction of directions `ξ` with `(ξ, a) ≥ R` for `|a| = ρ`, weighted by
/// the chosen cap density. Empty caps (`R ≥ ρ`) give 0.
pub fn cap_average(w: &CapWeight, r: f64, rho: f64) -> Result<f64> {
    if !(r >= 0.0 && rho > 0.0) {
        return domain("cap average needs R ≥ 0 and ρ > 0");
    }
    let x = r / rho;
    if x >= 1.0 {
        return Ok(0.0);
    }
    match w.exponent() {
        // On S⁰ one of the two directions always qualifies.
        None => Ok(0.5),
        // ∫_x^1 (1−y²)^e dy = ½ B(½, e+1) (1 − I_{x²}(½, e+1)).
        Some(e) => Ok(0.5 * (1.0 - beta_reg(0.5, e + 1.0, x * x))),
    }
}

/// Monte-Carlo estimate of the cap fraction on the sphere in `Rⁿ` and its
/// standard error.
pub fn monte_carlo_cap(n: usize, ratio: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 2 || samples == 0 {
        return domain("Monte-Carlo caps need n ≥ 2 and at least one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..samples {
        for x in v.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v[0] >= ratio * norm {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Both sides of the identity between the sphere average of half-space
/// measures and the cap-weighted Stieltjes integral of ball measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Nodes on `[0, π/2]` for the `y = sin θ` substitution.
const IDENTITY_PANELS: usize = 3;
const IDENTITY_ORDER: usize = 8;

/// Compare `⟨μ(half-space at R)⟩_ξ` with
/// `∫_R^∞ c(ρ) dM(ρ)`, `M(ρ) = μ(|a| < ρ)` and `c` the cap weight.
///
/// The right side is integrated by parts into
/// `∫_0^1 N(1 − y²)^e μ(|a| ≥ R/y) dy`, then `y = sin θ` removes the endpoint
/// singularity of the geometric density. Ball measures come from the
/// momentum-space quadrature, not from the closed form.
pub fn sphere_average_identity(spec: &CylinderSpec, r: f64, w: &CapWeight, cfg: &MeasureConfig) -> Result<IdentitySides> {
    let k = spec.k();
    if k != 2 && k != 3 {
        return domain("the sphere-average identity is checked for k ∈ {2, 3}");
    }
    if w.n() != k {
        return domain("cap weight dimension must match the base dimension");
    }
    let q_max = spec.max_radius()?;
    if r <= q_max {
        return domain("R must clear every atom");
    }
    let lhs = if k == 2 {
        circle_mean(spec, 4, |th| half_line_tail(spec.radon_q(&[th.cos(), th.sin()]), r))
    } else {
        octant_mean(16, |x| half_line_tail(spec.radon_q(&x), r))
    };
    let e = w.exponent().expect("n ≥ 2 has an exponent");
    let norm = w.normalizer().expect("n ≥ 2 has a normalizer");
    let pts = quad::uniform(0.0, 0.5 * PI, 0.5 * PI / IDENTITY_PANELS as f64);
    let mut failure = None;
    let integral = quad::composite(&pts, IDENTITY_ORDER, |theta| {
        let (s, c) = theta.sin_cos();
        match ball_measure(spec, r / s, cfg) {
            Ok(m) => c.powf(2.0 * e + 1.0) * (1.0 - m.value),
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    if let Some(err) = failure {
        return Err(err);
    }
    let rhs = norm * integral;
    Ok(IdentitySides { lhs, rhs, residual: (lhs - rhs).norm() })
}

/// The cap weight at `R/ρ = ratio` next to its large-`n` Gaussian tail
/// `(2π)^{-1/2} ∫_{ratio·√n}^∞ e^{−x²/2} dx`.
pub fn gaussian_limit(n: usize, ratio: f64, variant: CapExponent) -> Result<(f64, f64)> {
    if n < 10 {
        return domain("the Gaussian limit is meaningful for n ≥ 10");
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return domain("ratio must lie in (0, 1)");
    }
    let exact = cap_average(&CapWeight::new(n, variant)?, ratio, 1.0)?;
    let tail = 0.5 * erfc(ratio * (n as f64).sqrt() / std::f64::consts::SQRT_2);
    Ok((exact, tail))
}

/// Sphere-averaged half-space measure; a convenience for sweeps.
pub fn mean_half_space(spec: &CylinderSpec, r: f64) -> Result<Complex64> {
    if r <= spec.max_radius()? {
        return domain("R must clear every atom");
    }
    Ok(match spec.k() {
        1 => half_line_tail(premeasure::effective_time(spec)?, r),
        2 => circle_mean(spec, 4, |th| half_line_tail(spec.radon_q(&[th.cos(), th.sin()]), r)),
        3 => octant_mean(16, |x| half_line_tail(spec.radon_q(&x), r)),
        _ => return domain("sphere means are implemented for k ≤ 3"),
    })
}
