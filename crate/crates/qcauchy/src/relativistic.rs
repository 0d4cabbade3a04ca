//! Matrix symbols of the free Dirac and Maxwell evolutions.
//!
//! Momentum convention: the Dirac Hamiltonian symbol is
//! `H(p) = γ⁰(γ·p) + γ⁰m` and the propagator symbol is `exp(itH(p))`, which
//! the Foldy–Wouthuysen unitary turns into `exp(itγ⁰E)`. The opposite sign of
//! the `γ·p` term belongs to the other Fourier convention and is carried
//! along as [`SignConvention::Minus`] where residuals are reported.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quad;
use crate::specfun;

pub type Matrix4c = Matrix4<Complex64>;
pub type Matrix3c = Matrix3<Complex64>;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const O: Complex64 = c(0.0, 0.0);
const I1: Complex64 = c(1.0, 0.0);
const IM: Complex64 = c(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs<M>(m: &M) -> f64
where
    for<'a> &'a M: IntoIterator<Item = &'a Complex64>,
{
    m.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dirac matrices in the Dirac representation, `γ⁰ = diag(1, 1, −1, −1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracBasis {
    pub gamma: [Matrix4c; 4],
}

impl DiracBasis {
    pub fn standard() -> Self {
        let g0 = Matrix4c::from_diagonal(&nalgebra::Vector4::new(I1, I1, -I1, -I1));
        // γ^i = [[0, σ_i], [−σ_i, 0]]
        let pauli = [
            [[O, I1], [I1, O]],
            [[O, -IM], [IM, O]],
            [[I1, O], [O, -I1]],
        ];
        let gi = |s: [[Complex64; 2]; 2]| {
            Matrix4c::from_fn(|r, col| match (r < 2, col < 2) {
                (true, false) => s[r][col - 2],
                (false, true) => -s[r - 2][col],
                _ => O,
            })
        };
        Self { gamma: [g0, gi(pauli[0]), gi(pauli[1]), gi(pauli[2])] }
    }

    pub fn gamma0(&self) -> &Matrix4c {
        &self.gamma[0]
    }

    /// `(γ, p) = Σ_i p_i γ^i`.
    pub fn slash(&self, p: &[f64; 3]) -> Matrix4c {
        (0..3).fold(Matrix4c::zeros(), |acc, i| acc + self.gamma[i + 1] * c(p[i], 0.0))
    }

    /// `max |{γ^μ, γ^ν} − 2η^{μν}I|` over all index pairs.
    pub fn clifford_defect(&self) -> f64 {
        let eta = [1.0, -1.0, -1.0, -1.0];
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let target = if mu == nu { Matrix4c::identity() * c(2.0 * eta[mu], 0.0) } else { Matrix4c::zeros() };
                worst = worst.max(max_abs(&(anti - target)));
            }
        }
        worst
    }
}

fn energy(p: &[f64; 3], m: f64) -> f64 {
    (m * m + p.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// `H(p) = γ⁰(γ·p) + γ⁰m`.
pub fn dirac_hamiltonian(p: &[f64; 3], m: f64) -> Matrix4c {
    let g = DiracBasis::standard();
    g.gamma0() * g.slash(p) + g.gamma0() * c(m, 0.0)
}

/// The Foldy–Wouthuysen unitary `γ⁰[(p,γ) + I(m + E)]/√(2E(m + E))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FwUnitary {
    pub p: [f64; 3],
    pub m: f64,
    pub energy: f64,
    pub matrix: Matrix4c,
}

impl FwUnitary {
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(self.matrix - self.matrix.adjoint()))
    }

    pub fn involution_defect(&self) -> f64 {
        max_abs(&(self.matrix * self.matrix - Matrix4c::identity()))
    }

    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() * self.matrix - Matrix4c::identity()))
    }

    /// `‖T H T − γ⁰E‖_max`.
    pub fn diagonalization_residual(&self) -> f64 {
        let g = DiracBasis::standard();
        let h = dirac_hamiltonian(&self.p, self.m);
        max_abs(&(self.matrix * h * self.matrix - g.gamma0() * c(self.energy, 0.0)))
    }
}

pub fn fw_unitary(p: &[f64; 3], m: f64) -> Result<FwUnitary> {
    if !(m >= 0.0) {
        return domain("mass must be nonnegative");
    }
    let e = energy(p, m);
    if e == 0.0 {
        return domain("the transform is undefined at m = 0, p = 0");
    }
    let g = DiracBasis::standard();
    let norm = (2.0 * e * (m + e)).sqrt();
    let matrix = g.gamma0() * (g.slash(p) + Matrix4c::identity() * c(m + e, 0.0)) / c(norm, 0.0);
    Ok(FwUnitary { p: *p, m, energy: e, matrix })
}

/// `exp(itγ⁰E)`, the diagonal propagator in the FW frame.
pub fn fw_diagonal_propagator(e: f64, t: f64) -> Matrix4c {
    let (up, down) = (Complex64::from_polar(1.0, t * e), Complex64::from_polar(1.0, -t * e));
    Matrix4c::from_diagonal(&nalgebra::Vector4::new(up, up, down, down))
}

/// `T exp(itγ⁰E) T`.
pub fn dirac_symbol(p: &[f64; 3], m: f64, t: f64) -> Result<Matrix4c> {
    let fw = fw_unitary(p, m)?;
    Ok(fw.matrix * fw_diagonal_propagator(fw.energy, t) * fw.matrix)
}

/// Sign of the `γ·p` term relative to [`dirac_hamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    Plus,
    Minus,
}

impl SignConvention {
    pub fn sign(self) -> f64 {
        match self {
            SignConvention::Plus => 1.0,
            SignConvention::Minus => -1.0,
        }
    }
}

/// `exp(itH_σ(p))` by direct matrix exponential, with `H_σ = σγ⁰(γ·p) + γ⁰m`.
pub fn dirac_symbol_direct(p: &[f64; 3], m: f64, t: f64, sigma: SignConvention) -> Matrix4c {
    let s = sigma.sign();
    let h = dirac_hamiltonian(&[s * p[0], s * p[1], s * p[2]], m);
    (h * c(0.0, t)).exp()
}

/// `G̃_t = sin(tE)/E` with its first two time derivatives.
pub fn kg_symbol(e: f64, t: f64) -> (f64, f64, f64) {
    if e == 0.0 {
        return (t, 1.0, 0.0);
    }
    let (s, co) = (t * e).sin_cos();
    (s / e, co, -e * s)
}

/// `max(|G̈ + E²G|, |G(0)|, |Ġ(0) − 1|)` for the Klein–Gordon symbol.
pub fn kg_initial_data_defect(e: f64, t: f64) -> f64 {
    let (g, _, g2) = kg_symbol(e, t);
    let (g0, g0dot, _) = kg_symbol(e, 0.0);
    (g2 + e * e * g).abs().max(g0.abs()).max((g0dot - 1.0).abs())
}

/// `γ⁰(γ⁰∂_t + iσ(γ·p) + im) G̃_t` with the time derivative taken analytically.
pub fn pauli_jordan_symbol(p: &[f64; 3], m: f64, t: f64, sigma: SignConvention) -> Matrix4c {
    let g = DiracBasis::standard();
    let (gt, gdot, _) = kg_symbol(energy(p, m), t);
    let op = g.gamma0() * c(gdot, 0.0)
        + g.slash(p) * c(0.0, sigma.sign() * gt)
        + Matrix4c::identity() * c(0.0, m * gt);
    g.gamma0() * op
}

/// Residuals of the Klein–Gordon route against [`dirac_symbol`] for both sign
/// conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliJordanReport {
    pub plus: f64,
    pub minus: f64,
}

impl PauliJordanReport {
    /// The convention whose residual is below `tol`, if exactly one is.
    pub fn selected(&self, tol: f64) -> Option<SignConvention> {
        match (self.plus <= tol, self.minus <= tol) {
            (true, false) => Some(SignConvention::Plus),
            (false, true) => Some(SignConvention::Minus),
            _ => None,
        }
    }
}

pub fn pauli_jordan_symbol_check(p: &[f64; 3], m: f64, t: f64) -> Result<PauliJordanReport> {
    let d = dirac_symbol(p, m, t)?;
    let res = |s| max_abs(&(pauli_jordan_symbol(p, m, t, s) - d));
    Ok(PauliJordanReport { plus: res(SignConvention::Plus), minus: res(SignConvention::Minus) })
}

/// How the Bessel argument of the massive Pauli–Jordan term is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselArgument {
    /// `J₁(m·l_t)/l_t`.
    Massive,
    /// `J₁(l_t)/l_t`, as printed.
    Bare,
}

/// Radial Fourier transform of `−(m/4π)θ(t − r)J₁(·)/l_t` compared with
/// `sin(tE)/E − sin(tρ)/ρ`, the massive part of `G̃`. Returns the absolute
/// residual.
pub fn pauli_jordan_radial_check(m: f64, t: f64, rho: f64, arg: BesselArgument) -> Result<f64> {
    if !(m > 0.0 && t > 0.0 && rho > 0.0) {
        return domain("radial check needs positive m, t and ρ");
    }
    let scale = match arg {
        BesselArgument::Massive => m,
        BesselArgument::Bare => 1.0,
    };
    // J₁(sl)/l is a power series in l² = t² − r², so it is smooth in r on [0, t].
    let mut failure = None;
    let kernel = |r: f64| -> f64 {
        let l = (t * t - r * r).max(0.0).sqrt();
        let x = scale * l;
        let j1_over_l = if x < 1e-6 {
            0.5 * scale * (1.0 - x * x / 8.0)
        } else {
            match specfun::bessel_j1(x) {
                Ok(v) => v / l,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        r * j1_over_l * (rho * r).sin()
    };
    let panels = ((rho * t / PI).ceil() as usize).max(1) * 4;
    let pts = quad::uniform(0.0, t, t / panels as f64);
    let integral = quad::composite_real(&pts, 16, kernel);
    if let Some(e) = failure {
        return Err(e);
    }
    // 4π ∫ r² f(r) sin(ρr)/(ρr) dr with f = −(m/4π) J₁/l.
    let transform = -m / rho * integral;
    let e = (m * m + rho * rho).sqrt();
    let target = (t * e).sin() / e - (t * rho).sin() / rho;
    Ok((transform - target).abs())
}

/// Photon spin matrices `(s^j)_{kl} = −i ε_{jkl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonSpin {
    pub s: [Matrix3c; 3],
}

pub fn photon_spin_matrices() -> PhotonSpin {
    let s1 = Matrix3c::new(O, O, O, O, O, -IM, O, IM, O);
    let s2 = Matrix3c::new(O, O, IM, O, O, O, -IM, O, O);
    let s3 = Matrix3c::new(O, -IM, O, IM, O, O, O, O, O);
    PhotonSpin { s: [s1, s2, s3] }
}

impl PhotonSpin {
    /// `(S, p) = Σ_j s^j p_j`; acting on `v` it gives `i p × v`.
    pub fn projection(&self, p: &[f64; 3]) -> Matrix3c {
        (0..3).fold(Matrix3c::zeros(), |acc, j| acc + self.s[j] * c(p[j], 0.0))
    }

    /// `max |[s^i, s^j] − iε_{ijk}s^k|` over cyclic pairs, plus Hermiticity.
    pub fn commutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let comm = self.s[i] * self.s[j] - self.s[j] * self.s[i];
            worst = worst.max(max_abs(&(comm - self.s[k] * IM)));
            worst = worst.max(max_abs(&(self.s[i] - self.s[i].adjoint())));
        }
        worst
    }
}

/// Rows of `Q` are the conjugated helicity `+`, helicity `−` and longitudinal
/// unit eigenvectors of `(S, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicityFrame {
    pub p: [f64; 3],
    pub q: Matrix3c,
}

/// `e_± = (e_θ ± i e_φ)/√2` from the spherical angles of `p`, with `φ = 0`
/// on the polar axis. Under `(S,p)v = i p × v` these carry eigenvalues `±ρ`.
pub fn helicity_diagonalizer(p: &[f64; 3]) -> Result<HelicityFrame> {
    let v = Vector3::new(p[0], p[1], p[2]);
    let rho = v.norm();
    if rho == 0.0 {
        return domain("helicity is undefined at p = 0");
    }
    let theta = p[0].hypot(p[1]).atan2(p[2]);
    let phi = p[1].atan2(p[0]);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    let plus: Vec<Complex64> = (0..3).map(|i| c(e_theta[i], e_phi[i]) * FRAC_1_SQRT_2).collect();
    let minus: Vec<Complex64> = (0..3).map(|i| c(e_theta[i], -e_phi[i]) * FRAC_1_SQRT_2).collect();
    let along: Vec<Complex64> = (0..3).map(|i| c(p[i] / rho, 0.0)).collect();
    let rows = [plus, minus, along];
    let q = Matrix3c::from_fn(|r, col| rows[r][col].conj());
    Ok(HelicityFrame { p: *p, q })
}

impl HelicityFrame {
    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.q * self.q.adjoint() - Matrix3c::identity()))
    }

    /// `‖Q(S,p)Q⁺ − diag(ρ, −ρ, 0)‖_max`.
    pub fn diagonalization_residual(&self) -> f64 {
        let rho = Vector3::from(self.p).norm();
        let target = Matrix3c::from_diagonal(&Vector3::new(c(rho, 0.0), c(-rho, 0.0), O));
        max_abs(&(self.q * photon_spin_matrices().projection(&self.p) * self.q.adjoint() - target))
    }
}

/// `Q⁺ diag(e^{−itρ}, e^{itρ}, 1) Q`; the identity at `p = 0`.
pub fn photon_symbol(p: &[f64; 3], t: f64) -> Matrix3c {
    let frame = match helicity_diagonalizer(p) {
        Ok(f) => f,
        Err(_) => return Matrix3c::identity(),
    };
    let rho = Vector3::from(*p).norm();
    let diag = Matrix3c::from_diagonal(&Vector3::new(
        Complex64::from_polar(1.0, -t * rho),
        Complex64::from_polar(1.0, t * rho),
        I1,
    ));
    frame.q.adjoint() * diag * frame.q
}

/// `‖i(M_{t+h} − M_{t−h})/(2h) − (S,p)M_t‖_max`.
pub fn photon_evolution_residual(p: &[f64; 3], t: f64, h: f64) -> f64 {
    let derivative = (photon_symbol(p, t + h) - photon_symbol(p, t - h)) * c(0.0, 1.0 / (2.0 * h));
    max_abs(&(derivative - photon_spin_matrices().projection(p) * photon_symbol(p, t)))
}
