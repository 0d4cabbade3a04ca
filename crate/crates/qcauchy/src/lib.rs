//! Quantum Cauchy functionals and their finite-dimensional pre-measures.
//!
//! The crate is organised bottom-up: [`specfun`] supplies the Bessel and
//! Macdonald kernels, [`testfn`] pairs the coordinate-space functionals with
//! probe functions, and [`momentum`] provides the Parseval route that every
//! coordinate pairing is checked against. [`premeasure`] and [`radon`] cover
//! the cylindrical measures, [`relativistic`] the Dirac and photon symbols,
//! [`semigroup`] the convolution identities and [`quasiclassical`] the B-factor
//! and large-mass regime.
//!
//! Fourier convention throughout: `ψ(p) = ∫ φ(x) e^{ipx} dx`.

pub mod error;
pub mod momentum;
pub mod premeasure;
pub mod quad;
pub mod quasiclassical;
pub mod radon;
pub mod relativistic;
pub mod semigroup;
pub mod specfun;
pub mod testfn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
