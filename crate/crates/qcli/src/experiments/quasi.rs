//! B-factor, large-mass asymptotics and the FW collapse.

use clap::Args;
use qcauchy::quasiclassical::{eikonal_error, exterior_b_check, fw_classical_limit, massive_via_b_check, LightconeCoord};
use qcauchy::testfn::{RegularizationConfig, TestFunction};
use qcauchy::Result;
use serde::Serialize;

use super::{params_of, sweep};
use crate::report::{kv, put_complex, ExperimentReport, Fields, Row};

#[derive(Debug, Args, Serialize)]
pub struct BfactorArgs {
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,3")]
    pub m: Vec<f64>,
    /// Center of the interior bump.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = 0.6)]
    pub width: f64,
}

/// Interior bumps compare the massless pairing of `B·φ` with the massive
/// pairing; one exterior bump compares the routine with direct quadrature.
pub fn bfactor(args: &BfactorArgs, seed: u64) -> Result<ExperimentReport> {
    let cfg = RegularizationConfig::default();
    let inner = TestFunction::bump(&[args.center], args.width)?;
    let outer = TestFunction::bump(&[args.t + 1.0], 0.5)?;
    let rows = sweep(&args.m, |&m| {
        let b = massive_via_b_check(args.t, m, &inner, &cfg)?;
        let mut out = Fields::new();
        put_complex(&mut out, "via_b", b.via_b);
        put_complex(&mut out, "massive", b.massive);
        let interior = Row::new(kv! {"check" => "interior", "m" => m}, out, b.residual, 1e-5);
        let e = exterior_b_check(args.t, m, &outer, &cfg)?;
        let mut out = Fields::new();
        put_complex(&mut out, "massive", e.massive);
        put_complex(&mut out, "direct", e.direct);
        let exterior = Row::new(kv! {"check" => "exterior", "m" => m}, out, e.residual, 1e-5);
        Ok([interior, exterior])
    })?;
    Ok(ExperimentReport::new("bfactor", params_of(args), rows.into_iter().flatten().collect(), seed))
}

#[derive(Debug, Args, Serialize)]
pub struct EikonalArgs {
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// A point strictly inside the light cone.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub x: f64,
    /// Values of `m·l_t`; the mass is derived from them.
    #[arg(long, value_delimiter = ',', default_value = "20,50,100")]
    pub ml: Vec<f64>,
}

/// Relative modulus error of the leading `K₁` asymptotic: 1% allowed below
/// `m·l_t = 50`, 0.3% from there on. The complex error is reported too.
pub fn eikonal(args: &EikonalArgs, seed: u64) -> Result<ExperimentReport> {
    let l = LightconeCoord::new(args.t, args.x)?.l();
    if l.im != 0.0 || l.re == 0.0 {
        return Err(qcauchy::Error::Domain("x must lie strictly inside the light cone".into()));
    }
    let rows = sweep(&args.ml, |&ml| {
        let m = ml / l.re;
        let e = eikonal_error(args.t, args.x, m)?;
        let tol = if ml < 50.0 { 1e-2 } else { 3e-3 };
        Ok(Row::new(kv! {"ml" => ml, "m" => m}, kv! {"modulus_error" => e.modulus, "complex_error" => e.complex}, e.modulus, tol))
    })?;
    Ok(ExperimentReport::new("eikonal", params_of(args), rows, seed))
}

#[derive(Debug, Args, Serialize)]
pub struct ClassicalLimitArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,0.6,0.8", allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// Masses, ideally one decade apart.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub m: Vec<f64>,
}

/// `‖T − γ⁰‖` per mass; each consecutive pair gives the decay factor per
/// decade of mass, which should be 10.
pub fn classical_limit(args: &ClassicalLimitArgs, seed: u64) -> Result<ExperimentReport> {
    let p: [f64; 3] = match args.p.as_slice() {
        [x, y, z] => [*x, *y, *z],
        _ => return Err(qcauchy::Error::Domain("--p needs three components".into())),
    };
    let table = fw_classical_limit(&p, &args.m)?;
    let rows = table
        .windows(2)
        .map(|w| {
            let decades = (w[1].m / w[0].m).log10();
            let per_decade = (w[0].deviation / w[1].deviation).powf(1.0 / decades);
            Row::new(
                kv! {"m_small" => w[0].m, "m_large" => w[1].m},
                kv! {"deviation_small" => w[0].deviation, "deviation_large" => w[1].deviation, "ratio_per_decade" => per_decade},
                (per_decade - 10.0).abs(),
                1.0,
            )
        })
        .collect();
    Ok(ExperimentReport::new("classical-limit", params_of(args), rows, seed))
}
