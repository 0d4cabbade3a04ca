//! Scalar pairings: coordinate against momentum route, the semigroup law and
//! the evolution equation.

use std::f64::consts::FRAC_1_SQRT_2;

use clap::Args;
use qcauchy::momentum::{pair_via_parseval, ParsevalConfig, ScalarSymbol};
use qcauchy::semigroup::{evolution_equation_check, semigroup_coordinate_check, semigroup_symbol_check, Partition};
use qcauchy::testfn::{pair_cauchy_1d, pair_cauchy_3d, pair_cauchy_massive_1d, RegularizationConfig, TestFunction};
use qcauchy::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{grid2, params_of, probe_1d, sweep, ProbeKind};
use crate::report::{kv, put_complex, ExperimentReport, Fields, Row};

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub t: Vec<f64>,
    /// Masses, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub m: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ProbeKind::Gaussian)]
    pub probe: ProbeKind,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    /// Gaussian width or bump half-width.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub width: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub momentum: f64,
}

pub fn pair(args: &PairArgs, seed: u64) -> Result<ExperimentReport> {
    let phi = probe_1d(args.probe, args.center, args.width, args.momentum)?;
    let cfg = RegularizationConfig::default();
    let rows = sweep(&grid2(&args.t, &args.m), |&(t, m)| {
        let coord = if m == 0.0 { pair_cauchy_1d(t, &phi, &cfg)? } else { pair_cauchy_massive_1d(t, m, &phi, &cfg)? };
        let mom = pair_via_parseval(&ScalarSymbol::new(m, t, 1)?, &phi, &ParsevalConfig::default())?;
        let mut out = kv! {"quadrature_estimate" => coord.quadrature_error_estimate};
        put_complex(&mut out, "coordinate", coord.total);
        put_complex(&mut out, "parseval", mom.value);
        Ok(Row::new(kv! {"t" => t, "m" => m}, out, (coord.total - mom.value).norm(), 1e-6))
    })?;
    Ok(ExperimentReport::new("pair", params_of(args), rows, seed))
}

#[derive(Debug, Args, Serialize)]
pub struct Pair3dArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub m: Vec<f64>,
    /// Widths of the centered radial Gaussians.
    #[arg(long, value_delimiter = ',', default_value = "0.7071067811865476")]
    pub width: Vec<f64>,
}

/// Radial probes in three dimensions; the residual is relative to the
/// momentum-route value.
pub fn pair3d(args: &Pair3dArgs, seed: u64) -> Result<ExperimentReport> {
    let cfg = RegularizationConfig::default();
    let mut points = Vec::new();
    for &w in &args.width {
        for (t, m) in grid2(&args.t, &args.m) {
            points.push((w, t, m));
        }
    }
    let rows = sweep(&points, |&(w, t, m)| {
        let phi = TestFunction::centered_gaussian(3, w)?;
        let coord = pair_cauchy_3d(t, m, &phi, &cfg)?.total;
        let mom = pair_via_parseval(&ScalarSymbol::new(m, t, 3)?, &phi, &ParsevalConfig::default())?.value;
        let mut out = Fields::new();
        put_complex(&mut out, "coordinate", coord);
        put_complex(&mut out, "parseval", mom);
        Ok(Row::new(kv! {"width" => w, "t" => t, "m" => m}, out, (coord - mom).norm() / mom.norm(), 1e-3))
    })?;
    Ok(ExperimentReport::new("pair3d", params_of(args), rows, seed))
}

#[derive(Debug, Args, Serialize)]
pub struct SemigroupArgs {
    /// Two time increments for the coordinate-space convolution.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
    pub dt: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub width: f64,
    /// Random partitions and momenta for the symbol law.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

pub fn semigroup(args: &SemigroupArgs, seed: u64) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..args.samples {
        let n = rng.gen_range(1..65);
        let dt: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001..0.2)).collect();
        let p = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        let m = rng.gen_range(0.0..2.0);
        worst = worst.max(semigroup_symbol_check(m, &Partition::from_increments(&dt)?, &p));
    }
    let symbol_row = Row::new(
        kv! {"check" => "symbol"},
        kv! {"samples" => args.samples},
        worst,
        1e-12,
    );

    let phi = TestFunction::gaussian(&[args.center], args.width, &[0.0])?;
    let sides = semigroup_coordinate_check(0.0, &Partition::from_increments(&args.dt)?, &phi, &RegularizationConfig::default())?;
    let mut out = Fields::new();
    put_complex(&mut out, "convolution", sides.lhs);
    put_complex(&mut out, "direct", sides.rhs);
    let coord_row = Row::new(kv! {"check" => "coordinate"}, out, sides.residual, 1e-4);
    Ok(ExperimentReport::new("semigroup", params_of(args), vec![symbol_row, coord_row], seed))
}

#[derive(Debug, Args, Serialize)]
pub struct EvolutionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Finite-difference steps; consecutive entries should halve.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.005")]
    pub h: Vec<f64>,
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub width: f64,
}

/// Central-difference residual per step, then the ratio of consecutive
/// residuals, which should be 4 for a second-order scheme.
pub fn evolution(args: &EvolutionArgs, seed: u64) -> Result<ExperimentReport> {
    let phi = TestFunction::centered_gaussian(1, args.width)?;
    let cfg = RegularizationConfig::default();
    let checks = sweep(&args.h, |&h| evolution_equation_check(args.t, h, &phi, &cfg))?;
    let mut rows: Vec<Row> = args
        .h
        .iter()
        .zip(&checks)
        .map(|(&h, c)| {
            let mut out = Fields::new();
            put_complex(&mut out, "derivative", c.derivative);
            put_complex(&mut out, "generator", c.generator);
            Row::new(kv! {"h" => h}, out, c.residual, 1e-3)
        })
        .collect();
    for (w, hs) in checks.windows(2).zip(args.h.windows(2)) {
        let ratio = w[0].residual / w[1].residual;
        rows.push(Row::new(
            kv! {"h_coarse" => hs[0], "h_fine" => hs[1]},
            kv! {"ratio" => ratio},
            (ratio - 4.0).abs(),
            0.5,
        ));
    }
    Ok(ExperimentReport::new("evolution", params_of(args), rows, seed))
}
