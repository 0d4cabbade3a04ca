//! Cylindrical pre-measures, half-space tails and cap weights.

use clap::Args;
use num_complex::Complex64;
use qcauchy::premeasure::{box_measure_nd, effective_time, interval_measure_1d, CylinderSpec, MeasureConfig, Side};
use qcauchy::radon::{
    ball_complement, cap_average, gaussian_limit, half_space_measure, monte_carlo_cap, radon_q, sphere_average_identity,
    CapExponent, CapWeight, HalfSpaceQuery,
};
use qcauchy::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{params_of, sweep, tail_violations, SpecName};
use crate::report::{kv, put_complex, ExperimentReport, Fields, Row};

#[derive(Debug, Args, Serialize)]
pub struct PremeasureArgs {
    /// Random one-dimensional bases compared with the closed form.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

/// Numeric box measures against the interval closed form on random line
/// bases, plus the normalization and product checks.
pub fn premeasure(args: &PremeasureArgs, seed: u64) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    while cases.len() < args.samples {
        let n = rng.gen_range(1..5);
        let dt: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let spec = CylinderSpec::line(dt, alpha)?;
        let t = effective_time(&spec)?;
        let a = rng.gen_range(-3.0..3.0) * t;
        let b = a + rng.gen_range(0.2..3.0) * t;
        // Edges right at an atom leave nothing for the mollifier to resolve.
        if [a, b].iter().all(|x| (x.abs() - t).abs() >= 0.05 * t) {
            cases.push((spec, t, a, b));
        }
    }
    let cfg = MeasureConfig::default();
    let mut rows = sweep(&cases, |(spec, t, a, b)| {
        let numeric = box_measure_nd(spec, &[Side::Finite(*a, *b)], &cfg)?.value;
        let exact = interval_measure_1d(spec, *a, *b)?.value;
        let mut out = Fields::new();
        put_complex(&mut out, "numeric", numeric);
        put_complex(&mut out, "closed_form", exact);
        Ok(Row::new(kv! {"check" => "interval", "T" => *t, "a" => *a, "b" => *b}, out, (numeric - exact).norm(), 1e-6))
    })?;

    let spec = CylinderSpec::unbounded(vec![0.5, 0.5], vec![vec![1.0, 0.3], vec![-0.4, 1.0]])?;
    let side = 1e4 * spec.constraint_norm();
    let total = box_measure_nd(&spec, &[Side::Finite(-side / 2.0, side / 2.0); 2], &cfg)?.value;
    let mut out = Fields::new();
    put_complex(&mut out, "total", total);
    rows.push(Row::new(kv! {"check" => "normalization"}, out, (total - 1.0).norm(), 1e-3));

    let diag = CylinderSpec::diagonal(vec![0.6, 1.1])?;
    let line = |t: f64| CylinderSpec::line(vec![t], vec![1.0]);
    let (x, y) = ((0.2, 0.9), (-0.5, 1.6));
    let joint = box_measure_nd(&diag, &[Side::Finite(x.0, x.1), Side::Finite(y.0, y.1)], &cfg)?.value;
    let product = interval_measure_1d(&line(0.6)?, x.0, x.1)?.value * interval_measure_1d(&line(1.1)?, y.0, y.1)?.value;
    let mut out = Fields::new();
    put_complex(&mut out, "joint", joint);
    put_complex(&mut out, "product", product);
    rows.push(Row::new(kv! {"check" => "factorization"}, out, (joint - product).norm(), 1e-6));
    Ok(ExperimentReport::new("premeasure", params_of(args), rows, seed))
}

#[derive(Debug, Args, Serialize)]
pub struct BallArgs {
    #[arg(long, value_enum, default_value_t = SpecName::Diag2)]
    pub spec: SpecName,
    /// Radii in units of the largest atom radius.
    #[arg(long = "R-sweep", value_delimiter = ',', default_value = "2,4,8,16")]
    #[serde(rename = "R_sweep")]
    pub r_sweep: Vec<f64>,
}

/// Ball complements `μ(|a| ≥ R)`. The residual of each row is its largest
/// violation of: zero real part, negative imaginary part, and decay relative
/// to the previous radius.
pub fn ball(args: &BallArgs, seed: u64) -> Result<ExperimentReport> {
    let spec = args.spec.build()?;
    let q = spec.max_radius()?;
    let values = sweep(&args.r_sweep, |&f| ball_complement(&spec, f * q))?;
    let rows = tail_rows(&args.r_sweep, q, &values, "R");
    Ok(ExperimentReport::new("ball", params_of(args), rows, seed))
}

fn tail_rows(ratios: &[f64], q: f64, values: &[Complex64], key: &str) -> Vec<Row> {
    ratios
        .iter()
        .zip(values)
        .zip(tail_violations(values))
        .map(|((&f, &v), worst)| {
            let mut out = Fields::new();
            put_complex(&mut out, "measure", v);
            Row::new(kv! {"check" => "sign-decay", key => f * q, "ratio" => f}, out, worst, 1e-10)
        })
        .collect()
}

#[derive(Debug, Args, Serialize)]
pub struct RadonArgs {
    #[arg(long, value_enum, default_value_t = SpecName::Line2)]
    pub spec: SpecName,
    /// Unit direction ξ; defaults to a fixed direction for each dimension.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Option<Vec<f64>>,
    /// Half-space offsets in units of the projected time `Q`.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pub ratios: Vec<f64>,
}

/// Half-space tails along `ξ`. In one dimension they are compared with the
/// interval tail; in two and three the sphere-average identity is checked at
/// `R = 2·max Q` with the geometric cap weight.
pub fn radon(args: &RadonArgs, seed: u64) -> Result<ExperimentReport> {
    let spec = args.spec.build()?;
    let xi = args.xi.clone().unwrap_or_else(|| match spec.k() {
        1 => vec![1.0],
        2 => vec![0.6, -0.8],
        _ => vec![0.48, 0.6, 0.64],
    });
    let q = radon_q(&spec, &xi)?;
    let values = sweep(&args.ratios, |&f| half_space_measure(&HalfSpaceQuery::new(spec.clone(), xi.clone(), f * q)?))?;
    let mut rows = tail_rows(&args.ratios, q, &values, "r");
    if spec.k() == 1 {
        for (&f, &v) in args.ratios.iter().zip(&values) {
            let tail = interval_measure_1d(&spec, f * q, f64::INFINITY)?.value;
            let mut out = Fields::new();
            put_complex(&mut out, "half_space", v);
            put_complex(&mut out, "interval_tail", tail);
            rows.push(Row::new(kv! {"check" => "tail", "r" => f * q}, out, (v - tail).norm(), 1e-12));
        }
    } else {
        let r = 2.0 * spec.max_radius()?;
        let w = CapWeight::new(spec.k(), CapExponent::Geometric)?;
        let sides = sphere_average_identity(&spec, r, &w, &MeasureConfig::default())?;
        let mut out = Fields::new();
        put_complex(&mut out, "sphere_average", sides.lhs);
        put_complex(&mut out, "cap_integral", sides.rhs);
        rows.push(Row::new(kv! {"check" => "identity", "r" => r}, out, sides.residual, 1e-6));
    }
    Ok(ExperimentReport::new("radon", params_of(args), rows, seed))
}

#[derive(Debug, Args, Serialize)]
pub struct CapArgs {
    /// Dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub n: Vec<usize>,
    /// Ratios `R/ρ` in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

/// Geometric cap fractions against Monte Carlo; the residual is the
/// discrepancy in units of the sampling standard error. The normalizer-exponent
/// value is reported alongside.
pub fn cap(args: &CapArgs, seed: u64) -> Result<ExperimentReport> {
    let mut points = Vec::new();
    for (i, &n) in args.n.iter().enumerate() {
        for (j, &x) in args.ratios.iter().enumerate() {
            points.push((n, x, seed.wrapping_add((i * args.ratios.len() + j) as u64)));
        }
    }
    let rows = sweep(&points, |&(n, x, s)| {
        let geometric = cap_average(&CapWeight::new(n, CapExponent::Geometric)?, x, 1.0)?;
        let normalizing = cap_average(&CapWeight::new(n, CapExponent::Normalizer)?, x, 1.0)?;
        let (p, sigma) = monte_carlo_cap(n, x, args.samples, s)?;
        let out = kv! {"geometric" => geometric, "normalizing" => normalizing, "monte_carlo" => p, "sigma" => sigma};
        Ok(Row::new(kv! {"n" => n as f64, "ratio" => x}, out, (p - geometric).abs() / sigma, 3.0))
    })?;
    Ok(ExperimentReport::new("cap", params_of(args), rows, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Geometric,
    Normalizer,
}

impl From<Variant> for CapExponent {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Geometric => CapExponent::Geometric,
            Variant::Normalizer => CapExponent::Normalizer,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GaussianLimitArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,400")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub ratio: f64,
    #[arg(long, value_enum, default_value_t = Variant::Geometric)]
    pub variant: Variant,
}

/// Relative gap between the cap fraction and the Gaussian tail per `n`, then
/// one row per consecutive pair whose residual is the growth of the gap.
pub fn gaussian_limit_sweep(args: &GaussianLimitArgs, seed: u64) -> Result<ExperimentReport> {
    let gaps = sweep(&args.n, |&n| {
        let (exact, tail) = gaussian_limit(n, args.ratio, args.variant.into())?;
        Ok((exact, tail, (exact - tail).abs() / tail))
    })?;
    let mut rows: Vec<Row> = args
        .n
        .iter()
        .zip(&gaps)
        .map(|(&n, &(exact, tail, gap))| {
            Row::new(kv! {"n" => n as f64}, kv! {"cap" => exact, "gaussian_tail" => tail, "gap" => gap}, gap, 0.02)
        })
        .collect();
    for (w, ns) in gaps.windows(2).zip(args.n.windows(2)) {
        let growth = w[1].2 - w[0].2;
        rows.push(Row::new(
            kv! {"n_small" => ns[0] as f64, "n_large" => ns[1] as f64},
            kv! {"gap_change" => growth},
            // Shrinking means a negative change; zero growth still fails.
            if growth < 0.0 { 0.0 } else { growth.max(f64::MIN_POSITIVE) },
            0.0,
        ));
    }
    Ok(ExperimentReport::new("gaussian-limit", params_of(args), rows, seed))
}
