//! One runner per subcommand. Each returns a complete report; tolerances
//! default to the acceptance thresholds and `--tol` replaces them afterwards.

pub mod dirac;
pub mod measure;
pub mod quasi;
pub mod scalar;

use clap::ValueEnum;
use qcauchy::premeasure::CylinderSpec;
use qcauchy::testfn::TestFunction;
use qcauchy::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::Fields;

/// Flattens a serializable argument struct into the report's `params`.
pub fn params_of<T: Serialize>(args: &T) -> Fields {
    match serde_json::to_value(args).expect("arguments serialize") {
        serde_json::Value::Object(map) => map.into_iter().collect(),
        other => [("value".to_string(), other)].into_iter().collect(),
    }
}

/// Evaluates `f` on every item, possibly in parallel, keeping input order.
pub fn sweep<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Cartesian product of two flag lists.
pub fn grid2(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    /// Gaussian packet with the given center, width and momentum.
    Gaussian,
    /// Standard bump with the given center and half-width.
    Bump,
}

pub fn probe_1d(kind: ProbeKind, center: f64, width: f64, momentum: f64) -> Result<TestFunction> {
    match kind {
        ProbeKind::Gaussian => TestFunction::gaussian(&[center], width, &[momentum]),
        ProbeKind::Bump => TestFunction::bump(&[center], width),
    }
}

/// Named cylinder bases used by the measure subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecName {
    /// Two increments projected on one axis.
    Line2,
    /// Two independent coordinates.
    Diag2,
    /// Three increments in two dimensions with mixed rows.
    Rot2,
    /// Three independent coordinates.
    Diag3,
}

impl SpecName {
    pub fn build(self) -> Result<CylinderSpec> {
        match self {
            SpecName::Line2 => CylinderSpec::line(vec![0.4, 0.9], vec![1.0, -0.5]),
            SpecName::Diag2 => CylinderSpec::diagonal(vec![0.6, 1.1]),
            SpecName::Rot2 => CylinderSpec::unbounded(
                vec![0.5, 0.5, 0.7],
                vec![vec![0.8, -0.6], vec![0.6, 0.8], vec![0.3, 0.2]],
            ),
            SpecName::Diag3 => CylinderSpec::diagonal(vec![0.6, 1.1, 0.4]),
        }
    }
}

/// Parameter problems are usage errors; everything else is numeric.
pub fn is_usage_error(e: &Error) -> bool {
    !matches!(e, Error::Convergence { .. })
}

/// For a sequence of negative-imaginary tail values: the largest violation of
/// zero real part, negative imaginary part and strict decay in modulus.
pub fn tail_violations(values: &[num_complex::Complex64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut worst = v.re.abs().max(v.im.max(0.0));
            if v.im == 0.0 {
                worst = worst.max(f64::MIN_POSITIVE);
            }
            if i > 0 {
                let growth = v.im.abs() - values[i - 1].im.abs();
                if growth >= 0.0 {
                    worst = worst.max(growth.max(f64::MIN_POSITIVE));
                }
            }
            worst
        })
        .collect()
}
