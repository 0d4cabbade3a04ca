//! `qcli`: runs the numerical checks of the `qcauchy` library and writes
//! deterministic JSON and CSV reports.
//!
//! Exit status is 0 when every row passes, 1 on a numeric failure and 2 on a
//! usage error (unknown flag or parameters outside an operation's domain).

mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use experiments::{dirac, measure, quasi, scalar};
use report::ExperimentReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "qcli", version, about = "Reproducible experiments for quantum Cauchy functionals")]
struct Cli {
    /// Directory that receives `<experiment>.json` and `<experiment>.csv`.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Replace every row tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the sampled experiments (semigroup, premeasure, cap, maxwell).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One-dimensional pairing: coordinate route against Parseval.
    Pair(scalar::PairArgs),
    /// Three-dimensional pairing of radial Gaussians.
    Pair3d(scalar::Pair3dArgs),
    /// Semigroup law for the symbol and the two-factor convolution.
    Semigroup(scalar::SemigroupArgs),
    /// Evolution equation by central differences.
    Evolution(scalar::EvolutionArgs),
    /// Box measures, normalization and factorization.
    Premeasure(measure::PremeasureArgs),
    /// Sign and decay of ball complements.
    Ball(measure::BallArgs),
    /// Half-space tails and the sphere-average identity.
    Radon(measure::RadonArgs),
    /// Cap fractions against Monte Carlo.
    Cap(measure::CapArgs),
    /// Cap fractions against the Gaussian tail.
    GaussianLimit(measure::GaussianLimitArgs),
    /// Foldy–Wouthuysen transform and Dirac propagator.
    Fw(dirac::FwArgs),
    /// Photon spin matrices, helicity frame and evolution.
    Maxwell(dirac::MaxwellArgs),
    /// Pauli–Jordan function and the Dirac-from-Klein–Gordon route.
    PauliJordan(dirac::PauliJordanArgs),
    /// B-factor relation between massless and massive pairings.
    Bfactor(quasi::BfactorArgs),
    /// Large-mass asymptotic of the massive kernel.
    Eikonal(quasi::EikonalArgs),
    /// Large-mass collapse of the FW transform.
    ClassicalLimit(quasi::ClassicalLimitArgs),
}

fn run(command: &Command, seed: u64) -> qcauchy::Result<ExperimentReport> {
    match command {
        Command::Pair(a) => scalar::pair(a, seed),
        Command::Pair3d(a) => scalar::pair3d(a, seed),
        Command::Semigroup(a) => scalar::semigroup(a, seed),
        Command::Evolution(a) => scalar::evolution(a, seed),
        Command::Premeasure(a) => measure::premeasure(a, seed),
        Command::Ball(a) => measure::ball(a, seed),
        Command::Radon(a) => measure::radon(a, seed),
        Command::Cap(a) => measure::cap(a, seed),
        Command::GaussianLimit(a) => measure::gaussian_limit_sweep(a, seed),
        Command::Fw(a) => dirac::fw(a, seed),
        Command::Maxwell(a) => dirac::maxwell(a, seed),
        Command::PauliJordan(a) => dirac::pauli_jordan(a, seed),
        Command::Bfactor(a) => quasi::bfactor(a, seed),
        Command::Eikonal(a) => quasi::eikonal(a, seed),
        Command::ClassicalLimit(a) => quasi::classical_limit(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(tol) = cli.tol {
        if !(tol >= 0.0) {
            eprintln!("error: --tol must be a nonnegative number");
            return ExitCode::from(2);
        }
    }
    let mut report = match run(&cli.command, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if experiments::is_usage_error(&e) { 2 } else { 1 });
        }
    };
    if let Some(tol) = cli.tol {
        report.override_tolerance(tol);
    }
    let (json, csv) = match cli.format {
        Format::Json => (true, false),
        Format::Csv => (false, true),
        Format::Both => (true, true),
    };
    let written = match report.write(&cli.out, json, csv) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    };
    let passed = report.rows.iter().filter(|r| r.pass).count();
    println!("{}: {passed}/{} rows pass", report.experiment, report.rows.len());
    for p in written {
        println!("  wrote {}", p.display());
    }
    if report.all_pass() {
        return ExitCode::SUCCESS;
    }
    for (i, row) in report.failing() {
        eprintln!(
            "FAIL row {i}: inputs {} residual {:e} > tolerance {:e}",
            serde_json::Value::Object(row.inputs.clone().into_iter().collect()),
            row.residual,
            row.tolerance
        );
    }
    ExitCode::from(1)
}
