//! `gz`: command-line front end for the Gelfand-Zeitlin toolkit.
//!
//! Every command reads JSON and writes pretty-printed JSON to stdout;
//! diagnostics go to stderr. Exit codes: 0 ok, 1 parse or usage error,
//! 2 point outside the generic stratum, 3 numerical instability, 4 bad flow
//! index, 5 non-generic point for the chart, 6 sampling failure,
//! 7 verification ran but some relation missed its tolerance.

mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gz_core::ladder::{in_e_omega, track_branches};
use gz_core::orthopoly::{demo, Measure};
use gz_core::verify::run_verification;
use gz_core::{
    charpoly, chart, d, extract_ladder, ladder_to_charpolys, one_param_flow, principal_minor,
    reconstruct, unchart, GzError,
};
use serde_json::{json, Value};

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_VERIFY_TOL: f64 = 1e-6;
const ROOT_TOL: f64 = 1e-11;

#[derive(Parser)]
#[command(
    name = "gz",
    version,
    about = "Gelfand-Zeitlin ladders, flows and (r, s) coordinates"
)]
struct Cli {
    /// Tolerance for genericity and chart checks; for `verify`, the pass
    /// threshold (default 1e-6 there, 1e-8 elsewhere).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Reserved for overriding the branch ordering; not yet supported.
    #[arg(long, global = true, hide = true)]
    order: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue ladder of a matrix and its genericity verdict.
    Ladder {
        /// Matrix JSON file, or `-` for stdin.
        input: String,
        /// Exit 2 when the matrix is not generic.
        #[arg(long)]
        strict: bool,
    },
    /// Unit-subdiagonal Hessenberg matrix with a prescribed ladder.
    Reconstruct { input: String },
    /// Flow of the `index`-th ladder function for complex time `time`.
    Flow {
        input: String,
        #[arg(long)]
        index: usize,
        /// Complex time as "re,im" (a bare real is accepted).
        #[arg(long, allow_hyphen_values = true)]
        time: String,
    },
    /// (r, s) coordinates of a generic matrix.
    Chart { input: String },
    /// Matrix with the given (r, s) coordinates.
    Unchart { input: String },
    /// Checks the bracket relations, flow commutativity and chart round
    /// trips on random generic points.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Ladder of the Jacobi matrix of an orthogonal-polynomial family.
    DemoOrthopoly {
        /// `chebyshev1` or `legendre-like`.
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
    },
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<GzError> for Failure {
    fn from(e: GzError) -> Self {
        let code = match e {
            GzError::DimensionMismatch(_) | GzError::InvalidInput(_) => 1,
            GzError::NotInOmega(_) | GzError::DegenerateSpectrum { .. } => 2,
            GzError::ConvergenceFailure { .. }
            | GzError::NumericalInstability(_)
            | GzError::BranchMismatch { .. } => 3,
            GzError::NonGenericPoint(_) => 5,
            GzError::SamplingFailure(_) => 6,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn emit<T: serde::Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::parse(format!("serializing output: {e}")))
}

fn read_matrix(path: &str) -> Result<gz_core::ComplexMatrix, Failure> {
    input::read_source(path)
        .and_then(|t| input::matrix(&t))
        .map_err(Failure::parse)
}

fn cmd_ladder(path: &str, strict: bool, tol: f64) -> Outcome {
    let x = read_matrix(path)?;
    let z = extract_ladder(&x, ROOT_TOL)?;
    let member = in_e_omega(z.ladder(), tol);
    let report = json!({
        "ladder": emit(z.ladder())?,
        "member": member,
        "level_gaps": z.ladder().level_gaps(),
        "min_gap": z.ladder().min_gap(),
    });
    if strict && !member {
        eprintln!(
            "gz: matrix is not in the generic stratum (min gap {:e})",
            z.ladder().min_gap()
        );
        return Ok((report, 2));
    }
    Ok((report, 0))
}

fn cmd_reconstruct(path: &str, tol: f64) -> Outcome {
    let ladder = input::read_source(path)
        .and_then(|t| input::ladder(&t))
        .map_err(Failure::parse)?;
    let y = reconstruct(&ladder, tol)?.into_matrix();
    let mut residual: f64 = 0.0;
    for (m, want) in ladder_to_charpolys(&ladder).iter().enumerate() {
        let got = charpoly(&principal_minor(&y, m + 1)?);
        residual = residual.max(got.max_coeff_diff(want));
    }
    eprintln!("gz: max characteristic polynomial residual {residual:e}");
    Ok((
        json!({ "matrix": emit(&y)?, "charpoly_residual": residual }),
        0,
    ))
}

fn cmd_flow(path: &str, index: usize, time: &str, tol: f64) -> Outcome {
    let x = read_matrix(path)?;
    let q = input::complex_flag(time).map_err(Failure::parse)?;
    let n = x.n();
    if index == 0 || index > d(n - 1) {
        return Err(Failure {
            code: 4,
            message: format!(
                "flow index must be in 1..={} for n = {n}, got {index}",
                d(n - 1)
            ),
        });
    }
    let z = extract_ladder(&x, ROOT_TOL)?;
    if !in_e_omega(z.ladder(), tol) {
        return Err(
            GzError::NotInOmega(format!("min ladder gap {:e}", z.ladder().min_gap())).into(),
        );
    }
    let moved = one_param_flow(&z, index, q)?;
    let seen = track_branches(moved.x(), z.ladder())?;
    let drift = seen
        .flat()
        .iter()
        .zip(z.ladder().flat())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok((
        json!({ "matrix": emit(moved.x())?, "ladder_drift": drift }),
        0,
    ))
}

fn cmd_chart(path: &str, tol: f64) -> Outcome {
    let x = read_matrix(path)?;
    Ok((emit(&chart(&x, tol)?)?, 0))
}

fn cmd_unchart(path: &str, tol: f64) -> Outcome {
    let p = input::read_source(path)
        .and_then(|t| input::chart_point(&t))
        .map_err(Failure::parse)?;
    Ok((emit(&unchart(&p, tol)?)?, 0))
}

fn run(cli: Cli) -> Outcome {
    if cli.order.is_some() {
        return Err(Failure::parse("--order is reserved and not supported yet"));
    }
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    if tol.is_nan() || tol < 0.0 {
        return Err(Failure::parse("--tol must be a non-negative number"));
    }
    match cli.command {
        Command::Ladder { input, strict } => cmd_ladder(&input, strict, tol),
        Command::Reconstruct { input } => cmd_reconstruct(&input, tol),
        Command::Flow { input, index, time } => cmd_flow(&input, index, &time, tol),
        Command::Chart { input } => cmd_chart(&input, tol),
        Command::Unchart { input } => cmd_unchart(&input, tol),
        Command::Verify { n, seed, samples } => {
            let tol = cli.tol.unwrap_or(DEFAULT_VERIFY_TOL);
            let report = run_verification(n, seed, samples, tol)?;
            let code = if report.all_pass { 0 } else { 7 };
            Ok((emit(&report)?, code))
        }
        Command::DemoOrthopoly { measure, n } => {
            let measure: Measure = measure.parse()?;
            Ok((emit(&demo(measure, n)?)?, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((value, code)) => {
            match serde_json::to_string_pretty(&value) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("gz: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("gz: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
