//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 parse error, 3 failed precondition,
//! 4 failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::expr::{parse, parse_with_prefix, MeroExpr, ParseError};
use crate::lens::{geometric_grid, variance_sweep, LensError};
use crate::morph::{verify_transform, Morph, MorphError, DEFAULT_MORPH_LAMBDA, DEFAULT_TRANSFORM_TOL};
use crate::output;
use crate::quadrature::{spectral_summary, QuadConfig, QuadError, DEFAULT_MAX_DIM, DEFAULT_MAX_GRID, DEFAULT_TOL};
use crate::slices::{parse_interval, product_measure, IntervalParseError, SliceSet};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Environment variable overriding the per-dimension grid cap.
pub const MAX_GRID_ENV: &str = "LENS_MAX_GRID";

#[derive(Parser, Debug)]
#[command(name = "lensvar", version, about = "Exterior probability and variance of meromorphic functions near a simple pole")]
pub struct Cli {
    /// Quadrature convergence tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest grid size per dimension (overrides LENS_MAX_GRID).
    #[arg(long, global = true)]
    max_grid: Option<usize>,
    /// Largest supported number of variables.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Core, residues, Jacobian and variance at one scale.
    #[command(allow_negative_numbers = true)]
    Analyze {
        #[arg(long)]
        expr: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        json: bool,
    },
    /// Variance over a geometric grid of scales, as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long)]
        expr: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, default_value_t = 33)]
        steps: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exterior measure of a slice, or of a product of slices.
    Measure {
        /// Angular interval "lo:hi", optionally bracketed; repeat for products.
        #[arg(long, required = true, allow_hyphen_values = true)]
        interval: Vec<String>,
        /// Number of factors; must match the number of intervals.
        #[arg(long)]
        dims: Option<usize>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Seeded property suites.
    Verify {
        #[arg(long, value_parser = ["measure", "prop1", "lemma", "theorem", "morph", "all"])]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transformation of residues and Jacobian under a coordinate change.
    #[command(allow_negative_numbers = true)]
    Transform {
        /// Function of u1..un.
        #[arg(long)]
        expr: String,
        /// Components g_1..g_n in w1..wn, comma separated.
        #[arg(long)]
        morph: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_MORPH_LAMBDA)]
        lambda: f64,
        /// Residual tolerance for pass/fail.
        #[arg(long, default_value_t = DEFAULT_TRANSFORM_TOL)]
        residual_tol: f64,
        #[arg(long)]
        json: bool,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn precondition(message: impl std::fmt::Display) -> Self {
        Self::new(EXIT_PRECONDITION, format!("error: {message}"))
    }
}

fn parse_failure(input: &str, e: &ParseError) -> Failure {
    let caret = format!("{}^", " ".repeat(e.offset()));
    Failure::new(EXIT_PARSE, format!("parse error {e}\n  {input}\n  {caret}"))
}

fn interval_failure(input: &str, e: &IntervalParseError) -> Failure {
    let caret = format!("{}^", " ".repeat(e.offset));
    Failure::new(EXIT_PARSE, format!("parse error at offset {}: {}\n  {input}\n  {caret}", e.offset, e.message))
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        Failure::precondition(e)
    }
}

impl From<LensError> for Failure {
    fn from(e: LensError) -> Self {
        Failure::precondition(e)
    }
}

impl From<MorphError> for Failure {
    fn from(e: MorphError) -> Self {
        Failure::precondition(e)
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::precondition(format!("{name} must be positive, got {v}")))
    }
}

fn config(cli: &Cli, env_grid: Option<String>) -> Result<QuadConfig, Failure> {
    let env_grid = match env_grid {
        Some(s) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::new(EXIT_USAGE, format!("error: {MAX_GRID_ENV}={s} is not a positive integer")))?,
        ),
        None => None,
    };
    let max_n = cli.max_grid.or(env_grid).unwrap_or(DEFAULT_MAX_GRID);
    if max_n < 4 || cli.max_dim == 0 {
        return Err(Failure::new(EXIT_USAGE, "error: grid and dimension caps must be positive (grid at least 4)"));
    }
    positive("tol", cli.tol)?;
    Ok(QuadConfig { tol: cli.tol, max_n, max_dim: cli.max_dim, ..QuadConfig::default() })
}

fn parse_expr(text: &str, n: u32) -> Result<MeroExpr, Failure> {
    parse(text, n as usize).map_err(|e| parse_failure(text, &e))
}

fn execute(cli: &Cli, cfg: &QuadConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::new(EXIT_PRECONDITION, format!("error: {e}"));
    match &cli.command {
        Command::Analyze { expr, n, lambda, json } => {
            let f = parse_expr(expr, *n)?;
            let s = spectral_summary(&f, positive("lambda", *lambda)?, cfg)?;
            let text = if *json { output::summary_to_json(&s) + "\n" } else { output::summary_to_text(&s) };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { expr, n, lambda_min, lambda_max, steps, out: path } => {
            let f = parse_expr(expr, *n)?;
            positive("lambda-min", *lambda_min)?;
            if lambda_max.is_nan() || lambda_max <= lambda_min {
                return Err(Failure::precondition("lambda-max must exceed lambda-min"));
            }
            if *steps < 3 {
                return Err(Failure::precondition("steps must be at least 3"));
            }
            let grid = geometric_grid(*lambda_min, *lambda_max, *steps)?;
            let csv = output::sweep_to_csv(&variance_sweep(&f, &grid, cfg)?);
            match path {
                Some(p) => std::fs::write(p, csv).map_err(io)?,
                None => out.write_all(csv.as_bytes()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Measure { interval, dims, lambda } => {
            if let Some(d) = dims {
                if *d != interval.len() {
                    return Err(Failure::new(
                        EXIT_USAGE,
                        format!("error: --dims {d} needs {d} --interval values, got {}", interval.len()),
                    ));
                }
            }
            let lambda = positive("lambda", *lambda)?;
            let mut factors = Vec::with_capacity(interval.len());
            for text in interval {
                let iv = parse_interval(text).map_err(|e| interval_failure(text, &e))?;
                factors.push(SliceSet::from_intervals(lambda, vec![iv]).map_err(Failure::precondition)?);
            }
            writeln!(out, "{}", output::fmt_short(product_measure(&factors))).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, seed } => {
            let suites = Suite::parse(suite).ok_or_else(|| Failure::new(EXIT_USAGE, format!("error: unknown suite {suite}")))?;
            let mut ok = true;
            for s in suites {
                let report = run_suite(s, *seed);
                ok &= report.passed();
                out.write_all(report.to_text().as_bytes()).map_err(io)?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Transform { expr, morph, n, lambda, residual_tol, json } => {
            let psi = parse_with_prefix(expr, *n as usize, 'u').map_err(|e| parse_failure(expr, &e))?;
            let g = parse_expr(morph, *n)?;
            let lambda = positive("lambda", *lambda)?;
            let m = Morph::validate(g, lambda)?;
            let report = verify_transform(&psi, &m, lambda, positive("residual-tol", *residual_tol)?, cfg)?;
            let text = if *json { output::transform_to_json(&report) + "\n" } else { output::transform_to_text(&report) };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. `LENS_MAX_GRID` is read from `env_grid`.
pub fn run_with_env<I, T>(args: I, env_grid: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = config(&cli, env_grid).and_then(|cfg| execute(&cli, &cfg, out));
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

/// [`run_with_env`] with `LENS_MAX_GRID` taken from the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var(MAX_GRID_ENV).ok(), out, err)
}
